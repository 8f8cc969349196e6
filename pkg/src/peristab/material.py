"""Constitutive laws, force vector states and nodal force assembly."""

from dataclasses import dataclass, field

import numpy as np

from . import _backend, kinematics, tensor
from .errors import CollapsedBond, ConfigurationError, ContractViolation

FAMILIES = ("generalized", "silling")
LAWS = ("hydrostatic", "hookean", "isotropic")


@dataclass
class MaterialSpec:
    """Material description.

    ``law`` selects the local model driven by the nonlocal strain:

    * ``hydrostatic``: ``S = kappa E``
    * ``hookean`` (1D only): ``S = E0(x) E``, ``youngs`` scalar or per node
    * ``isotropic``: ``S = lam tr(E) I + 2 mu E``

    For ``family='silling'`` the same law is applied to the small-strain
    measure ``sym(F) - I`` and returns a first Piola-Kirchhoff stress.
    """

    family: str = "generalized"
    m: float = 1.0
    law: str = "hydrostatic"
    kappa: float = 1.0
    youngs: object = 1.0
    lam: float = 0.0
    mu: float = 0.0
    density: float = 1.0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown model family {self.family!r}")
        if self.law not in LAWS:
            raise ConfigurationError(f"unknown law {self.law!r}")
        if not np.isfinite(self.m):
            raise ConfigurationError("Seth-Hill exponent must be finite")
        if self.law == "hydrostatic" and not self.kappa > 0:
            raise ConfigurationError("kappa must be positive")
        if self.law == "hookean" and not np.all(np.asarray(self.youngs) > 0):
            raise ConfigurationError("Young's modulus must be positive everywhere")
        if self.law == "isotropic" and not (self.mu > 0 and self.lam + 2 * self.mu > 0):
            raise ConfigurationError("isotropic law needs mu > 0 and lam + 2 mu > 0")
        if not self.density > 0:
            raise ConfigurationError("density must be positive")

    def max_modulus(self):
        if self.law == "hydrostatic":
            return self.kappa
        if self.law == "hookean":
            return float(np.max(self.youngs))
        return self.lam + 2 * self.mu


def stress(E, spec, youngs=None):
    """Local stress from a (batch of) symmetric strain tensor(s)."""
    E = np.asarray(E, dtype=float)
    d = E.shape[-1]
    if spec.law == "hydrostatic":
        return spec.kappa * E
    if spec.law == "hookean":
        if d != 1:
            raise ContractViolation("hookean law is one-dimensional")
        y = spec.youngs if youngs is None else youngs
        y = np.asarray(y, dtype=float)
        return (y.reshape(y.shape + (1, 1)) if y.ndim else y) * E
    tr = np.trace(E, axis1=-2, axis2=-1)
    return spec.lam * tr[..., None, None] * np.eye(d) + 2 * spec.mu * E


stress_generalized = stress


def tangent(spec, dim, youngs=None):
    """Fourth-order tangent ``dS/dE`` of the (linear) local law."""
    if spec.law == "hydrostatic":
        return spec.kappa * tensor.identity4_sym(dim)
    if spec.law == "hookean":
        if dim != 1:
            raise ContractViolation("hookean law is one-dimensional")
        y = spec.youngs if youngs is None else youngs
        return float(y) * np.ones((1, 1, 1, 1))
    return tensor.isotropic4(dim, spec.lam, spec.mu)


def force_state_generalized(xi, Y, S, Linv, m, omega=1.0):
    """Force vector state of one bond for the Seth-Hill correspondence model."""
    xi = np.asarray(xi, dtype=float)
    Y = np.asarray(Y, dtype=float)
    ylen = np.linalg.norm(Y)
    xlen = np.linalg.norm(xi)
    lam = ylen / xlen
    if lam < kinematics.COLLAPSE_RATIO:
        raise CollapsedBond("deformed bond has (nearly) zero length")
    proj = np.einsum("p,q,pqij,ij->", xi, xi, Linv, S) / xlen**2
    return omega * proj * lam ** (2 * m) * Y / ylen**2


def force_state_uniform(xi, F, S, Linv, m, omega=1.0):
    """Same force state written for ``Y = F xi``, as a separate evaluation path."""
    xi = np.asarray(xi, dtype=float)
    xlen = np.linalg.norm(xi)
    ratio = np.linalg.norm(F @ xi) / xlen
    c = np.einsum("ij,pqij->pq", S, Linv)
    return omega * ratio ** (2 * m - 2) * np.einsum("pq,kl,p,q,l->k", c, F, xi, xi, xi) / xlen**4


def force_state_silling(xi, sigma, Kinv, omega=1.0):
    return omega * sigma @ Kinv @ np.asarray(xi, dtype=float)


@dataclass
class Body:
    """A discretised body: nodes, families, material and cached shape data.

    ``internal_force(x)`` returns the nodal force density
    ``f_i = sum_j (T_i<xi_ij> - T_j<xi_ji>) dV_j`` (force per unit volume).
    """

    nodes: object
    families: object
    material: MaterialSpec
    backend: str = None
    shapes: kinematics.ReferenceShapes = field(init=False, repr=False)

    def __post_init__(self):
        self.kernels = _backend.get(self.backend)
        self.backend = _backend.name_of(self.kernels)
        fam = self.families
        self.dim = self.nodes.dim
        self._owner = np.ascontiguousarray(fam.owner, dtype=np.int64)
        self._nbr = np.ascontiguousarray(fam.neighbors, dtype=np.int64)
        self._xi = np.ascontiguousarray(fam.xi, dtype=float)
        self._len = np.ascontiguousarray(fam.length, dtype=float)
        self._omega = np.ascontiguousarray(fam.omega, dtype=float)
        self._vol = np.ascontiguousarray(self.nodes.volumes, dtype=float)
        self._wvol = np.ascontiguousarray(self._omega * self._vol[self._nbr])
        self.shapes = kinematics.reference_shapes(fam, self.nodes.volumes)
        youngs = self.material.youngs
        if self.material.law == "hookean":
            youngs = np.broadcast_to(np.asarray(youngs, dtype=float), (self.nodes.n_nodes,))
            if self.dim != 1:
                raise ConfigurationError("hookean law is one-dimensional")
        self.youngs = youngs

    @property
    def reference(self):
        return self.nodes.positions

    def _strain_moment(self, x):
        acc = np.zeros((self.nodes.n_nodes, self.dim, self.dim))
        bad = self.kernels.strain_sum(self._owner, self._nbr, self._xi, self._len,
                                      self._wvol, np.ascontiguousarray(x, dtype=float),
                                      float(self.material.m), acc)
        if bad >= 0:
            raise CollapsedBond(
                f"bond {bad} (node {self._owner[bad]} -> {self._nbr[bad]}) collapsed", bond=int(bad)
            )
        return acc

    def strain(self, x):
        """Seth-Hill strain (generalized) or small strain ``sym(F) - I`` (Silling)."""
        if self.material.family == "generalized":
            return np.einsum("nijkl,nkl->nij", self.shapes.Linv, self._strain_moment(x))
        F = self.def_grad(x)
        return 0.5 * (F + np.swapaxes(F, 1, 2)) - np.eye(self.dim)

    def def_grad(self, x):
        acc = np.zeros((self.nodes.n_nodes, self.dim, self.dim))
        self.kernels.defgrad_sum(self._owner, self._nbr, self._xi, self._wvol,
                                 np.ascontiguousarray(x, dtype=float), acc)
        return acc @ self.shapes.Kinv

    def stress(self, x):
        youngs = self.youngs if self.material.law == "hookean" else None
        return stress(self.strain(x), self.material, youngs)

    def internal_force(self, x):
        x = np.ascontiguousarray(x, dtype=float)
        out = np.zeros_like(x)
        S = self.stress(x)
        if self.material.family == "generalized":
            P = np.ascontiguousarray(np.einsum("npqij,nij->npq", self.shapes.Linv, S))
            bad = self.kernels.generalized_force(self._owner, self._nbr, self._xi, self._len,
                                                 self._omega, self._vol, x, P,
                                                 float(self.material.m), out)
            if bad >= 0:
                raise CollapsedBond(f"bond {bad} collapsed", bond=int(bad))
        else:
            Q = np.ascontiguousarray(S @ self.shapes.Kinv)
            self.kernels.silling_force(self._owner, self._nbr, self._xi, self._omega,
                                       self._vol, Q, out)
        return out

    def internal_force_at(self, node, x):
        return self.internal_force(x)[node]

    def bond_force_states(self, x):
        """Force state ``T_i<xi>`` of every bond, shape ``(n_bonds, d)``."""
        S = self.stress(x)
        Y = x[self._nbr] - x[self._owner]
        if self.material.family == "generalized":
            m = self.material.m
            P = np.einsum("npqij,nij->npq", self.shapes.Linv, S)
            lam = np.linalg.norm(Y, axis=1) / self._len
            proj = np.einsum("bi,bij,bj->b", self._xi, P[self._owner], self._xi)
            coef = self._omega * proj * lam ** (2 * m - 2) / self._len**4
            return coef[:, None] * Y
        Q = S @ self.shapes.Kinv
        return self._omega[:, None] * np.einsum("bij,bj->bi", Q[self._owner], self._xi)
