"""Nonlocal kinematics: shape tensors, deformation gradient and Seth-Hill strains.

Whole-body functions take positions ``x`` of shape ``(n, d)`` and return one
tensor per node. The ``*_family`` variants evaluate a single family from
explicit bond data (``xi``, ``omega``, ``dv`` and deformed bonds ``Y``) and
serve as direct-summation references.
"""

from dataclasses import dataclass

import numpy as np

from . import _backend, tensor
from .errors import CollapsedBond, ContractViolation, SingularShapeTensor

LOG_BRANCH = 1e-9
COLLAPSE_RATIO = 1e-10


def _contig(a, dtype=float):
    return np.ascontiguousarray(a, dtype=dtype)


def shape_tensor_k(families, volumes):
    """``K = sum omega xi (x) xi dV`` for every node, shape ``(n, d, d)``."""
    c = families.omega * volumes[families.neighbors]
    terms = c[:, None, None] * families.xi[:, :, None] * families.xi[:, None, :]
    return _bond_sum(families, terms)


def shape_tensor_l(families, volumes):
    """``L = sum omega xi(x)xi(x)xi(x)xi / |xi|^4 dV``, shape ``(n, d, d, d, d)``."""
    n = families.xi / families.length[:, None]
    c = families.omega * volumes[families.neighbors]
    terms = np.einsum("b,bi,bj,bk,bl->bijkl", c, n, n, n, n)
    return _bond_sum(families, terms)


def _bond_sum(families, terms):
    out = np.zeros((families.n_nodes,) + terms.shape[1:])
    np.add.at(out, families.owner, terms)
    return out


@dataclass(frozen=True)
class ReferenceShapes:
    """Per-node reference-configuration shape data, computed once."""

    K: np.ndarray
    Kinv: np.ndarray
    L: np.ndarray
    Linv: np.ndarray
    Linv_mandel: np.ndarray


def reference_shapes(families, volumes, cond_cap=tensor.COND_CAP):
    K = shape_tensor_k(families, volumes)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(K)
    if np.any(~np.isfinite(cond) | (cond > cond_cap)):
        raise SingularShapeTensor("second-order shape tensor K is singular for some node")
    Kinv = np.linalg.inv(K)
    L = shape_tensor_l(families, volumes)
    Lm_inv = tensor.invert_mandel(tensor.to_mandel4(L), cond_cap)
    return ReferenceShapes(K, Kinv, L, tensor.from_mandel4(Lm_inv), Lm_inv)


def deformed_bonds(families, x):
    return x[families.neighbors] - x[families.owner]


def _wvol(families, volumes):
    return _contig(families.omega * volumes[families.neighbors])


def def_grad_bar(families, volumes, x, Kinv, kernels=None):
    """Nonlocal deformation gradient ``(sum omega Y (x) xi dV) K^-1``."""
    k = kernels or _backend.kernels
    d = x.shape[1]
    acc = np.zeros((families.n_nodes, d, d))
    k.defgrad_sum(families.owner, families.neighbors, _contig(families.xi),
                  _wvol(families, volumes), _contig(x), acc)
    return acc @ Kinv


def _strain_moment(families, volumes, x, m, kernels):
    k = kernels or _backend.kernels
    d = x.shape[1]
    acc = np.zeros((families.n_nodes, d, d))
    bad = k.strain_sum(families.owner, families.neighbors, _contig(families.xi),
                       _contig(families.length), _wvol(families, volumes), _contig(x),
                       float(m), acc)
    if bad >= 0:
        raise CollapsedBond(
            f"bond {bad} (node {families.owner[bad]} -> {families.neighbors[bad]}) collapsed",
            bond=int(bad),
        )
    return acc


def _contract_linv(Linv, B):
    return np.einsum("...ijkl,...kl->...ij", Linv, B)


def seth_hill_strain(families, volumes, x, Linv, m, kernels=None):
    """Nonlocal Lagrangian Seth-Hill strain of order ``m`` for every node.

    ``|m| < 1e-9`` selects the logarithmic member. The bracket is accumulated
    as ``sum omega ((|Y|/|xi|)^(2m) - 1)/(2m) n(x)n dV`` which equals
    ``(C_m - I)/(2m)`` without the cancellation of forming ``C_m`` first.
    """
    return _contract_linv(Linv, _strain_moment(families, volumes, x, m, kernels))


def cauchy_green_bar(families, volumes, x, Linv, m, kernels=None):
    """Nonlocal right Cauchy-Green tensor of order ``m`` (``m != 0``)."""
    if abs(m) < LOG_BRANCH:
        raise ContractViolation("the Cauchy-Green family is defined for m != 0 only")
    d = x.shape[1]
    return np.eye(d) + 2.0 * m * seth_hill_strain(families, volumes, x, Linv, m, kernels)


# -- single-family references -------------------------------------------------


def _check_bonds(Y, xi):
    ylen = np.linalg.norm(Y, axis=-1)
    lam = ylen / np.linalg.norm(xi, axis=-1)
    if np.any(lam < COLLAPSE_RATIO):
        raise CollapsedBond("deformed bond has (nearly) zero length")
    return ylen, lam


def shape_k_family(xi, omega, dv):
    return np.einsum("b,bi,bj->ij", omega * dv, xi, xi)


def shape_l_family(xi, omega, dv):
    n = xi / np.linalg.norm(xi, axis=1)[:, None]
    return np.einsum("b,bi,bj,bk,bl->ijkl", omega * dv, n, n, n, n)


def def_grad_family(xi, omega, dv, Y, Kinv):
    return np.einsum("b,bi,bj->ij", omega * dv, Y, xi) @ Kinv


def cauchy_green_family(xi, omega, dv, Y, Linv, m):
    if abs(m) < LOG_BRANCH:
        raise ContractViolation("the Cauchy-Green family is defined for m != 0 only")
    _, lam = _check_bonds(Y, xi)
    n = xi / np.linalg.norm(xi, axis=1)[:, None]
    B = np.einsum("b,bi,bj->ij", omega * dv * lam ** (2 * m), n, n)
    return np.einsum("ijkl,kl->ij", Linv, B)


def seth_hill_family(xi, omega, dv, Y, Linv, m):
    if abs(m) >= LOG_BRANCH:
        C = cauchy_green_family(xi, omega, dv, Y, Linv, m)
        return (C - np.eye(C.shape[0])) / (2 * m)
    _, lam = _check_bonds(Y, xi)
    n = xi / np.linalg.norm(xi, axis=1)[:, None]
    B = np.einsum("b,bi,bj->ij", omega * dv * np.log(lam), n, n)
    return np.einsum("ijkl,kl->ij", Linv, B)


def local_seth_hill(F, m):
    """Local Seth-Hill strain ``(C^m - I)/(2m)``, ``ln(C)/2`` for ``m = 0``."""
    C = F.T @ F
    w, v = np.linalg.eigh(C)
    if abs(m) < LOG_BRANCH:
        f = 0.5 * np.log(w)
    else:
        f = np.expm1(m * np.log(w)) / (2 * m)
    return (v * f) @ v.T
