"""Stability analysis of homogeneous equilibria.

Finite-difference Jacobians, analytic diagonal blocks (discrete and
continuum), the hydrostatic indicator Gamma(m), the discrete 1D/2D criteria,
lattice sums, Silling's dT.dY test, region maps and the 1D dispersion relation.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy import integrate, optimize

from . import mesh, tensor
from .errors import CollapsedBond, ContractViolation
from .kinematics import COLLAPSE_RATIO, LOG_BRANCH
from .material import Body, MaterialSpec, tangent

FD_REL_STEP = 1e-6
MARGINAL_TOL = 1e-8


# -- finite-difference Jacobian ------------------------------------------------


def _reach(body):
    """Largest family offset along any axis, in grid steps."""
    return int(np.rint(np.abs(body.families.xi).max() / body.nodes.spacing))


def dependency_pattern(body):
    """Boolean sparse pattern: ``D[i, j]`` if ``f_i`` depends on ``x_j``."""
    n = body.nodes.n_nodes
    fam = body.families
    a = sp.csr_matrix((np.ones(fam.n_bonds), (fam.owner, fam.neighbors)), shape=(n, n))
    a = ((a + a.T + sp.identity(n, format="csr")) != 0).astype(np.int8)
    return ((a @ a) != 0).tocsc()


def color_nodes(body):
    """Colour nodes so that no row of the Jacobian touches two nodes of one colour.

    On a uniform grid, ``f_i`` depends on nodes at most ``2r`` steps away per
    axis (``r`` = family reach), so nodes whose grid indices agree modulo
    ``4r + 1`` on every axis never share a row.
    """
    idx = np.asarray(body.nodes.indices)
    counts = np.asarray(body.nodes.counts)
    width = np.minimum(4 * _reach(body) + 1, counts)
    colour = np.zeros(len(idx), dtype=np.int64)
    stride = 1
    for ax in range(idx.shape[1]):
        colour += (idx[:, ax] % width[ax]) * stride
        stride *= int(width[ax])
    _, colour = np.unique(colour, return_inverse=True)
    return colour


def jacobian_fd(body, x, eps=None, threads=1):
    """Central-difference Jacobian ``df_k(I)/dx_l(J)``, sparse, ``(n d) x (n d)``.

    Degrees of freedom are ordered node-major (``dof = node * d + component``).
    Columns are probed one colour at a time; each entry is written exactly once
    so the result does not depend on ``threads``.
    """
    x = np.ascontiguousarray(x, dtype=float)
    d = body.dim
    n = body.nodes.n_nodes
    eps = FD_REL_STEP * body.nodes.spacing if eps is None else eps
    if not eps > 0:
        raise ContractViolation("finite-difference step must be positive")
    colour = color_nodes(body)
    pattern = dependency_pattern(body)
    groups = [np.flatnonzero(colour == c) for c in range(colour.max() + 1)]

    def probe(task):
        c, comp = task
        cols = groups[c]
        xp = x.copy()
        xp[cols, comp] += eps
        xm = x.copy()
        xm[cols, comp] -= eps
        df = (body.internal_force(xp) - body.internal_force(xm)) / (2.0 * eps)
        starts, stops = pattern.indptr[cols], pattern.indptr[cols + 1]
        lens = stops - starts
        rows = np.concatenate([pattern.indices[a:b] for a, b in zip(starts, stops)])
        owner = np.repeat(cols, lens)
        r = (rows[:, None] * d + np.arange(d)).ravel()
        ccol = np.repeat(owner * d + comp, d)
        return r, ccol, df[rows].ravel()

    tasks = [(c, comp) for c in range(len(groups)) for comp in range(d)]
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(probe, tasks))
    else:
        parts = [probe(t) for t in tasks]
    rows = np.concatenate([p[0] for p in parts])
    cols = np.concatenate([p[1] for p in parts])
    vals = np.concatenate([p[2] for p in parts])
    return sp.csr_matrix((vals, (rows, cols)), shape=(n * d, n * d))


def fd_diag_block(body, x, node, eps=None):
    """``df(node)/dx(node)`` by central differences, a ``d x d`` block."""
    x = np.ascontiguousarray(x, dtype=float)
    eps = FD_REL_STEP * body.nodes.spacing if eps is None else eps
    block = np.zeros((body.dim, body.dim))
    for l in range(body.dim):
        xp = x.copy()
        xp[node, l] += eps
        xm = x.copy()
        xm[node, l] -= eps
        block[:, l] = (body.internal_force(xp)[node] - body.internal_force(xm)[node]) / (2 * eps)
    return block


def fd_diag_block_richardson(body, x, node, eps=None):
    """Richardson-extrapolated diagonal block from steps ``eps`` and ``2 eps``."""
    eps = FD_REL_STEP * body.nodes.spacing if eps is None else eps
    fine = fd_diag_block(body, x, node, eps)
    coarse = fd_diag_block(body, x, node, 2 * eps)
    return (4 * fine - coarse) / 3


# -- analytic diagonal block ---------------------------------------------------


def _family_arrays(body, node):
    bonds = body.families.bonds_of(node)
    xi = body.families.xi[bonds]
    omega = body.families.omega[bonds]
    dv = body.nodes.volumes[body.families.neighbors[bonds]]
    return bonds, xi, omega, dv


def _check_uniform(body, x, node, rtol=1e-9):
    bonds, xi, _, _ = _family_arrays(body, node)
    Y = x[body.families.neighbors[bonds]] - x[node]
    F = np.linalg.lstsq(xi, Y, rcond=None)[0].T
    if np.abs(Y - xi @ F.T).max() > rtol * np.abs(Y).max():
        raise ContractViolation("analytic diagonal block requires a homogeneous deformation")
    if np.abs(xi.sum(0)).max() > 1e-9 * np.abs(xi).max() * len(xi):
        raise ContractViolation("analytic diagonal block requires a point-symmetric family")
    return Y


def diag_block_analytic(body, x, node, discrete=True, moduli=None):
    """Diagonal Jacobian block ``df_k(X)/dx_l(X)`` on a homogeneous state.

    Generalized model: both terms of the discrete diagonal expression (the
    first one is ``O(dX)`` and vanishes in the continuum); ``discrete=False``
    keeps only the second. Silling model: the single discrete term
    ``-(dsigma_kp/dF_ln) K^-1_pq K^-1_rn dV sum omega^2 xi_r xi_q dV``.
    ``moduli`` overrides the material tangent ``dS/dE`` (``d^4`` array).
    """
    x = np.asarray(x, dtype=float)
    spec = body.material
    Y = _check_uniform(body, x, node)
    _, xi, omega, dv = _family_arrays(body, node)
    d = body.dim
    youngs = body.youngs[node] if spec.law == "hookean" else None
    C = tangent(spec, d, youngs) if moduli is None else np.asarray(moduli, dtype=float)
    dVi = body.nodes.volumes[node]

    if spec.family == "silling":
        Kinv = body.shapes.Kinv[node]
        M = np.einsum("b,bi,bj->ij", omega**2 * dv, xi, xi)
        return -dVi * np.einsum("kpln,pq,rn,rq->kl", C, Kinv, Kinv, M)

    m = spec.m
    Linv = body.shapes.Linv[node]
    S = body.stress(x)[node]
    ylen2 = np.einsum("bi,bi->b", Y, Y)
    xlen2 = np.einsum("bi,bi->b", xi, xi)
    lam = np.sqrt(ylen2 / xlen2)
    yy = Y[:, :, None] * Y[:, None, :] / ylen2[:, None, None]
    proj = np.einsum("pqij,ij->pq", Linv, S)
    xqx = np.einsum("bp,pq,bq->b", xi, proj, xi)
    second = -2.0 * np.einsum(
        "b,bkl->kl", omega * dv * lam ** (2 * m - 2) * xqx / xlen2**2,
        2 * (m - 1) * yy + np.eye(d),
    )
    if not discrete:
        return second
    G = np.einsum("ijrs,turs,pqij->pqtu", C, Linv, Linv)
    xg = np.einsum("bp,bq,bt,bu,pqtu->b", xi, xi, xi, xi, G)
    first = -dVi * np.einsum("b,bkl->kl", omega**2 * dv * lam ** (4 * m - 2) * xg / xlen2**3, yy)
    return first + second


# -- Gamma(m) and critical exponents -------------------------------------------


@lru_cache(maxsize=None)
def _sphere_rule(dim):
    """Directions and weights integrating polynomials exactly on the unit sphere."""
    if dim == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if dim == 2:
        th = 2 * np.pi * np.arange(64) / 64
        return np.stack([np.cos(th), np.sin(th)], 1), np.full(64, 2 * np.pi / 64)
    mu, wmu = np.polynomial.legendre.leggauss(24)
    ph = 2 * np.pi * np.arange(48) / 48
    s = np.sqrt(1 - mu**2)
    dirs = np.stack([np.outer(s, np.cos(ph)).ravel(), np.outer(s, np.sin(ph)).ravel(),
                     np.repeat(mu, 48)], 1)
    return dirs, np.repeat(wmu, 48) * (2 * np.pi / 48)


def _radial(fun, lo, hi):
    val, _ = integrate.quad(fun, lo, hi, epsrel=1e-12, epsabs=0.0, limit=200)
    return val


def continuum_shape_l(dim, infl):
    """Continuum fourth-order shape tensor of a spherical influence function."""
    dirs, w = _sphere_rule(dim)
    radial = _radial(lambda r: infl.weight(r) * r ** (dim - 1), 0.0, infl.horizon)
    return radial * np.einsum("a,ai,aj,ak,al->ijkl", w, dirs, dirs, dirs, dirs)


def weighted_volume_continuum(dim, infl):
    _, w = _sphere_rule(dim)
    return w.sum() * _radial(lambda r: infl.weight(r) * r ** (dim - 1), 0.0, infl.horizon)


def gamma_m(m, dim, infl, r_min=None, axis=0, spacing=None):
    """Hydrostatic stability indicator Gamma(m) by quadrature.

    ``Gamma = L^-1_pqii int omega xi_p xi_q / |xi|^4 [2(m-1) xi_k^2/|xi|^2 + 1] dxi``
    with ``k = axis``. The radial factor ``int omega r^(d-3) dr`` diverges at
    the origin for ``d < 3``; ``r_min`` (default: one grid ``spacing``) cuts
    it off. The cutoff scales Gamma but not its zero.
    """
    if dim not in (1, 2, 3):
        raise ContractViolation("dim must be 1, 2 or 3")
    r_min = _cutoff(dim, r_min, spacing)
    L = continuum_shape_l(dim, infl)
    Linv = tensor.invert_sym4(L) if dim > 1 else 1.0 / L
    trace = np.einsum("pqii->pq", np.reshape(Linv, (dim,) * 4))
    dirs, w = _sphere_rule(dim)
    ang = np.einsum("a,ap,aq,a->pq", w, dirs, dirs, 2 * (m - 1) * dirs[:, axis] ** 2 + 1)
    radial = _radial(lambda r: infl.weight(r) * r ** (dim - 3), r_min, infl.horizon)
    return float(np.einsum("pq,pq->", trace, ang) * radial)


def _cutoff(dim, r_min, spacing):
    if r_min is not None:
        return float(r_min)
    if dim == 3:
        return 0.0
    if spacing is None:
        raise ContractViolation("Gamma diverges at the origin for d < 3; give r_min or spacing")
    return float(spacing)


def gamma_m_paper(m, dim, infl, r_min=None, spacing=None):
    """The closed forms as printed: 1D ``(2m-1)/V int w/r^2``, 2D ``4 pi m/V int w/r``,
    3D ``8 pi m/V int w``."""
    r_min = _cutoff(dim, r_min, spacing)
    V = weighted_volume_continuum(dim, infl)
    if dim == 1:
        return (2 * m - 1) / V * _radial(lambda r: infl.weight(r) / r**2, r_min, infl.horizon) * 2
    if dim == 2:
        return 4 * np.pi * m / V * _radial(lambda r: infl.weight(r) / r, r_min, infl.horizon)
    return 8 * np.pi * m / V * _radial(infl.weight, 0.0, infl.horizon)


# Zeros of Gamma(m) evaluated from its definition. For d = 3 the angular
# average of 2(m-1) n_k^2 + 1 is (2m+1)/3, so the zero is -1/2; the printed
# 3D closed form (8 pi m / V) gives 0.
M_CRITICAL = {1: 0.5, 2: 0.0, 3: -0.5}
M_CRITICAL_PAPER = {1: 0.5, 2: 0.0, 3: 0.0}


def m_critical(dim):
    """Seth-Hill exponent where Gamma(m) = 0 (``(2 - d)/2``)."""
    if dim not in M_CRITICAL:
        raise ContractViolation("dim must be 1, 2 or 3")
    return M_CRITICAL[dim]


def diag_continuum_hydro(m, a, dim, infl, kappa=1.0, r_min=None, spacing=None):
    """``-2 kappa |1+a|^(2m-2) a Gamma(m)`` for ``S = kappa a I``."""
    g = gamma_m(m, dim, infl, r_min, spacing=spacing)
    return -2.0 * kappa * abs(1 + a) ** (2 * m - 2) * a * g


# -- discrete 1D / 2D criteria -------------------------------------------------


def _check_a(a):
    if np.any(np.asarray(a) <= -1):
        raise ContractViolation("hydrostatic stretch requires a > -1")


def seth_hill_1d(m, a):
    """``((1+a)^(2m) - 1)/(2m)``, or ``ln(1+a)`` at ``m = 0``."""
    a = np.asarray(a, dtype=float)
    if abs(m) < LOG_BRANCH:
        return np.log1p(a)
    return np.expm1(2 * m * np.log1p(a)) / (2 * m)


def diag_1d(m, a, N, kappa=1.0, dx=1.0):
    """Interior diagonal entry of the discrete 1D Jacobian, ``S = kappa E``."""
    _check_a(a)
    a = np.asarray(a, dtype=float)
    p2 = sum(1.0 / p**2 for p in range(1, N + 1))
    s = kappa * seth_hill_1d(m, a)
    return (
        -2.0 * (1 + a) ** (2 * m - 2) / (N * dx**2) * p2
        * (kappa * (1 + a) ** (2 * m) / (4 * N) + (2 * m - 1) * s)
    )


def stable_1d(m, a, N):
    """Discrete 1D criterion for a uniform stretch ``x = (1+a) X``."""
    _check_a(a)
    a = np.asarray(a, dtype=float)
    if abs(m) < LOG_BRANCH:
        ok = np.log1p(a) < 1.0 / (4 * N)
    else:
        c = (2 * m - 1) / (2 * m)
        ok = (1.0 / (4 * N) + c) * (1 + a) ** (2 * m) > c
    return bool(ok) if ok.ndim == 0 else ok


@dataclass(frozen=True)
class CriticalStrain:
    """Boundary of the stable range; ``unstable`` is 'below' or 'above' the value."""

    value: float
    unstable: str


def critical_strain_1d(m, N):
    """Critical hydrostatic strain of the discrete 1D criterion, or ``None``."""
    q = 1.0 / (4 * N)
    if abs(m) < LOG_BRANCH:
        return CriticalStrain(math.expm1(q), "above")
    c = (2 * m - 1) / (2 * m)
    if c == 0:
        return None
    ratio = c / (q + c)
    if ratio <= 0:
        return None
    a = ratio ** (1 / (2 * m)) - 1
    h = 1e-6 * (1 + a)
    side = "below" if not stable_1d(m, a - h, N) else "above"
    return CriticalStrain(float(a), side)


def eig_2d_hydro(m, a, N, kappa=1.0, dx=1.0):
    """Eigenvalues (a repeated pair) of the 2D interior diagonal block, closed form."""
    _check_a(a)
    a = np.asarray(a, dtype=float)
    pref = -4 * (4 + np.pi * np.log(N)) / (np.pi**2 * N**2 * dx**2) * kappa
    if abs(m) < LOG_BRANCH:
        lam = pref * (1 + a) ** -2 * bracket_2d(m, a, N)
    else:
        lam = pref * (1 + a) ** (4 * m - 2) * bracket_2d(m, a, N)
    return lam, lam


def bracket_2d(m, a, N):
    a = np.asarray(a, dtype=float)
    if abs(m) < LOG_BRANCH:
        return 1 + 2 * np.pi * N * np.log1p(a)
    return 1 + 2 * np.pi * N * (1 - (1 + a) ** (-2 * m))


def stable_2d(m, a, N):
    """Stable iff the 2D eigenvalues are negative (bracket > 0)."""
    _check_a(a)
    ok = bracket_2d(m, a, N) > 0
    return bool(ok) if np.ndim(ok) == 0 else ok


def critical_strain_2d(m, N):
    q = 1.0 / (2 * np.pi * N)
    if abs(m) < LOG_BRANCH:
        return CriticalStrain(math.expm1(-q), "below")
    a = (1 + q) ** (-1 / (2 * m)) - 1
    return CriticalStrain(float(a), "below" if m > 0 else "above")


# -- lattice sums --------------------------------------------------------------

_PATTERNS = {
    # name: (integrand of (p, q), closed form in ln N)
    "inv_r2": (lambda p, q, r2: 1 / r2, lambda L: 8 + 2 * np.pi * L),
    "x2_r4": (lambda p, q, r2: p**2 / r2**2, lambda L: 4 + np.pi * L),
    "x2y2_r6": (lambda p, q, r2: p**2 * q**2 / r2**3, lambda L: np.pi / 4 * L),
    "x4_r6": (lambda p, q, r2: p**4 / r2**3, lambda L: 4 + 3 * np.pi / 4 * L),
    "x6_r8": (lambda p, q, r2: p**6 / r2**4, lambda L: 4 + 5 * np.pi / 8 * L),
    "x4y2_r8": (lambda p, q, r2: p**4 * q**2 / r2**4, lambda L: np.pi / 8 * L),
}
LATTICE_PATTERNS = tuple(_PATTERNS)


def lattice_sum(pattern, N, b=1.0):
    """``(exact, closed_form)`` of a 2D lattice sum ``sum f(xi) dV`` over ``|xi| <= N dX``.

    Both are dimensionless multiples of the thickness ``b``.
    """
    if pattern not in _PATTERNS:
        raise ContractViolation(f"unknown lattice pattern {pattern!r}")
    f, closed = _PATTERNS[pattern]
    off = mesh.lattice_offsets(2, N).astype(float)
    p, q = off[:, 0], off[:, 1]
    exact = float(np.sum(f(p, q, p * p + q * q)))
    return b * exact, b * float(closed(np.log(N)))


def eq_2ddfs_direct(m, a, N, kappa=1.0, dx=1.0):
    """Discrete 2D hydrostatic diagonal block as printed before the ln N
    approximations, summed exactly over the lattice.

    Uses the continuum ``L^-1`` (prefactors ``1/(pi^2 N^2)`` and ``2/(pi N)``)
    and the tangent ``dS_ij/dE_rs = kappa delta_ij delta_rs``.
    """
    _check_a(a)
    xi = mesh.lattice_offsets(2, N).astype(float) * dx
    r2 = np.einsum("bi,bi->b", xi, xi)
    n = xi / np.sqrt(r2)[:, None]
    trace = 4 * r2 - 2 * r2  # (4 xi_i xi_j - |xi|^2 delta_ij) delta_ij
    E = float(seth_hill_1d(m, a))
    first = -(kappa / (np.pi**2 * N**2)) * (1 + a) ** (4 * m - 2) * np.einsum(
        "b,bk,bl->kl", trace * trace / r2**4, xi, xi
    )
    second = -(2 / (np.pi * N)) * kappa * E * (1 + a) ** (2 * m - 2) * np.einsum(
        "b,bkl->kl", trace / r2**2, 2 * (m - 1) * n[:, :, None] * n[:, None, :] + np.eye(2)
    )
    return first + second


def critical_strain_discrete(dim, m, N, a_lo=-0.5, a_hi=1.0, moduli=None, samples=301):
    """Hydrostatic strain where the interior diagonal block of the discrete
    model first acquires a positive eigenvalue, measured from the analytic
    block on a lattice (not from the closed forms). ``None`` if no sign change."""
    def top(a):
        body, x, c = hydrostatic_body(dim, m, a, N, pad=0)
        return float(np.linalg.eigvalsh(diag_block_analytic(body, x, c, moduli=moduli)).max())

    grid = np.linspace(a_lo, a_hi, samples)
    vals = np.array([top(a) for a in grid])
    i0 = int(np.argmin(np.abs(grid)))
    if vals[i0] > 0:
        return None
    for step in (-1, 1):
        j = i0
        while 0 <= j + step < len(grid) and vals[j + step] <= 0:
            j += step
        if 0 <= j + step < len(grid):
            root = optimize.brentq(top, min(grid[j], grid[j + step]), max(grid[j], grid[j + step]),
                                   xtol=1e-10)
            return CriticalStrain(float(root), "below" if step < 0 else "above")
    return None


# -- Silling's dT.dY test ------------------------------------------------------


def silling_test(body, x, node, dY=None, direction=0, eps=1.0):
    """``dT . dY`` summed over the family of ``node``.

    ``dY`` (``n_bonds_of_node x d``) defaults to a translation of the node
    itself, ``dY = -eps e_direction`` on every bond, for which ``dS = 0``.
    Otherwise ``dS`` is the linearised stress change from ``dY``.
    """
    spec = body.material
    if spec.family != "generalized":
        raise ContractViolation("silling_test is formulated for the generalized model")
    x = np.asarray(x, dtype=float)
    bonds, xi, omega, dv = _family_arrays(body, node)
    Y = x[body.families.neighbors[bonds]] - x[node]
    d = body.dim
    if dY is None:
        dY = np.zeros_like(Y)
        dY[:, direction] = -eps
    dY = np.asarray(dY, dtype=float)
    m = spec.m
    Linv = body.shapes.Linv[node]
    ylen2 = np.einsum("bi,bi->b", Y, Y)
    xlen2 = np.einsum("bi,bi->b", xi, xi)
    lam2 = ylen2 / xlen2
    if np.any(np.sqrt(lam2) < COLLAPSE_RATIO):
        raise CollapsedBond("deformed bond has (nearly) zero length")
    S = body.stress(x)[node]
    ydy = np.einsum("bi,bi->b", Y, dY)
    n = xi / np.sqrt(xlen2)[:, None]
    dEm = np.einsum("b,bi,bj->ij", omega * dv * lam2**m * ydy / ylen2, n, n)
    youngs = body.youngs[node] if spec.law == "hookean" else None
    dS = np.einsum("ijrs,rs->ij", tangent(spec, d, youngs), np.einsum("ijkl,kl->ij", Linv, dEm))
    w = omega * dv * lam2 ** (m - 1) / xlen2
    ps = np.einsum("bp,bq,pqij,ij->b", n, n, Linv, S)
    pds = np.einsum("bp,bq,pqij,ij->b", n, n, Linv, dS)
    dydy = np.einsum("bi,bi->b", dY, dY)
    terms = pds * ydy + ps * (2 * (m - 1) * ydy**2 / ylen2 + dydy)
    return float(np.sum(w * terms))


# -- region maps ---------------------------------------------------------------


@dataclass
class RegionMap:
    """Stable (1) / unstable (0) grid over ``(m, a)``."""

    m: np.ndarray
    a: np.ndarray
    stable: np.ndarray
    dim: int
    N: int

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["m\\a"] + [repr(float(v)) for v in self.a])
            for mi, row in zip(self.m, self.stable):
                w.writerow([repr(float(mi))] + [int(v) for v in row])

    @classmethod
    def from_csv(cls, path, dim, N):
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        a = np.array([float(v) for v in rows[0][1:]])
        m = np.array([float(r[0]) for r in rows[1:]])
        grid = np.array([[int(v) for v in r[1:]] for r in rows[1:]], dtype=bool)
        return cls(m, a, grid, dim, N)

    def boundary(self, m):
        """a-values in row ``m`` where the stability flag changes."""
        row = self.stable[int(np.argmin(np.abs(self.m - m)))]
        idx = np.flatnonzero(row[1:] != row[:-1])
        return 0.5 * (self.a[idx] + self.a[idx + 1])


def region_map(dim, N, m_values, a_values):
    m_values = np.asarray(m_values, dtype=float)
    a_values = np.asarray(a_values, dtype=float)
    if not (np.all(np.isfinite(m_values)) and np.all(np.isfinite(a_values))):
        raise ContractViolation("region map ranges must be finite")
    _check_a(a_values)
    rule = {1: stable_1d, 2: stable_2d}.get(dim)
    if rule is None:
        raise ContractViolation("region maps are defined for dim 1 and 2")
    grid = np.array([np.asarray(rule(m, a_values, N), dtype=bool) for m in m_values])
    return RegionMap(m_values, a_values, grid, dim, N)


def region_map_range(dim, N, m_range, a_range, resolution):
    """Region map on ``resolution = (n_m, n_a)`` evenly spaced samples."""
    nm, na = (resolution, resolution) if np.ndim(resolution) == 0 else resolution
    return region_map(dim, N, np.linspace(*m_range, int(nm)), np.linspace(*a_range, int(na)))


# -- dispersion ----------------------------------------------------------------


def _complex_seth_hill(l2, m):
    if abs(m) < LOG_BRANCH:
        return 0.5 * np.log(l2)
    return (l2**m - 1) / (2 * m)


def dispersion_omega2(k, u0, m, N, dx, E0=1.0, rho0=1.0, full=False):
    """``omega^2`` of a plane wave ``u0 exp(i k X)`` in a discrete 1D bar at ``X = t = 0``.

    The equation of motion is evaluated with complex deformed bonds
    ``Y = xi + u0 e^(ikX) (e^(ik xi) - 1)`` and a Hookean law ``S = E0 E``;
    ``omega^2 = -Re(rhs)/(rho0 u0)``. With ``full=True`` also returns the
    imaginary remainder ``-Im(rhs)/(rho0 u0)``.
    """
    if u0 == 0:
        raise ContractViolation("wave amplitude must be nonzero")
    k = np.atleast_1d(np.asarray(k, dtype=float))
    p = np.concatenate([-np.arange(N, 0, -1), np.arange(1, N + 1)]).astype(float)
    xi = p * dx
    dv = dx
    w0 = 2 * N * dx

    def strain(X):
        Y = xi[None, :] + u0 * np.exp(1j * k[:, None] * X) * (np.exp(1j * k[:, None] * xi) - 1)
        l2 = (Y / xi) ** 2
        if np.any(np.abs(l2) < COLLAPSE_RATIO**2):
            raise CollapsedBond("wave amplitude collapses a bond")
        return E0 / w0 * np.sum(_complex_seth_hill(l2, m) * dv, axis=1), Y

    S0, Y = strain(0.0)
    # stress at each neighbour X = xi
    Sn = np.stack([strain(x)[0] for x in xi], axis=1)
    l2 = (Y / xi) ** 2
    rhs = np.sum((S0[:, None] + Sn) * l2 ** (m - 1) * Y / xi**2 * dv, axis=1) / w0
    omega2 = -rhs.real / (rho0 * u0) + 0.0  # no negative zeros
    if full:
        return omega2, -rhs.imag / (rho0 * u0)
    return omega2


def dispersion_linear(k, N, dx, E0=1.0, rho0=1.0):
    """Small-amplitude limit ``E0 G(k)^2 / rho0``, ``G = sum 2 sin(k xi)/xi dV / omega_0``."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    p = np.arange(1, N + 1) * dx
    G = np.sum(2 * np.sin(k[:, None] * p) / p * dx, axis=1) / (2 * N * dx)
    return E0 * G**2 / rho0


def zero_crossings(k, omega2, rel_tol=1e-9):
    """Interior wavenumbers where ``omega^2`` changes sign or touches zero."""
    k = np.asarray(k)
    w = np.asarray(omega2)
    scale = np.abs(w).max() or 1.0
    out = []
    for i in range(1, len(w) - 1):
        if abs(w[i]) <= rel_tol * scale:
            out.append(float(k[i]))
        elif np.sign(w[i]) != np.sign(w[i + 1]) and abs(w[i + 1]) > rel_tol * scale:
            out.append(float(k[i] - w[i] * (k[i + 1] - k[i]) / (w[i + 1] - w[i])))
    return out


# -- reports -------------------------------------------------------------------


@dataclass
class StabilityReport:
    context: dict
    diag_block: np.ndarray
    eigenvalues: np.ndarray
    criterion_pass: bool
    critical_strain: CriticalStrain = None
    marginal: bool = False
    notes: dict = field(default_factory=dict)


def classify(eigenvalues, scale):
    """``(stable, marginal)`` from the largest eigenvalue and tolerance ``1e-8 scale``."""
    top = float(np.max(np.real(eigenvalues)))
    tol = MARGINAL_TOL * scale
    return top <= tol, abs(top) <= tol


def hydrostatic_body(dim, m, a, N, kappa=1.0, dx=1.0, family="generalized",
                     law="hydrostatic", lam=0.0, mu=0.0, backend=None, pad=2):
    """Uniform grid with a fully interior centre node under ``x = (1+a) X``.

    The centre is at least ``(2 + pad) N`` nodes from every face so its
    two-hop neighbourhood is complete. Returns ``(body, x, centre)``.
    """
    _check_a(a)
    n = 2 * (2 + pad) * N + 1
    nodes = mesh.build_grid(dim, [n * dx] * dim, dx)
    fam = mesh.build_families(nodes, mesh.InfluenceSpec.from_grid(N, dx))
    spec = MaterialSpec(family=family, m=m, law=law, kappa=kappa, lam=lam, mu=mu)
    body = Body(nodes, fam, spec, backend=backend)
    centre = nodes.node_id(*([n // 2] * dim))
    return body, nodes.positions * (1 + a), centre


def analyze_hydrostatic(dim, m, a, N, kappa=1.0, dx=1.0):
    """Discrete-criterion report for a hydrostatic state (closed forms)."""
    ctx = {"model": "generalized", "m": m, "dim": dim, "N": N, "a": a}
    if dim == 1:
        diag = np.array([[float(diag_1d(m, a, N, kappa, dx))]])
        eig = np.diag(diag)
        crit = critical_strain_1d(m, N)
        rule = stable_1d(m, a, N)
    elif dim == 2:
        lam = float(eig_2d_hydro(m, a, N, kappa, dx)[0])
        diag = lam * np.eye(2)
        eig = np.array([lam, lam])
        crit = critical_strain_2d(m, N)
        rule = stable_2d(m, a, N)
    else:
        raise ContractViolation("closed-form reports exist for dim 1 and 2")
    ok, marginal = classify(eig, kappa / dx**2)
    return StabilityReport(ctx, diag, eig, bool(rule), crit, marginal, {"eigen_stable": ok})
