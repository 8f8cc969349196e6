"""Small dense tensors in one, two or three dimensions.

Second-order tensors are ``(..., d, d)`` arrays and fourth-order tensors are
``(..., d, d, d, d)`` arrays; leading axes batch over nodes. Fourth-order
tensors with minor symmetries are mapped to ``s x s`` matrices, ``s =
d(d+1)/2``, using the orthonormal Mandel basis so that matrix inversion in that
basis is inversion on the space of symmetric second-order tensors.
"""

import itertools
from functools import lru_cache

import numpy as np

from .errors import ContractViolation, SingularShapeTensor

COND_CAP = 1e12
SQRT2 = np.sqrt(2.0)


@lru_cache(maxsize=None)
def mandel_pairs(dim):
    """Index pairs ordered as in the Mandel vector for dimension ``dim``."""
    if dim == 1:
        return ((0, 0),)
    if dim == 2:
        return ((0, 0), (1, 1), (0, 1))
    if dim == 3:
        return ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
    raise ContractViolation(f"dimension must be 1, 2 or 3, got {dim}")


@lru_cache(maxsize=None)
def _mandel_tables(dim):
    pairs = mandel_pairs(dim)
    rows = np.array([p[0] for p in pairs])
    cols = np.array([p[1] for p in pairs])
    weights = np.array([1.0 if i == j else SQRT2 for i, j in pairs])
    # position of every (i, j) in the Mandel vector
    slot = np.empty((dim, dim), dtype=int)
    for a, (i, j) in enumerate(pairs):
        slot[i, j] = slot[j, i] = a
    return rows, cols, weights, slot


def _dim_of(a, order):
    d = a.shape[-1]
    if a.ndim < order or any(s != d for s in a.shape[-order:]):
        raise ContractViolation(f"expected a tensor of order {order}, got shape {a.shape}")
    if d not in (1, 2, 3):
        raise ContractViolation(f"dimension must be 1, 2 or 3, got {d}")
    return d


def identity2(dim):
    return np.eye(dim)


def identity4_sym(dim):
    """Identity on symmetric second-order tensors, 1/2 (d_ik d_jl + d_il d_jk)."""
    e = np.eye(dim)
    return 0.5 * (np.einsum("ik,jl->ijkl", e, e) + np.einsum("il,jk->ijkl", e, e))


def to_mandel2(a):
    d = _dim_of(a, 2)
    rows, cols, w, _ = _mandel_tables(d)
    return a[..., rows, cols] * w


def from_mandel2(v):
    s = v.shape[-1]
    d = {1: 1, 3: 2, 6: 3}[s]
    _, _, w, slot = _mandel_tables(d)
    return (v / w)[..., slot]


def to_mandel4(a):
    d = _dim_of(a, 4)
    rows, cols, w, _ = _mandel_tables(d)
    m = a[..., rows[:, None], cols[:, None], rows[None, :], cols[None, :]]
    return m * np.outer(w, w)


def from_mandel4(m):
    s = m.shape[-1]
    d = {1: 1, 3: 2, 6: 3}[s]
    _, _, w, slot = _mandel_tables(d)
    scaled = m / np.outer(w, w)
    return scaled[..., slot[:, :, None, None], slot[None, None, :, :]]


def is_symmetric(a, rtol=1e-12):
    scale = max(np.max(np.abs(a), initial=0.0), 1e-300)
    return np.max(np.abs(a - np.swapaxes(a, -1, -2)), initial=0.0) <= rtol * scale


def double_contract(a, b):
    """``(A : B)_ij = A_ijkl B_kl`` for a fourth-order A and symmetric B."""
    d4 = _dim_of(a, 4)
    d2 = _dim_of(b, 2)
    if d4 != d2:
        raise ContractViolation(f"dimension mismatch: {d4} vs {d2}")
    if not is_symmetric(b):
        raise ContractViolation("second operand must be symmetric")
    return np.einsum("...ijkl,...kl->...ij", a, b)


def invert_sym4(a, cond_cap=COND_CAP):
    """Inverse of a fourth-order tensor on the symmetric second-order space.

    Raises SingularShapeTensor when the Mandel matrix (of any batch member) has
    a condition number above ``cond_cap``.
    """
    _dim_of(a, 4)
    m = to_mandel4(a)
    return from_mandel4(invert_mandel(m, cond_cap))


def invert_mandel(m, cond_cap=COND_CAP):
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(m)
    bad = ~np.isfinite(cond) | (cond > cond_cap)
    if np.any(bad):
        worst = np.max(np.where(np.isfinite(cond), cond, np.inf))
        raise SingularShapeTensor(
            f"shape tensor condition number {worst:.3e} exceeds cap {cond_cap:.1e}"
        )
    return np.linalg.inv(m)


def kdelta(i, j):
    return 1 if i == j else 0


def gamma6(i, j, k, l, r, s):
    """Sixth-order Kronecker combination used by the 2D lattice reduction.

    Each term pairs a four-fold coincidence with a two-fold one and excludes
    the all-equal case, so the sum over the six 2D index patterns picks the
    ``x1^4 x2^2``-type lattice moments.
    """
    d = kdelta
    return (
        d(i, j) * d(j, k) * d(k, l) * d(r, s) * (1 - d(i, s))
        + d(i, j) * d(j, k) * d(k, r) * d(l, s) * (1 - d(i, s))
        + d(i, j) * d(j, l) * d(l, r) * d(k, s) * (1 - d(i, s))
        + d(i, k) * d(k, l) * d(l, r) * d(j, s) * (1 - d(i, s))
        + d(j, k) * d(k, l) * d(l, r) * d(i, s) * (1 - d(i, j))
        + d(i, j) * d(j, k) * d(k, s) * d(l, r) * (1 - d(i, r))
        + d(i, j) * d(j, l) * d(l, s) * d(k, r) * (1 - d(i, r))
        + d(i, k) * d(k, l) * d(l, s) * d(j, r) * (1 - d(i, r))
        + d(j, k) * d(k, l) * d(l, s) * d(i, r) * (1 - d(i, j))
        + d(i, j) * d(j, r) * d(r, s) * d(k, l) * (1 - d(i, l))
        + d(i, k) * d(k, r) * d(r, s) * d(j, l) * (1 - d(i, l))
        + d(j, k) * d(k, r) * d(r, s) * d(i, l) * (1 - d(i, j))
        + d(i, l) * d(l, r) * d(r, s) * d(j, k) * (1 - d(i, k))
        + d(j, l) * d(l, r) * d(r, s) * d(i, k) * (1 - d(i, j))
        + d(k, l) * d(l, r) * d(r, s) * d(i, j) * (1 - d(i, s))
    )


@lru_cache(maxsize=None)
def gamma6_array(dim):
    g = np.zeros((dim,) * 6)
    for idx in itertools.product(range(dim), repeat=6):
        g[idx] = gamma6(*idx)
    g.setflags(write=False)
    return g


def isotropic4(dim, a, b):
    """``a d_ij d_kl + b (d_ik d_jl + d_il d_jk)``."""
    e = np.eye(dim)
    return a * np.einsum("ij,kl->ijkl", e, e) + b * (
        np.einsum("ik,jl->ijkl", e, e) + np.einsum("il,jk->ijkl", e, e)
    )
