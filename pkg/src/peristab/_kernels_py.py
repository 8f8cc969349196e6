"""Pure numpy bond kernels.

Same signatures and semantics as the compiled ``_kernels`` module; used when
the extension is not built or ``PERISTAB_BACKEND=python`` is set.
"""

import numpy as np

COLLAPSE_RATIO = 1e-10
LOG_BRANCH = 1e-9


def _scatter_add(out, index, values):
    n = out.shape[0]
    flat = values.reshape(values.shape[0], -1)
    acc = out.reshape(n, -1)
    for c in range(flat.shape[1]):
        acc[:, c] += np.bincount(index, weights=flat[:, c], minlength=n)


def _stretch(owner, nbr, length, x):
    y = x[nbr] - x[owner]
    ylen = np.sqrt(np.einsum("bi,bi->b", y, y))
    lam = ylen / length
    bad = np.flatnonzero(lam < COLLAPSE_RATIO)
    return y, ylen, lam, (int(bad[0]) if bad.size else -1)


def seth_hill_scalar(lam, m):
    if abs(m) < LOG_BRANCH:
        return np.log(lam)
    return np.expm1(2.0 * m * np.log(lam)) / (2.0 * m)


def strain_sum(owner, nbr, xi, length, wvol, x, m, out):
    _, _, lam, bad = _stretch(owner, nbr, length, x)
    if bad >= 0:
        return bad
    c = wvol * seth_hill_scalar(lam, m) / (length * length)
    _scatter_add(out, owner, c[:, None, None] * xi[:, :, None] * xi[:, None, :])
    return -1


def defgrad_sum(owner, nbr, xi, wvol, x, out):
    y = x[nbr] - x[owner]
    _scatter_add(out, owner, wvol[:, None, None] * y[:, :, None] * xi[:, None, :])


def generalized_force(owner, nbr, xi, length, omega, vol, x, P, m, out):
    y, _, lam, bad = _stretch(owner, nbr, length, x)
    if bad >= 0:
        return bad
    proj = np.einsum("bi,bij,bj->b", xi, P[owner], xi)
    l2 = length * length
    coef = omega * proj * lam ** (2.0 * m - 2.0) / (l2 * l2)
    t = coef[:, None] * y
    _scatter_add(out, owner, t * vol[nbr][:, None])
    _scatter_add(out, nbr, -t * vol[owner][:, None])
    return -1


def silling_force(owner, nbr, xi, omega, vol, Q, out):
    t = omega[:, None] * np.einsum("bij,bj->bi", Q[owner], xi)
    _scatter_add(out, owner, t * vol[nbr][:, None])
    _scatter_add(out, nbr, -t * vol[owner][:, None])
