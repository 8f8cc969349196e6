# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled bond kernels; see ``_kernels_py`` for the reference semantics."""

from libc.math cimport sqrt, log, expm1, pow, fabs

cdef double COLLAPSE_RATIO = 1e-10
cdef double LOG_BRANCH = 1e-9


cdef inline double _seth_hill(double lam, double m) nogil:
    if fabs(m) < LOG_BRANCH:
        return log(lam)
    return expm1(2.0 * m * log(lam)) / (2.0 * m)


def strain_sum(const long[::1] owner, const long[::1] nbr, const double[:, ::1] xi,
               const double[::1] length, const double[::1] wvol, const double[:, ::1] x,
               double m, double[:, :, ::1] out):
    cdef Py_ssize_t nb = owner.shape[0]
    cdef Py_ssize_t d = xi.shape[1]
    cdef Py_ssize_t b, i, j, k, a
    cdef double y, ylen2, lam, c, l
    cdef long bad = -1
    with nogil:
        for b in range(nb):
            i = owner[b]
            j = nbr[b]
            ylen2 = 0.0
            for k in range(d):
                y = x[j, k] - x[i, k]
                ylen2 = ylen2 + y * y
            l = length[b]
            lam = sqrt(ylen2) / l
            if lam < COLLAPSE_RATIO:
                bad = b
                break
            c = wvol[b] * _seth_hill(lam, m) / (l * l)
            for k in range(d):
                for a in range(d):
                    out[i, k, a] += c * xi[b, k] * xi[b, a]
    return bad


def defgrad_sum(const long[::1] owner, const long[::1] nbr, const double[:, ::1] xi,
                const double[::1] wvol, const double[:, ::1] x, double[:, :, ::1] out):
    cdef Py_ssize_t nb = owner.shape[0]
    cdef Py_ssize_t d = xi.shape[1]
    cdef Py_ssize_t b, i, j, k, a
    cdef double y
    with nogil:
        for b in range(nb):
            i = owner[b]
            j = nbr[b]
            for k in range(d):
                y = wvol[b] * (x[j, k] - x[i, k])
                for a in range(d):
                    out[i, k, a] += y * xi[b, a]


def generalized_force(const long[::1] owner, const long[::1] nbr, const double[:, ::1] xi,
                      const double[::1] length, const double[::1] omega,
                      const double[::1] vol, const double[:, ::1] x,
                      const double[:, :, ::1] P, double m, double[:, ::1] out):
    cdef Py_ssize_t nb = owner.shape[0]
    cdef Py_ssize_t d = xi.shape[1]
    cdef Py_ssize_t b, i, j, k, a
    cdef double y[3]
    cdef double ylen2, lam, proj, l2, coef, vi, vj
    cdef long bad = -1
    with nogil:
        for b in range(nb):
            i = owner[b]
            j = nbr[b]
            ylen2 = 0.0
            for k in range(d):
                y[k] = x[j, k] - x[i, k]
                ylen2 = ylen2 + y[k] * y[k]
            l2 = length[b] * length[b]
            lam = sqrt(ylen2 / l2)
            if lam < COLLAPSE_RATIO:
                bad = b
                break
            proj = 0.0
            for k in range(d):
                for a in range(d):
                    proj = proj + xi[b, k] * P[i, k, a] * xi[b, a]
            coef = omega[b] * proj * pow(lam, 2.0 * m - 2.0) / (l2 * l2)
            vi = vol[i]
            vj = vol[j]
            for k in range(d):
                out[i, k] += coef * y[k] * vj
                out[j, k] -= coef * y[k] * vi
    return bad


def silling_force(const long[::1] owner, const long[::1] nbr, const double[:, ::1] xi,
                  const double[::1] omega, const double[::1] vol,
                  const double[:, :, ::1] Q, double[:, ::1] out):
    cdef Py_ssize_t nb = owner.shape[0]
    cdef Py_ssize_t d = xi.shape[1]
    cdef Py_ssize_t b, i, j, k, a
    cdef double t
    with nogil:
        for b in range(nb):
            i = owner[b]
            j = nbr[b]
            for k in range(d):
                t = 0.0
                for a in range(d):
                    t = t + Q[i, k, a] * xi[b, a]
                t = t * omega[b]
                out[i, k] += t * vol[j]
                out[j, k] -= t * vol[i]
