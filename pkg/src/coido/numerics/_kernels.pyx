# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernel: cyclic Jacobi sweeps for dense symmetric matrices.

The rotation schedule and every arithmetic expression mirror the numpy
fallback in ``_pure.py`` term by term, so both backends produce
bit-identical spectra (the extension is compiled with -ffp-contract=off).
"""

from libc.math cimport fabs, sqrt

import numpy as np

cimport numpy as cnp

cnp.import_array()


def jacobi_sweeps(cnp.ndarray[cnp.float64_t, ndim=2] a not None,
                  cnp.ndarray[cnp.float64_t, ndim=2] vt not None,
                  int max_sweeps):
    """Run cyclic Jacobi sweeps in place on ``a``; accumulate rotations in ``vt``.

    ``vt`` holds eigenvector candidates as rows. Returns the number of sweeps
    used, or -1 if the sweep cap was exhausted before convergence.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef double[:, ::1] A = a
    cdef double[:, ::1] V = vt
    cdef Py_ssize_t p, q, i
    cdef int sweep
    cdef double apq, app, aqq, theta, t, c, s, tau, g, h, small
    cdef bint converged

    if n == 1:
        return 0

    # Rotations maintain only the upper triangle; the lower triangle is left
    # stale. Callers read eigenvalues from the diagonal and vectors from vt.
    for sweep in range(max_sweeps):
        converged = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                app = A[p, p]
                aqq = A[q, q]
                small = 1e-15 * (fabs(app) + fabs(aqq))
                if fabs(apq) <= small:
                    A[p, q] = 0.0
                    continue
                converged = False
                theta = (aqq - app) / (2.0 * apq)
                if theta * theta + 1.0 == theta * theta:
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + sqrt(theta * theta + 1.0))
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                for i in range(p):
                    g = A[i, p]
                    h = A[i, q]
                    A[i, p] = g - s * (h + g * tau)
                    A[i, q] = h + s * (g - h * tau)
                for i in range(p + 1, q):
                    g = A[p, i]
                    h = A[i, q]
                    A[p, i] = g - s * (h + g * tau)
                    A[i, q] = h + s * (g - h * tau)
                for i in range(q + 1, n):
                    g = A[p, i]
                    h = A[q, i]
                    A[p, i] = g - s * (h + g * tau)
                    A[q, i] = h + s * (g - h * tau)
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                for i in range(n):
                    g = V[p, i]
                    h = V[q, i]
                    V[p, i] = g - s * (h + g * tau)
                    V[q, i] = h + s * (g - h * tau)
        if converged:
            return sweep
    return -1
