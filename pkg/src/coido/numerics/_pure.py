"""Numpy fallback for the compiled Jacobi kernel.

Slower (one Python-level loop iteration per rotation) but arithmetically
identical to ``_kernels.pyx``: same pivot schedule, same scalar formulas,
same elementwise row updates, so both backends agree bit for bit.
"""

from __future__ import annotations

import math

import numpy as np


def jacobi_sweeps(a: np.ndarray, vt: np.ndarray, max_sweeps: int) -> int:
    """Run cyclic Jacobi sweeps in place on ``a``; accumulate rotations in ``vt``.

    Returns the number of sweeps used, or -1 if the cap was exhausted.
    """
    n = a.shape[0]
    if n == 1:
        return 0

    for sweep in range(max_sweeps):
        converged = True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                app = a[p, p]
                aqq = a[q, q]
                small = 1e-15 * (abs(app) + abs(aqq))
                if abs(apq) <= small:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                converged = False
                theta = (aqq - app) / (2.0 * apq)
                if theta * theta + 1.0 == theta * theta:
                    t = 1.0 / (2.0 * theta)
                elif theta >= 0.0:
                    t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                gp = a[p, :].copy()
                gq = a[q, :].copy()
                new_p = gp - s * (gq + gp * tau)
                new_q = gq + s * (gp - gq * tau)
                a[p, :] = new_p
                a[q, :] = new_q
                a[:, p] = new_p
                a[:, q] = new_q
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = vt[p, :].copy()
                vq = vt[q, :].copy()
                vt[p, :] = vp - s * (vq + vp * tau)
                vt[q, :] = vq + s * (vp - vq * tau)
        if converged:
            return sweep
    return -1
