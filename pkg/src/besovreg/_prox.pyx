# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-coefficient prox kernel.

Solves ``argmin_t (m t - y)**2 + c |t|**q`` elementwise. Mirrors the numpy
implementation in ``_prox_py`` step for step.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, copysign, fabs, pow

cnp.import_array()


cdef double _prox_one(double m, double y, double c, double q,
                      double rtol, int max_iter) noexcept nogil:
    cdef double a = fabs(m), b = fabs(y)
    cdef double beta, kappa, tau, lo, hi, g, dg, step, nxt, alt, sgn, tq, num
    cdef int it
    if a == 0.0 or b == 0.0:
        return 0.0
    sgn = copysign(1.0, m) * copysign(1.0, y)
    if q == 2.0:
        return sgn * b / (a + c / a)
    beta = b / a
    # divide twice so tiny |m| overflows kappa to inf instead of underflowing a*a to 0
    kappa = c * q / (2.0 * a) / a
    if q == 1.0:
        num = b - c / (2.0 * a)
        return sgn * (num / a) if num > 0.0 else 0.0
    # (beta / kappa) written so that neither factor is inf / inf
    alt = pow((a / c) * (2.0 * b / q), 1.0 / (q - 1.0))
    hi = alt if alt < beta else beta
    lo = 0.0
    tau = hi
    if not (0.0 < tau < INFINITY):
        # zero, or a minimiser beyond the double range
        return sgn * tau if tau > 0.0 else 0.0
    for it in range(max_iter):
        tq = pow(tau, q - 1.0)
        g = tau - beta + kappa * tq
        if g > 0.0:
            hi = tau
        elif g < 0.0:
            lo = tau
        else:
            # exact root, or nan once beta and kappa both overflow
            break
        dg = 1.0 + kappa * (q - 1.0) * tq / tau
        step = g / dg
        # converged Newton steps may touch the bracket; accept before safeguarding
        if fabs(step) <= rtol * tau:
            nxt = tau - step
            if lo <= nxt <= hi:
                tau = nxt
            break
        nxt = tau - step
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        tau = nxt
        if hi - lo <= rtol * hi or tau == 0.0:
            break
    return sgn * tau


def prox_scalar(double m, double y, double c, double q,
                double rtol=1e-12, int max_iter=200):
    return _prox_one(m, y, c, q, rtol, max_iter)


def prox_batch(m, y, c, double q, double rtol=1e-12, int max_iter=200):
    """Elementwise minimiser of ``(m t - y)**2 + c |t|**q``; arrays broadcast."""
    mb, yb, cb = np.broadcast_arrays(
        np.asarray(m, dtype=np.float64),
        np.asarray(y, dtype=np.float64),
        np.asarray(c, dtype=np.float64),
    )
    shape = mb.shape
    cdef const double[::1] mv = np.ascontiguousarray(mb).ravel()
    cdef const double[::1] yv = np.ascontiguousarray(yb).ravel()
    cdef const double[::1] cv = np.ascontiguousarray(cb).ravel()
    cdef Py_ssize_t n = mv.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        for i in range(n):
            ov[i] = _prox_one(mv[i], yv[i], cv[i], q, rtol, max_iter)
    return out.reshape(shape)
