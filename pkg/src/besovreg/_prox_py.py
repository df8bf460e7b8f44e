"""Pure numpy prox kernel, used when the compiled extension is unavailable."""

import math

import numpy as np


def prox_scalar(m, y, c, q, rtol=1e-12, max_iter=200):
    a, b = abs(m), abs(y)
    if a == 0.0 or b == 0.0:
        return 0.0
    sgn = math.copysign(1.0, m) * math.copysign(1.0, y)
    if q == 2.0:
        return sgn * b / (a + c / a)
    beta = b / a
    # divide twice so tiny |m| overflows kappa to inf instead of underflowing a*a to 0
    kappa = c * q / (2.0 * a) / a
    if q == 1.0:
        num = b - c / (2.0 * a)
        return sgn * (num / a) if num > 0.0 else 0.0
    # (beta / kappa) written so that neither factor is inf / inf
    ratio = (a / c) * (2.0 * b / q)
    try:
        alt = ratio ** (1.0 / (q - 1.0))
    except OverflowError:
        alt = math.inf
    lo, hi = 0.0, (alt if alt < beta else beta)
    tau = hi
    if not 0.0 < tau < math.inf:
        # zero, or a minimiser beyond the double range
        return sgn * tau if tau > 0.0 else 0.0
    for _ in range(max_iter):
        tq = tau ** (q - 1.0)
        g = tau - beta + kappa * tq
        if g > 0.0:
            hi = tau
        elif g < 0.0:
            lo = tau
        else:
            # exact root, or nan once beta and kappa both overflow
            break
        step = g / (1.0 + kappa * (q - 1.0) * tq / tau)
        # converged Newton steps may touch the bracket; accept before safeguarding
        if abs(step) <= rtol * tau:
            nxt = tau - step
            if lo <= nxt <= hi:
                tau = nxt
            break
        nxt = tau - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        tau = nxt
        if hi - lo <= rtol * hi or tau == 0.0:
            break
    return sgn * tau


def prox_batch(m, y, c, q, rtol=1e-12, max_iter=200):
    """Vectorised safeguarded Newton; same iteration as the compiled kernel."""
    m, y, c = np.broadcast_arrays(
        np.asarray(m, dtype=float), np.asarray(y, dtype=float), np.asarray(c, dtype=float)
    )
    shape = m.shape
    m, y, c = m.ravel(), y.ravel(), c.ravel()
    a, b = np.abs(m), np.abs(y)
    out = np.zeros(m.size)
    live = (a != 0.0) & (b != 0.0)
    if not live.any():
        return out.reshape(shape)
    sgn = np.sign(m) * np.sign(y)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        safe_a = np.where(live, a, 1.0)
        if q == 2.0:
            out[live] = (sgn * b / (safe_a + c / safe_a))[live]
            return out.reshape(shape)
        beta = np.where(live, b / safe_a, 0.0)
        kappa = c * q / (2.0 * safe_a) / safe_a
        if q == 1.0:
            num = b - c / (2.0 * safe_a)
            out[live] = np.where(num > 0.0, sgn * (num / safe_a), 0.0)[live]
            return out.reshape(shape)
        ratio = (safe_a / c) * (2.0 * b / q)
        alt = ratio ** (1.0 / (q - 1.0))
        hi = np.where(alt < beta, alt, beta)
        hi[~live] = 0.0
        lo = np.zeros_like(hi)
        tau = hi.copy()
        idx = np.flatnonzero((tau > 0.0) & (tau < np.inf))
        for _ in range(max_iter):
            if idx.size == 0:
                break
            t, bt, kp = tau[idx], beta[idx], kappa[idx]
            tq = t ** (q - 1.0)
            g = t - bt + kp * tq
            hi[idx] = np.where(g > 0.0, t, hi[idx])
            lo[idx] = np.where(g < 0.0, t, lo[idx])
            l, h = lo[idx], hi[idx]
            step = g / (1.0 + kp * (q - 1.0) * tq / t)
            raw = t - step
            small = np.abs(step) <= rtol * t
            nxt = np.where((l < raw) & (raw < h), raw, 0.5 * (l + h))
            nxt = np.where(small, np.where((l <= raw) & (raw <= h), raw, t), nxt)
            # exact root, or nan once beta and kappa both overflow
            stuck = ~((g > 0.0) | (g < 0.0))
            nxt = np.where(stuck, t, nxt)
            tau[idx] = nxt
            done = stuck | small | (h - l <= rtol * h) | (nxt == 0.0)
            idx = idx[~done]
    out[live] = (sgn * tau)[live]
    return out.reshape(shape)
