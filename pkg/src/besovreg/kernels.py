"""Backend selection for the per-coefficient prox kernel.

The compiled extension ``besovreg._prox`` is used when it imports; setting
``BESOVREG_PURE_PYTHON=1`` forces the numpy fallback.
"""

import os

from . import _prox_py

_BACKENDS = {"python": _prox_py}

try:
    if os.environ.get("BESOVREG_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend requested")
    from . import _prox as _prox_c
except ImportError:
    BACKEND = "python"
else:
    _BACKENDS["cython"] = _prox_c
    BACKEND = "cython"


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def _module(backend):
    name = backend or BACKEND
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


def prox_batch(m, y, c, q, rtol=1e-12, max_iter=200, backend=None):
    """Elementwise ``argmin_t (m t - y)**2 + c |t|**q`` for ``1 <= q <= 2``."""
    return _module(backend).prox_batch(m, y, c, float(q), rtol, max_iter)


def prox_scalar(m, y, c, q, rtol=1e-12, max_iter=200, backend=None):
    return float(_module(backend).prox_scalar(float(m), float(y), float(c), float(q), rtol, max_iter))
