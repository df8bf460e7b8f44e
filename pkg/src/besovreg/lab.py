"""Synthetic inverse problems in the sequence model.

Provides the diagonal smoothing operator ``mu_j = 2**(-eta j)``, a dense
matrix operator for non-diagonal tests, sources of prescribed Besov
smoothness and noise calibrated to an exact L2 level.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .spaces import BesovSpace, CoefField, field_size, level_exponent, level_of_flat

__all__ = [
    "LinearOperator",
    "DiagonalScaleOperator",
    "MatrixOperator",
    "NoisyData",
    "make_source",
    "add_noise",
    "noise_rng",
]


class LinearOperator(Protocol):
    """What the general solver needs from an operator."""

    max_level: int

    def apply(self, u: CoefField) -> CoefField: ...

    def apply_adjoint(self, v: CoefField) -> CoefField: ...

    def norm_bound(self) -> float: ...


def _check_level(u: CoefField, max_level: int) -> None:
    if u.max_level > max_level:
        raise ValueError(f"field level {u.max_level} exceeds operator max_level {max_level}")


@dataclass(frozen=True)
class DiagonalScaleOperator:
    """Smoothing of order ``eta``: ``(F u)_lambda = 2**(-eta |lambda|) u_lambda``.

    Self-adjoint for the plain coefficient inner product.
    """

    eta: float
    max_level: int

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError(f"smoothing order must be nonnegative, got eta={self.eta}")
        if self.max_level < 0:
            raise ValueError("max_level must be nonnegative")

    @property
    def multipliers(self) -> np.ndarray:
        """Per-level multipliers ``mu_j`` for ``j = 0..max_level``."""
        return np.exp2(-float(self.eta) * np.arange(self.max_level + 1))

    def flat_multipliers(self, max_level: int | None = None) -> np.ndarray:
        J = self.max_level if max_level is None else max_level
        return np.exp2(-float(self.eta) * level_of_flat(J))

    def apply(self, u: CoefField) -> CoefField:
        _check_level(u, self.max_level)
        return u.with_values(self.flat_multipliers(u.max_level) * u.values)

    apply_adjoint = apply

    def norm_bound(self) -> float:
        return 1.0


class MatrixOperator:
    """Dense operator acting on the flat coefficient vector."""

    def __init__(self, matrix, max_level: int):
        matrix = np.asarray(matrix, dtype=float)
        n = field_size(max_level)
        if matrix.shape != (n, n):
            raise ValueError(f"matrix must be {n}x{n} for max_level={max_level}")
        self.matrix = matrix
        self.max_level = max_level
        self._norm = None

    @classmethod
    def from_diagonal(cls, op: DiagonalScaleOperator) -> "MatrixOperator":
        return cls(np.diag(op.flat_multipliers()), op.max_level)

    def apply(self, u: CoefField) -> CoefField:
        _check_level(u, self.max_level)
        return CoefField(self.max_level, self.matrix @ u.extend(self.max_level).values)

    def apply_adjoint(self, v: CoefField) -> CoefField:
        _check_level(v, self.max_level)
        return CoefField(self.max_level, self.matrix.T @ v.extend(self.max_level).values)

    def norm_bound(self) -> float:
        if self._norm is None:
            self._norm = float(np.linalg.norm(self.matrix, 2))
        return self._norm


def make_source(
    space: BesovSpace, max_level: int, margin: float = 0.1, seed: int = 42
) -> CoefField:
    """Pseudo-random field with finite ``space`` norm uniformly in ``max_level``.

    ``|u_lambda| = 2**(-(s + d(1/2 - 1/p)) j) * 2**(-(d/p + margin) j) * r``
    with ``r`` uniform on ``[1/2, 1]`` and random sign, so level ``j``
    contributes about ``2**(-p * margin * j)`` to ``||u||^p``.
    """
    if space.p < 1:
        raise ValueError("source space needs p >= 1")
    if space.d != 1:
        raise ValueError("coefficient fields are one-dimensional")
    if margin <= 0:
        raise ValueError("margin must be positive")
    rng = np.random.default_rng(seed)
    n = field_size(max_level)
    r = rng.uniform(0.5, 1.0, n)
    signs = rng.choice((-1.0, 1.0), n)
    j = level_of_flat(max_level)
    decay = level_exponent(space) + space.d / float(space.p) + margin
    return CoefField(max_level, signs * r * np.exp2(-decay * j))


def noise_rng(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for grid point ``index`` of an experiment seeded ``seed``."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


@dataclass(frozen=True)
class NoisyData:
    clean: CoefField
    noisy: CoefField
    delta: float
    seed: int
    index: int = 0

    def sidecar(self) -> str:
        return json.dumps({"delta": self.delta, "seed": self.seed, "index": self.index})


def add_noise(v: CoefField, delta: float, seed: int, index: int = 0) -> NoisyData:
    """Add Gaussian-direction noise rescaled to L2 norm exactly ``delta``."""
    if delta < 0:
        raise ValueError("noise level must be nonnegative")
    if delta == 0:
        return NoisyData(v, v, 0.0, seed, index)
    direction = noise_rng(seed, index).standard_normal(v.values.size)
    noise = direction * (delta / np.linalg.norm(direction))
    return NoisyData(v, v.with_values(v.values + noise), float(delta), seed, index)
