"""Besov-scale calculus in the wavelet sequence model.

A function is represented by its dyadic wavelet coefficients, and the Besov
norm of :math:`B^s_{p,p}` is taken to be the weighted sequence norm

.. math::
    \\|u\\|_{B^s_p}^p = \\sum_\\lambda 2^{p(s + d(1/2 - 1/p))|\\lambda|} |u_\\lambda|^p

with equivalence constants fixed to one.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "TOL",
    "BesovSpace",
    "DyadicIndex",
    "CoefField",
    "level_weight",
    "level_exponent",
    "besov_norm",
    "sobolev_norm",
    "differential_dimension",
    "embeds",
    "same_space",
    "dual_space",
    "devore_diagram_data",
    "devore_csv",
]

#: absolute tolerance for equality and strictness checks on floats
TOL = 1e-12


def _exact(*values) -> bool:
    return all(isinstance(v, Rational) for v in values)


def strictly_greater(a, b) -> bool:
    """``a > b``; exact for rationals, otherwise with margin :data:`TOL`."""
    if _exact(a, b):
        return a > b
    return float(a) - float(b) > TOL


def at_most(a, b) -> bool:
    """``a <= b``; exact for rationals, otherwise up to :data:`TOL`."""
    if _exact(a, b):
        return a <= b
    return float(a) - float(b) <= TOL


def nearly_equal(a, b) -> bool:
    if _exact(a, b):
        return a == b
    return abs(float(a) - float(b)) <= TOL


@dataclass(frozen=True)
class BesovSpace:
    """A point ``(s, p, d)`` of the Besov scale :math:`B^s_{p,p}(\\mathbb{R}^d)`.

    ``s`` and ``p`` may be ints, :class:`fractions.Fraction` or floats.
    Rational inputs keep all downstream planner arithmetic exact.
    """

    s: float
    p: float
    d: int = 1

    def __post_init__(self):
        if not self.p > 0:
            raise ValueError(f"integrability index must be positive, got p={self.p}")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got d={self.d}")

    @property
    def ddim(self):
        return differential_dimension(self)

    @property
    def inv_p(self):
        return 1 / Fraction(self.p) if isinstance(self.p, Rational) else 1.0 / self.p

    def __str__(self) -> str:
        return f"B^{{{_fmt(self.s)}}}_{{{_fmt(self.p)}}}(d={self.d})"


def _fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    return f"{x:g}"


@dataclass(frozen=True, order=True)
class DyadicIndex:
    """Wavelet index :math:`\\lambda = (j, k)` with ``0 <= k < 2**j``."""

    level: int
    position: int

    def __post_init__(self):
        if self.level < 0:
            raise ValueError(f"negative level {self.level}")
        if not 0 <= self.position < 2**self.level:
            raise ValueError(
                f"position {self.position} out of range for level {self.level}"
            )

    @property
    def flat(self) -> int:
        return (1 << self.level) - 1 + self.position


def field_size(max_level: int) -> int:
    return (1 << (max_level + 1)) - 1


def level_of_flat(max_level: int) -> np.ndarray:
    """Level ``j`` of every slot in a flat level-major coefficient array."""
    return np.repeat(np.arange(max_level + 1), 1 << np.arange(max_level + 1))


class CoefField:
    """Finite dyadic coefficient field on levels ``0..max_level`` (d = 1).

    Coefficients are stored densely, level-major: level ``j`` occupies the
    slots ``2**j - 1 .. 2**(j+1) - 2``. Missing coefficients are zero.
    """

    __slots__ = ("max_level", "values")

    def __init__(self, max_level: int, values=None):
        if max_level < 0:
            raise ValueError(f"max_level must be nonnegative, got {max_level}")
        n = field_size(max_level)
        if values is None:
            arr = np.zeros(n)
        else:
            arr = np.array(values, dtype=float)
            if arr.shape != (n,):
                raise ValueError(
                    f"expected {n} coefficients for max_level={max_level}, got {arr.shape}"
                )
            if not np.all(np.isfinite(arr)):
                raise ValueError("coefficients must be finite")
        arr.setflags(write=False)
        self.max_level = int(max_level)
        self.values = arr

    @classmethod
    def zeros(cls, max_level: int) -> "CoefField":
        return cls(max_level)

    @classmethod
    def from_mapping(
        cls, max_level: int, coefficients: Mapping[tuple[int, int] | DyadicIndex, float]
    ) -> "CoefField":
        arr = np.zeros(field_size(max_level))
        for key, value in coefficients.items():
            idx = key if isinstance(key, DyadicIndex) else DyadicIndex(*key)
            if idx.level > max_level:
                raise ValueError(f"index {idx} exceeds max_level={max_level}")
            arr[idx.flat] = value
        return cls(max_level, arr)

    @classmethod
    def from_levels(cls, levels: Sequence[Sequence[float]]) -> "CoefField":
        parts = [np.asarray(lv, dtype=float) for lv in levels]
        for j, part in enumerate(parts):
            if part.shape != (1 << j,):
                raise ValueError(f"level {j} needs {1 << j} coefficients, got {part.shape}")
        return cls(len(parts) - 1, np.concatenate(parts))

    @property
    def levels(self) -> np.ndarray:
        return level_of_flat(self.max_level)

    def level(self, j: int) -> np.ndarray:
        return self.values[(1 << j) - 1 : (1 << (j + 1)) - 1]

    def __getitem__(self, key) -> float:
        idx = key if isinstance(key, DyadicIndex) else DyadicIndex(*key)
        if idx.level > self.max_level:
            return 0.0
        return float(self.values[idx.flat])

    def items(self) -> Iterator[tuple[DyadicIndex, float]]:
        """Nonzero coefficients in index order."""
        for flat in np.flatnonzero(self.values):
            j = int(flat + 1).bit_length() - 1
            yield DyadicIndex(j, int(flat) + 1 - (1 << j)), float(self.values[flat])

    def with_values(self, values) -> "CoefField":
        return CoefField(self.max_level, values)

    def extend(self, max_level: int) -> "CoefField":
        """Zero-pad to a finer ``max_level``."""
        if max_level < self.max_level:
            raise ValueError("cannot truncate a field with extend()")
        arr = np.zeros(field_size(max_level))
        arr[: self.values.size] = self.values
        return CoefField(max_level, arr)

    def _coerce(self, other: "CoefField") -> tuple[np.ndarray, np.ndarray, int]:
        J = max(self.max_level, other.max_level)
        return self.extend(J).values, other.extend(J).values, J

    def __add__(self, other: "CoefField") -> "CoefField":
        a, b, J = self._coerce(other)
        return CoefField(J, a + b)

    def __sub__(self, other: "CoefField") -> "CoefField":
        a, b, J = self._coerce(other)
        return CoefField(J, a - b)

    def __mul__(self, c: float) -> "CoefField":
        return CoefField(self.max_level, float(c) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> "CoefField":
        return CoefField(self.max_level, -self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CoefField):
            return NotImplemented
        a, b, _ = self._coerce(other)
        return bool(np.array_equal(a, b))

    __hash__ = None

    def dot(self, other: "CoefField") -> float:
        a, b, _ = self._coerce(other)
        return float(np.dot(a, b))

    def __repr__(self) -> str:
        return f"CoefField(max_level={self.max_level}, nnz={np.count_nonzero(self.values)})"

    # CSV: header ``level,position,value``, one row per stored slot
    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["level", "position", "value"])
        for j in range(self.max_level + 1):
            for k, v in enumerate(self.level(j)):
                writer.writerow([j, k, repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, max_level: int | None = None) -> "CoefField":
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["level", "position", "value"]:
            raise ValueError(f"line 1: expected header 'level,position,value', got {header}")
        entries = {}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected 3 fields, got {len(row)}")
            try:
                j, k, v = int(row[0]), int(row[1]), float(row[2])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            try:
                idx = DyadicIndex(j, k)
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            if not np.isfinite(v):
                raise ValueError(f"line {lineno}: non-finite value")
            entries[idx] = v
        J = max((i.level for i in entries), default=0)
        if max_level is not None:
            if J > max_level:
                raise ValueError(f"field has level {J} > max_level={max_level}")
            J = max_level
        return cls.from_mapping(J, entries)


def level_exponent(space: BesovSpace) -> float:
    """Per-level exponent ``s + d(1/2 - 1/p)`` of the weighted sequence norm."""
    return float(space.s) + space.d * (0.5 - 1.0 / float(space.p))


def level_weight(space: BesovSpace, j) -> float | np.ndarray:
    """Weight ``2**(p (s + d(1/2 - 1/p)) j)`` multiplying ``|u_lambda|**p``."""
    return np.exp2(float(space.p) * level_exponent(space) * np.asarray(j, dtype=float))


def besov_norm(u: CoefField, space: BesovSpace) -> float:
    p = float(space.p)
    a = np.abs(u.values)
    if not a.any():
        return 0.0
    # factor out the largest scaled entry to keep |.|**p in range
    scaled = a * np.exp2(level_exponent(space) * u.levels)
    top = scaled.max()
    return float(top * np.sum((scaled / top) ** p) ** (1.0 / p))


def sobolev_norm(u: CoefField, sigma: float, d: int = 1) -> float:
    """The :math:`H^\\sigma` sequence norm."""
    return besov_norm(u, BesovSpace(sigma, 2, d))


def differential_dimension(space: BesovSpace):
    """``s - d/p``; exact when ``s`` and ``p`` are rational."""
    if _exact(space.s, space.p):
        return Fraction(space.s) - Fraction(space.d) / Fraction(space.p)
    return float(space.s) - space.d / float(space.p)


def embeds(a: BesovSpace, b: BesovSpace) -> bool:
    """Strict sufficient criterion for ``a`` to embed continuously into ``b``.

    True iff ``ddim(a) > ddim(b)`` and ``a.p <= b.p``. Equal spaces give False:
    this is a criterion check, not an inclusion oracle.
    """
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: d={a.d} vs d={b.d}")
    if a.p < 1 or b.p < 1:
        raise ValueError("embedding criterion needs p >= 1 on both spaces")
    return strictly_greater(differential_dimension(a), differential_dimension(b)) and at_most(
        a.p, b.p
    )


def same_space(a: BesovSpace, b: BesovSpace) -> bool:
    return a.d == b.d and nearly_equal(a.s, b.s) and nearly_equal(a.p, b.p)


def dual_space(space: BesovSpace) -> BesovSpace:
    """``(B^s_p)^* = B^{-s}_{p*}`` with ``1/p + 1/p* = 1``."""
    if not space.p > 1:
        raise ValueError(f"dual space needs p > 1, got p={space.p}")
    if _exact(space.p):
        p = Fraction(space.p)
        return BesovSpace(-space.s, p / (p - 1), space.d)
    return BesovSpace(-space.s, space.p / (space.p - 1.0), space.d)


def devore_diagram_data(
    spaces: Iterable[tuple[str, BesovSpace]],
    lines: Iterable[float] = (),
    inv_p_samples: Sequence[float] = (0.0, 1.0, 2.0),
    d: int | None = None,
) -> list[tuple[str, float, float]]:
    """Rows ``(label, 1/p, s)`` for points and sampled differential-dimension lines.

    A line at level ``c`` is the set ``s = d/p + c``; it is sampled at
    ``inv_p_samples`` and labelled ``line:<c>``.
    """
    rows = []
    dims = set() if d is None else {d}
    for label, sp in spaces:
        dims.add(sp.d)
        rows.append((label, float(sp.inv_p), float(sp.s)))
    if len(dims) > 1:
        raise ValueError(f"spaces must share d, got {sorted(dims)}")
    lines = list(lines)
    if lines:
        dim = dims.pop() if dims else 1
        for c in lines:
            for x in inv_p_samples:
                rows.append((f"line:{c:g}", float(x), dim * float(x) + float(c)))
    return rows


def devore_csv(rows: Iterable[tuple[str, float, float]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["label", "inv_p", "s"])
    for label, x, s in rows:
        writer.writerow([label, repr(x), repr(s)])
    return buf.getvalue()
