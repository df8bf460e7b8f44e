"""JSON schemas for signatures, experiment configs and plans.

Numbers may be given as JSON numbers or as rational strings such as
``"3/2"``; integers and rational strings stay exact.

ProblemSignature::

    {"d": 1, "epsilon": "1/1000",
     "domain": {"s": -1, "p": 2},
     "adjoint_range": {"s": 1, "p": 2},
     "source": {"s": 2, "p": 1}}

ExperimentConfig::

    {"signature": {...}, "plan": "optimal" | "direct" | {"weakened": "3/2"},
     "eta": 1, "max_level": 12, "deltas": [0.1, 0.03, 0.01, 0.003, 0.001],
     "alpha_constant": 1, "seed": 42, "margin": 0.1}
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

from .planner import (
    DEFAULT_EPSILON,
    ProblemSignature,
    RegularizationPlan,
    plan_direct,
    plan_optimal,
    plan_weakened,
)
from .spaces import BesovSpace

__all__ = [
    "ConfigError",
    "parse_number",
    "signature_from_dict",
    "signature_to_dict",
    "ExperimentConfig",
    "DEFAULT_DELTAS",
]

DEFAULT_DELTAS = (1e-1, 3e-2, 1e-2, 3e-3, 1e-3)


class ConfigError(ValueError):
    """Malformed or invalid JSON input; the message names the field."""


def parse_number(value, where: str):
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{where}: cannot parse number {value!r}") from None
    raise ConfigError(f"{where}: expected a number, got {type(value).__name__}")


def _space(obj, where: str, d: int) -> BesovSpace:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected an object with keys 's' and 'p'")
    missing = {"s", "p"} - obj.keys()
    if missing:
        raise ConfigError(f"{where}: missing {sorted(missing)}")
    try:
        return BesovSpace(parse_number(obj["s"], f"{where}.s"), parse_number(obj["p"], f"{where}.p"), d)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def signature_from_dict(obj, where: str = "signature") -> ProblemSignature:
    if not isinstance(obj, dict):
        raise ConfigError(f"{where}: expected a JSON object")
    d = obj.get("d", 1)
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ConfigError(f"{where}.d: expected a positive integer, got {d!r}")
    for key in ("domain", "adjoint_range", "source"):
        if key not in obj:
            raise ConfigError(f"{where}: missing field {key!r}")
    eps = parse_number(obj["epsilon"], f"{where}.epsilon") if "epsilon" in obj else DEFAULT_EPSILON
    if not eps > 0:
        raise ConfigError(f"{where}.epsilon: must be positive")
    return ProblemSignature(
        domain=_space(obj["domain"], f"{where}.domain", d),
        adjoint_range=_space(obj["adjoint_range"], f"{where}.adjoint_range", d),
        source=_space(obj["source"], f"{where}.source", d),
        epsilon=eps,
    )


def _jsonable(x):
    if isinstance(x, Rational):
        x = Fraction(x)
        return int(x) if x.denominator == 1 else str(x)
    return float(x)


def signature_to_dict(sig: ProblemSignature) -> dict:
    def sp(b):
        return {"s": _jsonable(b.s), "p": _jsonable(b.p)}

    return {
        "d": sig.d,
        "epsilon": _jsonable(sig.epsilon),
        "domain": sp(sig.domain),
        "adjoint_range": sp(sig.adjoint_range),
        "source": sp(sig.source),
    }


@dataclass(frozen=True)
class ExperimentConfig:
    """A delta-grid rate experiment with ``alpha = alpha_constant * delta``.

    ``plan`` is ``"direct"``, ``"optimal"`` or ``("weakened", p)``.
    """

    signature: ProblemSignature
    plan: str | tuple = "optimal"
    eta: float = 1.0
    max_level: int = 12
    deltas: tuple[float, ...] = DEFAULT_DELTAS
    alpha_constant: float = 1.0
    seed: int = 42
    margin: float = 0.1
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        deltas = tuple(float(x) for x in self.deltas)
        object.__setattr__(self, "deltas", deltas)
        if len(deltas) < 3:
            raise ConfigError("deltas: need at least 3 noise levels")
        if any(not x > 0 for x in deltas):
            raise ConfigError("deltas: noise levels must be positive")
        if any(b >= a for a, b in zip(deltas, deltas[1:])):
            raise ConfigError("deltas: noise levels must be strictly decreasing")
        if not self.alpha_constant > 0:
            raise ConfigError("alpha_constant: must be positive")
        if not self.margin > 0:
            raise ConfigError("margin: must be positive")
        if self.max_level < 0:
            raise ConfigError("max_level: must be nonnegative")
        if self.eta < 0:
            raise ConfigError("eta: must be nonnegative")
        if not (self.plan in ("direct", "optimal") or (
            isinstance(self.plan, tuple) and len(self.plan) == 2 and self.plan[0] == "weakened"
        )):
            raise ConfigError(f"plan: unknown choice {self.plan!r}")

    def make_plan(self) -> RegularizationPlan:
        if self.plan == "direct":
            return plan_direct(self.signature)
        if self.plan == "optimal":
            return plan_optimal(self.signature)
        return plan_weakened(self.signature, self.plan[1])

    @classmethod
    def from_dict(cls, obj) -> "ExperimentConfig":
        if not isinstance(obj, dict):
            raise ConfigError("config: expected a JSON object")
        if "signature" not in obj:
            raise ConfigError("config: missing field 'signature'")
        sig = signature_from_dict(obj["signature"])
        plan = obj.get("plan", "optimal")
        if isinstance(plan, dict):
            if set(plan) != {"weakened"}:
                raise ConfigError(f"plan: expected {{'weakened': p}}, got {plan!r}")
            plan = ("weakened", parse_number(plan["weakened"], "plan.weakened"))
        elif plan not in ("direct", "optimal"):
            raise ConfigError(f"plan: unknown choice {plan!r}")

        def num(key, default):
            return float(parse_number(obj[key], key)) if key in obj else default

        seed = obj.get("seed", 42)
        level = obj.get("max_level", 12)
        for key, val in (("seed", seed), ("max_level", level)):
            if not isinstance(val, int) or isinstance(val, bool):
                raise ConfigError(f"{key}: expected an integer, got {val!r}")
        deltas = obj.get("deltas", list(DEFAULT_DELTAS))
        if not isinstance(deltas, list):
            raise ConfigError("deltas: expected a list")
        return cls(
            signature=sig,
            plan=plan,
            eta=num("eta", 1.0),
            max_level=level,
            deltas=tuple(float(parse_number(x, f"deltas[{i}]")) for i, x in enumerate(deltas)),
            alpha_constant=num("alpha_constant", 1.0),
            seed=seed,
            margin=num("margin", 0.1),
        )

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(obj)

    def to_dict(self) -> dict:
        plan = self.plan if isinstance(self.plan, str) else {"weakened": _jsonable(self.plan[1])}
        return {
            "signature": signature_to_dict(self.signature),
            "plan": plan,
            "eta": self.eta,
            "max_level": self.max_level,
            "deltas": list(self.deltas),
            "alpha_constant": self.alpha_constant,
            "seed": self.seed,
            "margin": self.margin,
        }
