"""Choice of the penalty space ``B_R`` and the resulting rate exponent ``sigma``.

Given the domain ``B_D``, the adjoint range ``B_G`` and a source space ``B_S``,
the planner returns the Tikhonov penalty ``||.||_{B_R}^{p_R}`` and the Sobolev
index ``sigma`` for which ``||u_alpha_delta - u_true||_{H^sigma} = O(sqrt(delta))``.

Arithmetic is exact whenever every input is an ``int`` or ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from numbers import Rational
from typing import Iterable

from .spaces import (
    BesovSpace,
    at_most,
    differential_dimension,
    dual_space,
    embeds,
    nearly_equal,
    same_space,
    strictly_greater,
)

__all__ = [
    "DEFAULT_EPSILON",
    "PlanError",
    "ConstraintCheck",
    "ProblemSignature",
    "RegularizationPlan",
    "SourceComparison",
    "plan_direct",
    "plan_weakened",
    "plan_optimal",
    "sigma_hat",
    "feasible_weakened_sources",
    "compare_sources",
    "check_signature",
]

DEFAULT_EPSILON = Fraction(1, 1000)


class PlanError(ValueError):
    """Raised when a signature or parameter violates a planner constraint."""

    def __init__(self, message: str, checks: list["ConstraintCheck"] | None = None):
        super().__init__(message)
        self.checks = checks or []


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    detail: str = ""


def _q(x):
    """Promote ints to Fraction so exact division stays exact."""
    return Fraction(x) if isinstance(x, Rational) else x


@dataclass(frozen=True)
class ProblemSignature:
    """Smoothness data of an inverse problem.

    ``domain`` is ``B_D`` (the domain of ``F``), ``adjoint_range`` is
    ``B_G = rg F*`` and ``source`` is ``B_S`` with ``u_true in B_S``.
    """

    domain: BesovSpace
    adjoint_range: BesovSpace
    source: BesovSpace
    epsilon: float = DEFAULT_EPSILON

    @property
    def d(self) -> int:
        return self.domain.d

    def with_source(self, source: BesovSpace) -> "ProblemSignature":
        return ProblemSignature(self.domain, self.adjoint_range, source, self.epsilon)


def _contained(a: BesovSpace, b: BesovSpace) -> bool:
    return same_space(a, b) or embeds(a, b)


def check_signature(sig: ProblemSignature) -> list[ConstraintCheck]:
    """Evaluate every signature invariant; never raises on violation."""
    D, G, S = sig.domain, sig.adjoint_range, sig.source
    checks = [
        ConstraintCheck(
            "shared dimension",
            D.d == G.d == S.d,
            f"d = {D.d}, {G.d}, {S.d}",
        ),
        ConstraintCheck("epsilon > 0", sig.epsilon > 0, f"epsilon = {sig.epsilon}"),
        ConstraintCheck("p_D > 1", D.p > 1, f"p_D = {D.p}"),
        ConstraintCheck(
            "p >= 1 for all spaces", min(D.p, G.p, S.p) >= 1, f"p = {D.p}, {G.p}, {S.p}"
        ),
    ]
    if not all(c.passed for c in checks):
        return checks
    Dstar = dual_space(D)
    checks += [
        ConstraintCheck(
            "B_G in B_D*",
            _contained(G, Dstar),
            f"ddim(B_G) = {differential_dimension(G)}, ddim(B_D*) = {differential_dimension(Dstar)},"
            f" p_G = {G.p}, p_D* = {Dstar.p}",
        ),
        ConstraintCheck(
            "B_S in B_D",
            embeds(S, D),
            f"ddim(B_S) = {differential_dimension(S)}, ddim(B_D) = {differential_dimension(D)},"
            f" p_S = {S.p}, p_D = {D.p}",
        ),
        ConstraintCheck("p_S <= p_G", at_most(S.p, G.p), f"p_S = {S.p}, p_G = {G.p}"),
    ]
    return checks


def _require_valid(sig: ProblemSignature) -> list[ConstraintCheck]:
    checks = check_signature(sig)
    failed = [c for c in checks if not c.passed]
    if failed:
        names = ", ".join(f"{c.name} ({c.detail})" for c in failed)
        raise PlanError(f"invalid problem signature: violated {names}", checks)
    return checks


@dataclass(frozen=True)
class RegularizationPlan:
    """Penalty space, power and rate index produced by the planner.

    ``provenance`` is ``"direct"``, ``"weakened"`` or ``"optimal"``;
    ``p`` is the weakened integrability index used (``p_S`` for direct plans).
    """

    penalty_space: BesovSpace
    sigma: float
    provenance: str
    p: float
    epsilon_tilde: float = 0
    case: str | None = None
    feasibility: tuple[ConstraintCheck, ...] = field(default=(), compare=False)

    @property
    def p_R(self):
        return self.penalty_space.p

    @property
    def s_R(self):
        return self.penalty_space.s

    @property
    def penalty_power(self):
        return self.penalty_space.p

    @property
    def rate_space(self) -> BesovSpace:
        """The Sobolev space ``H^sigma`` in which the rate holds."""
        return BesovSpace(self.sigma, 2, self.penalty_space.d)

    def to_dict(self) -> dict:
        return {
            "provenance": self.provenance,
            "p": _num(self.p),
            "case": self.case,
            "p_R": _num(self.p_R),
            "s_R": _num(self.s_R),
            "penalty_power": _num(self.penalty_power),
            "sigma": _num(self.sigma),
            "epsilon_tilde": _num(self.epsilon_tilde),
            "d": self.penalty_space.d,
            "feasibility": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.feasibility
            ],
        }


def _num(x):
    return float(x)


def _plan(sig, p, provenance, case=None, checks=()) -> RegularizationPlan:
    S, G = sig.source, sig.adjoint_range
    d = sig.d
    p, pS, pG, sS, sG = _q(p), _q(S.p), _q(G.p), _q(S.s), _q(G.s)
    eps = _q(sig.epsilon)
    p_R = (p + pG) / pG
    excess = p / pS - 1
    eps_tilde = eps * excess
    s_R = (p * sS - pG * sG) / (p + pG) - d * excess / (p + pG) - eps_tilde
    sigma = s_R + d * (Fraction(1, 2) - 1 / p_R)
    if not (strictly_greater(p_R, 1) and at_most(p_R, 2)):
        raise PlanError(f"p_R = {p_R} violates 1 < p_R <= 2")
    return RegularizationPlan(
        penalty_space=BesovSpace(s_R, p_R, d),
        sigma=sigma,
        provenance=provenance,
        p=p,
        epsilon_tilde=eps_tilde,
        case=case,
        feasibility=tuple(checks),
    )


def plan_direct(sig: ProblemSignature) -> RegularizationPlan:
    """Penalty from the source condition as given.

    ``p_R = (p_S + p_G)/p_G`` and the maximal admissible
    ``s_R = (p_S s_S - p_G s_G)/(p_S + p_G)``.
    """
    checks = _require_valid(sig)
    return _plan(sig, sig.source.p, "direct", checks=checks)


def _check_p(sig: ProblemSignature, p) -> None:
    lo = sig.source.p
    hi = min(sig.domain.p, sig.adjoint_range.p)
    if not at_most(lo, p):
        raise PlanError(f"p = {p} below lower bound p_S = {lo}")
    if not at_most(p, sig.domain.p):
        raise PlanError(f"p = {p} above upper bound p_D = {sig.domain.p}")
    if not at_most(p, sig.adjoint_range.p):
        raise PlanError(f"p = {p} above upper bound p_G = {sig.adjoint_range.p}")
    assert at_most(p, hi)


def plan_weakened(sig: ProblemSignature, p) -> RegularizationPlan:
    """Penalty from a weakened source condition ``u_true in B^s_p``.

    Valid for ``p_S <= p <= min(p_D, p_G)``. The epsilon slack enters through
    ``epsilon_tilde = epsilon (p/p_S - 1)`` which vanishes at ``p = p_S``.
    """
    checks = _require_valid(sig)
    _check_p(sig, p)
    return _plan(sig, p, "weakened", checks=checks)


def sigma_hat(sig: ProblemSignature, p):
    """Epsilon-free rate index as a function of the weakened index ``p``.

    ``(p/(p+p_G)) ddim(B_S) + (p_G/(p+p_G)) (-s_G - d/p_G*) + d/2``, which is
    the ``sigma`` of :func:`plan_weakened` with the epsilon slack removed.
    """
    _check_p(sig, p)
    S, G, d = sig.source, sig.adjoint_range, sig.d
    p, pG = _q(p), _q(G.p)
    inv_pG_star = 1 - 1 / pG
    return (
        (p / (p + pG)) * differential_dimension(S)
        + (pG / (p + pG)) * (-_q(G.s) - d * inv_pG_star)
        + Fraction(d, 2)
    )


def plan_optimal(sig: ProblemSignature) -> RegularizationPlan:
    """The weakened plan at ``p = min(p_D, p_G)``, which maximises ``sigma``.

    Case ``"i"`` is ``p_G >= p_D``; case ``"ii"`` is ``p_G < p_D``, where
    ``p_R = 2`` and the rate space coincides with ``B_R = H^{s_R}``.
    """
    checks = _require_valid(sig)
    D, G = sig.domain, sig.adjoint_range
    if at_most(D.p, G.p):
        p, case = D.p, "i"
    else:
        p, case = G.p, "ii"
    _check_p(sig, p)
    plan = _plan(sig, p, "optimal", case=case, checks=checks)
    if case == "ii":
        assert nearly_equal(plan.p_R, 2) and nearly_equal(plan.sigma, plan.s_R)
    return plan


def feasible_weakened_sources(
    sig: ProblemSignature, s_values: Iterable[float], p_values: Iterable[float]
) -> list[BesovSpace]:
    """Grid points ``(s, p)`` admissible as weakened source spaces.

    Keeps ``B^s_p`` with ``B_S in B^s_p in B_D`` (strict differential-dimension
    inequalities, ``p_S <= p <= p_D``) and ``p <= p_G``. ``B_S`` itself is
    excluded by strictness.
    """
    _require_valid(sig)
    S, D, G, d = sig.source, sig.domain, sig.adjoint_range, sig.d
    out = []
    s_values = list(s_values)
    for p, s in product(list(p_values), s_values):
        if not p >= 1:
            continue
        cand = BesovSpace(s, p, d)
        dd = differential_dimension(cand)
        if (
            strictly_greater(differential_dimension(S), dd)
            and at_most(S.p, p)
            and strictly_greater(dd, differential_dimension(D))
            and at_most(p, D.p)
            and at_most(p, G.p)
        ):
            out.append(cand)
    return out


@dataclass(frozen=True)
class SourceComparison:
    """Rates for a source space ``B_S`` and a tighter ``B_T`` inside it.

    ``delta_optimal_hat`` is the epsilon-free optimal-rate gain
    ``sigma_hat_T - sigma_hat_S`` and equals ``delta_closed_form``; the raw
    ``delta_optimal`` additionally carries the epsilon_tilde bookkeeping.
    """

    direct_loose: RegularizationPlan
    direct_tight: RegularizationPlan
    optimal_loose: RegularizationPlan
    optimal_tight: RegularizationPlan
    delta_direct: float
    delta_optimal: float
    delta_optimal_hat: float
    delta_closed_form: float
    case: str

    def to_dict(self) -> dict:
        return {
            "sigma_direct_loose": float(self.direct_loose.sigma),
            "sigma_direct_tight": float(self.direct_tight.sigma),
            "sigma_optimal_loose": float(self.optimal_loose.sigma),
            "sigma_optimal_tight": float(self.optimal_tight.sigma),
            "delta_direct": float(self.delta_direct),
            "delta_optimal": float(self.delta_optimal),
            "delta_optimal_hat": float(self.delta_optimal_hat),
            "delta_closed_form": float(self.delta_closed_form),
            "case": self.case,
        }


def compare_sources(sig: ProblemSignature, tighter: BesovSpace) -> SourceComparison:
    """Compare direct and optimal rates for ``B_S`` and a tighter ``B_T``.

    Direct plans may reward the tighter source with a weaker rate; the
    optimal plan always gains ``w * (ddim(B_T) - ddim(B_S))`` with
    ``w = p_D/(p_D + p_G)`` in case i and ``w = 1/2`` in case ii.
    """
    S = sig.source
    degenerate = same_space(tighter, S)
    if not degenerate and not embeds(tighter, S):
        raise PlanError(f"{tighter} is not contained in {S} by the embedding criterion")
    tsig = sig.with_source(tighter)
    dl, dt = plan_direct(sig), plan_direct(tsig)
    ol, ot = plan_optimal(sig), plan_optimal(tsig)
    D, G = sig.domain, sig.adjoint_range
    gap = differential_dimension(tighter) - differential_dimension(S)
    weight = _q(D.p) / (_q(D.p) + _q(G.p)) if ol.case == "i" else Fraction(1, 2)
    closed = weight * gap
    hat = (ot.sigma + ot.epsilon_tilde) - (ol.sigma + ol.epsilon_tilde)
    if not degenerate and not strictly_greater(closed, 0):
        raise PlanError(f"optimal-rate gain {closed} is not positive")
    return SourceComparison(
        direct_loose=dl,
        direct_tight=dt,
        optimal_loose=ol,
        optimal_tight=ot,
        delta_direct=dt.sigma - dl.sigma,
        delta_optimal=ot.sigma - ol.sigma,
        delta_optimal_hat=hat,
        delta_closed_form=closed,
        case=ol.case,
    )
