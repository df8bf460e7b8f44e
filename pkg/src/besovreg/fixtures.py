"""Pinned reference problems with hand-evaluated plan values.

Each check returns ``(name, passed, detail)``; :func:`run_all` drives the
``besovreg examples`` self-test.
"""

from __future__ import annotations

from fractions import Fraction as Q

from .planner import ProblemSignature, compare_sources, plan_direct, plan_optimal, plan_weakened
from .spaces import BesovSpace

__all__ = [
    "sobolev_smoothing",
    "besov_smoothing_equal",
    "besov_smoothing_strict",
    "tightening_counterexample",
    "run_all",
]

EPS = Q(1, 1000)


def sobolev_smoothing(eta=1, eps=EPS) -> ProblemSignature:
    """``F: H^-eta -> L2`` with ``rg F* = H^eta`` and source ``B^{2 eta}_1``."""
    return ProblemSignature(
        BesovSpace(-eta, 2), BesovSpace(eta, 2), BesovSpace(2 * eta, 1), epsilon=eps
    )


def besov_smoothing_equal(eta=1, theta=Q(1, 2), eps=EPS) -> ProblemSignature:
    """``F: B^-eta_{1+theta} -> L2``, range ``B^eta_{(1+theta)/theta}``, source ``B^{-eta+theta}_{1+theta}``."""
    p = 1 + theta
    return ProblemSignature(
        BesovSpace(-eta, p), BesovSpace(eta, p / theta), BesovSpace(-eta + theta, p), epsilon=eps
    )


def besov_smoothing_strict(eta=1, theta=Q(1, 4), eps=EPS) -> ProblemSignature:
    """``F: B^-eta_{3/2} -> L2``, range ``B^eta_3``, source ``B^{1-eta}_{1+theta}``."""
    return ProblemSignature(
        BesovSpace(-eta, Q(3, 2)), BesovSpace(eta, 3), BesovSpace(1 - eta, 1 + theta), epsilon=eps
    )


def tightening_counterexample(eta=1, eps=Q(1, 10**6), d=1):
    """Loose source ``H^eta`` and tight source ``B^{eta + d/2 + 3 eps}_1`` for ``rg F* = H^eta``."""
    sig = ProblemSignature(
        BesovSpace(-eta, 2, d), BesovSpace(eta, 2, d), BesovSpace(eta, 2, d), epsilon=eps
    )
    return sig, BesovSpace(eta + Q(d, 2) + 3 * eps, 1, d)


def _eq(name, got, want):
    return name, got == want, f"got {got}, expected {want}"


def _checks():
    eta = 1
    sig = sobolev_smoothing(eta)
    d, o = plan_direct(sig), plan_optimal(sig)
    yield _eq("sobolev smoothing, direct p_R", d.p_R, Q(3, 2))
    yield _eq("sobolev smoothing, direct s_R", d.s_R, 0)
    yield _eq("sobolev smoothing, direct sigma", d.sigma, Q(-1, 6))
    yield _eq("sobolev smoothing, optimal p_R", o.p_R, 2)
    yield _eq("sobolev smoothing, optimal sigma", o.sigma, Q(eta, 2) - Q(1, 4) - EPS)
    yield _eq("sobolev smoothing, optimal epsilon_tilde", o.epsilon_tilde, EPS)

    theta = Q(1, 2)
    sig = besov_smoothing_equal(eta, theta)
    d, o = plan_direct(sig), plan_optimal(sig)
    yield _eq("besov smoothing p_S = p_D, optimal equals direct", o.penalty_space, d.penalty_space)
    yield _eq("besov smoothing p_S = p_D, p_R", d.p_R, 1 + theta)
    yield _eq("besov smoothing p_S = p_D, s_R", d.s_R, -eta + theta**2 / (theta + 1))
    yield _eq("besov smoothing p_S = p_D, sigma", d.sigma, -eta + theta - Q(1, 2))

    theta = Q(1, 4)
    sig = besov_smoothing_strict(eta, theta)
    w, o = plan_weakened(sig, sig.source.p), plan_optimal(sig)
    yield _eq("besov smoothing p_S < p_D, worst p_R", w.p_R, (4 + theta) / 3)
    yield _eq("besov smoothing p_S < p_D, worst s_R", w.s_R, -eta + (theta + 1) / (theta + 4))
    yield _eq(
        "besov smoothing p_S < p_D, worst sigma", w.sigma, -eta + Q(1, 2) + (theta - 2) / (theta + 4)
    )
    yield _eq("besov smoothing p_S < p_D, optimal p_R", o.p_R, Q(3, 2))
    yield _eq(
        "besov smoothing p_S < p_D, optimal sigma",
        o.sigma,
        -eta + Q(1, 6) + Q(1, 9) * (2 * theta - 1) / (theta + 1) - o.epsilon_tilde,
    )
    lim = plan_optimal(besov_smoothing_strict(eta, Q(0), eps=Q(1, 10**9)))
    yield _eq(
        "besov smoothing p_S < p_D, theta -> 0 optimal sigma",
        lim.sigma + lim.epsilon_tilde,
        -eta + Q(1, 18),
    )

    sig, tight = tightening_counterexample(eta)
    cmp = compare_sources(sig, tight)
    yield _eq("tightening, loose direct sigma", cmp.direct_loose.sigma, 0)
    yield _eq("tightening, tight direct sigma", cmp.direct_tight.sigma, Q(-eta, 3) + sig.epsilon)
    yield (
        "tightening, direct rate gets worse",
        cmp.delta_direct < 0,
        f"delta = {cmp.delta_direct}",
    )
    yield (
        "tightening, optimal rate gets better",
        cmp.delta_optimal > 0 and cmp.delta_optimal_hat == cmp.delta_closed_form,
        f"delta = {cmp.delta_optimal}, epsilon-free {cmp.delta_optimal_hat}"
        f" vs closed form {cmp.delta_closed_form}",
    )


def run_all() -> list[tuple[str, bool, str]]:
    out = []
    for name, ok, detail in _checks():
        out.append((name, bool(ok), detail))
    return out
