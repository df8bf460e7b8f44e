from fractions import Fraction as Q

import numpy as np
import pytest

from besovreg import fixtures
from besovreg.planner import (
    PlanError,
    ProblemSignature,
    check_signature,
    compare_sources,
    feasible_weakened_sources,
    plan_direct,
    plan_optimal,
    _plan,
    plan_weakened,
    sigma_hat,
)
from besovreg.spaces import BesovSpace, differential_dimension, embeds, same_space
from conftest import random_signature

EPS = Q(1, 1000)


def ex1(eta=1, eps=EPS):
    return fixtures.sobolev_smoothing(eta, eps)


def test_direct_sobolev_smoothing():
    plan = plan_direct(ex1())
    assert (plan.p_R, plan.s_R, plan.sigma) == (Q(3, 2), 0, Q(-1, 6))
    assert plan.provenance == "direct"


def test_direct_symmetric_zero():
    # s_S = s_G = 0, p_S = p_G = 2 admits no domain with B_S in B_D and B_G in B_D*:
    # the planner refuses, while the unvalidated formulas give (2, 0, 0)
    for s_D in (-1, Q(-1, 100), 0, 1):
        sig = ProblemSignature(BesovSpace(s_D, 2), BesovSpace(0, 2), BesovSpace(0, 2))
        with pytest.raises(PlanError, match="B_S in B_D|B_G in B_D"):
            plan_direct(sig)
    plan = _plan(sig, 2, "direct")
    assert (plan.p_R, plan.s_R, plan.sigma) == (2, 0, 0)


@pytest.mark.parametrize("eta", [1, Q(3, 2), 2])
def test_direct_tightened_source(eta):
    sig, tight = fixtures.tightening_counterexample(eta, eps=Q(1, 10**9))
    plan = plan_direct(sig.with_source(tight))
    eps = sig.epsilon
    assert plan.p_R == Q(3, 2)
    # s_R = -eta/3 + eps + d/6; the printed exponent eta + eps + d/6 does not follow
    assert plan.s_R == -Q(eta) / 3 + eps + Q(1, 6)
    assert plan.sigma == -Q(eta) / 3 + eps


def test_weakened_at_source_index_equals_direct():
    for sig in (ex1(), fixtures.besov_smoothing_strict()):
        assert plan_weakened(sig, sig.source.p).penalty_space == plan_direct(sig).penalty_space
        assert plan_weakened(sig, sig.source.p).sigma == plan_direct(sig).sigma


@pytest.mark.parametrize("eta", [1, 2, Q(3, 4)])
def test_weakened_sobolev_smoothing_optimal(eta):
    sig = ex1(eta)
    plan = plan_weakened(sig, 2)
    assert plan.p_R == 2
    assert plan.s_R == Q(eta, 2) - Q(1, 4) - EPS
    assert plan.sigma == Q(eta, 2) - Q(1, 4) - EPS


@pytest.mark.parametrize("theta", [Q(1, 4), Q(1, 10), Q(1, 2)])
def test_weakened_besov_worst(theta):
    eta = 1
    plan = plan_weakened(fixtures.besov_smoothing_strict(eta, theta), 1 + theta)
    assert plan.p_R == (4 + theta) / 3
    assert plan.s_R == -eta + (theta + 1) / (theta + 4)
    assert plan.sigma == -eta + Q(1, 2) + (theta - 2) / (theta + 4)


def test_weakened_out_of_range():
    sig = fixtures.besov_smoothing_strict()
    with pytest.raises(PlanError, match="p_S"):
        plan_weakened(sig, Q(9, 8))
    with pytest.raises(PlanError, match="p_D"):
        plan_weakened(sig, 2)
    sig2 = ProblemSignature(BesovSpace(-1, 3), BesovSpace(1, Q(3, 2)), BesovSpace(1, 1))
    with pytest.raises(PlanError, match="p_G"):
        plan_weakened(sig2, 2)


def test_sigma_hat_examples():
    for d in (1, 2, 3):
        sig = ProblemSignature(BesovSpace(-5, 2, d), BesovSpace(0, 2, d), BesovSpace(0, 2, d))
        # both weighted terms equal -d/2; the objective adds d/2 back
        assert sigma_hat(sig, 2) == 0
    assert sigma_hat(ex1(), 2) == Q(1, 4)
    assert sigma_hat(ex1(), 2) == plan_weakened(ex1(), 2).sigma + EPS
    with pytest.raises(PlanError):
        sigma_hat(ex1(), 3)


def test_sigma_hat_matches_epsilon_free_plan():
    rng = np.random.default_rng(5)
    for _ in range(50):
        sig = random_signature(rng)
        hi = min(sig.domain.p, sig.adjoint_range.p)
        for p in (sig.source.p, (sig.source.p + hi) / 2, hi):
            plan = plan_weakened(sig, p)
            assert plan.sigma + plan.epsilon_tilde == sigma_hat(sig, p)


def test_optimal_sobolev_smoothing():
    plan = plan_optimal(ex1())
    assert plan.case == "i"
    assert (plan.p_R, plan.s_R, plan.sigma) == (2, Q(1, 4) - EPS, Q(1, 4) - EPS)


def test_optimal_collapses_when_source_index_is_minimal():
    sig = fixtures.besov_smoothing_equal(1, Q(1, 3))
    assert plan_optimal(sig).penalty_space == plan_direct(sig).penalty_space
    assert plan_optimal(sig).epsilon_tilde == 0


def test_optimal_besov_theta_limit():
    eta = 1
    plan = plan_optimal(fixtures.besov_smoothing_strict(eta, Q(0), eps=Q(1, 10**12)))
    assert plan.p_R == Q(3, 2)
    assert plan.s_R + plan.epsilon_tilde == -eta + Q(2, 9)
    assert plan.sigma + plan.epsilon_tilde == -eta + Q(1, 18)


def test_optimal_case_ii_rate_space_is_penalty_space():
    sig = ProblemSignature(BesovSpace(-1, 3), BesovSpace(1, Q(3, 2)), BesovSpace(1, Q(5, 4)))
    plan = plan_optimal(sig)
    S, G, d = sig.source, sig.adjoint_range, 1
    assert plan.case == "ii" and plan.p_R == 2
    expected = Q(1, 2) * (S.s - d / Q(S.p) - (G.s - d / Q(G.p))) - plan.epsilon_tilde
    assert plan.s_R == expected
    assert plan.sigma == plan.s_R
    assert plan.rate_space == plan.penalty_space


def test_invalid_signature_reports_constraint():
    bad = ProblemSignature(BesovSpace(-1, 2), BesovSpace(1, 2), BesovSpace(-2, 2))
    with pytest.raises(PlanError, match="B_S in B_D") as info:
        plan_direct(bad)
    assert any(not c.passed for c in info.value.checks)
    bad_g = ProblemSignature(BesovSpace(-1, 2), BesovSpace(0, 2), BesovSpace(1, 2))
    with pytest.raises(PlanError, match="B_G in B_D"):
        plan_optimal(bad_g)
    bad_p = ProblemSignature(BesovSpace(-1, Q(3, 2)), BesovSpace(5, Q(3, 2)), BesovSpace(1, Q(3, 2)))
    assert all(c.passed for c in check_signature(bad_p))
    too_wide = ProblemSignature(BesovSpace(-3, 4), BesovSpace(5, Q(6, 5)), BesovSpace(1, 2))
    with pytest.raises(PlanError, match="p_S <= p_G"):
        plan_direct(too_wide)


def test_feasible_region_examples():
    sig = ex1()
    pts = feasible_weakened_sources(sig, [1, 0, 3], [2, Q(1, 2) + 1, 3])
    assert BesovSpace(1, 2) in pts
    # p below p_S would need 1/p > 1/p_S; p = 3 exceeds p_D and p_G
    assert all(p.p != 3 for p in pts)
    sig3 = fixtures.besov_smoothing_strict()
    assert feasible_weakened_sources(sig3, [0], [1]) == []
    assert feasible_weakened_sources(sig3, [sig3.source.s], [sig3.source.p]) == []
    assert feasible_weakened_sources(sig3, [], []) == []


def test_feasible_region_every_point_admissible():
    sig = fixtures.besov_smoothing_strict()
    S, D = sig.source, sig.domain
    s_grid = np.linspace(-2, 1, 31)
    p_grid = 1 / np.linspace(1 / 3, 1, 31)
    pts = feasible_weakened_sources(sig, s_grid, p_grid)
    assert pts
    for b in pts:
        assert embeds(S, b) and embeds(b, D) and b.p <= sig.adjoint_range.p


def test_compare_sources_degenerate():
    sig = ex1()
    cmp = compare_sources(sig, sig.source)
    assert cmp.delta_direct == cmp.delta_optimal == cmp.delta_closed_form == 0


def test_compare_sources_counterexample():
    sig, tight = fixtures.tightening_counterexample(1, Q(1, 10**6))
    cmp = compare_sources(sig, tight)
    assert cmp.direct_loose.sigma == 0 and cmp.direct_loose.s_R == 0
    assert cmp.direct_tight.sigma == Q(-1, 3) + sig.epsilon
    assert cmp.delta_direct < 0 < cmp.delta_optimal
    gap = differential_dimension(tight) - differential_dimension(sig.source)
    assert cmp.delta_closed_form == Q(1, 2) * gap == cmp.delta_optimal_hat


def test_compare_sources_rejects_looser():
    sig = ex1()
    with pytest.raises(PlanError, match="not contained"):
        compare_sources(sig, BesovSpace(0, 2))


def test_compare_sources_case_ii_weight():
    sig = ProblemSignature(BesovSpace(-1, 3), BesovSpace(1, Q(3, 2)), BesovSpace(1, Q(5, 4)))
    tight = BesovSpace(2, 1)
    cmp = compare_sources(sig, tight)
    gap = differential_dimension(tight) - differential_dimension(sig.source)
    assert cmp.case == "ii"
    assert cmp.delta_closed_form == gap / 2 == cmp.delta_optimal_hat


def test_float_signature_agrees_with_exact():
    rng = np.random.default_rng(11)
    for _ in range(30):
        state = rng.bit_generator.state
        exact = random_signature(rng)
        rng.bit_generator.state = state
        approx = random_signature(rng, exact=False)
        for fn in (plan_direct, plan_optimal):
            a, b = fn(exact), fn(approx)
            assert float(a.sigma) == pytest.approx(b.sigma, abs=1e-12)
            assert float(a.p_R) == pytest.approx(b.p_R, abs=1e-12)


def test_remark_inequalities_random():
    rng = np.random.default_rng(7)
    for _ in range(100):
        sig = random_signature(rng)
        S, d = sig.source, sig.d
        for plan in (plan_direct(sig), plan_optimal(sig)):
            B_R = plan.penalty_space
            assert plan.p_R >= S.p
            assert 1 < plan.p_R <= 2
            assert differential_dimension(B_R) < differential_dimension(S)
            assert differential_dimension(B_R) == plan.sigma - Q(d, 2)
            assert embeds(S, B_R) or same_space(S, B_R)
