"""Empirical convergence rates over a grid of noise levels."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .lab import DiagonalScaleOperator, add_noise, make_source
from .planner import RegularizationPlan
from .solver import PenaltySpec, solve_diagonal
from .spaces import besov_norm, sobolev_norm

__all__ = ["RateRow", "RateReport", "fit_log_log_slope", "run_rate_experiment", "count_inversions"]


def fit_log_log_slope(deltas, errors) -> tuple[float, float, float]:
    """Least-squares fit of ``log(error) = slope * log(delta) + intercept``.

    Returns ``(slope, intercept, r_squared)``.
    """
    x = np.asarray(deltas, dtype=float)
    y = np.asarray(errors, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("deltas and errors must be 1-d arrays of equal length")
    if x.size < 3:
        raise ValueError(f"need at least 3 points, got {x.size}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("deltas and errors must be positive")
    lx, ly = np.log(x), np.log(y)
    A = np.column_stack([lx, np.ones_like(lx)])
    (slope, intercept), *_ = np.linalg.lstsq(A, ly, rcond=None)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2


def count_inversions(values) -> int:
    """Number of consecutive steps where ``values`` fails to decrease."""
    v = list(values)
    return sum(1 for a, b in zip(v, v[1:]) if not b < a)


@dataclass(frozen=True)
class RateRow:
    delta: float
    alpha: float
    error_h_sigma: float
    error_b_r: float
    objective: float
    iterations: int


@dataclass(frozen=True)
class RateReport:
    rows: tuple[RateRow, ...]
    slope: float
    intercept: float
    r_squared: float
    sigma: float
    plan: RegularizationPlan

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "plan": self.plan.to_dict(),
            "rows": [
                {
                    "delta": r.delta,
                    "alpha": r.alpha,
                    "error_h_sigma": r.error_h_sigma,
                    "error_b_r": r.error_b_r,
                    "objective": r.objective,
                    "iterations": r.iterations,
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["delta", "alpha", "error_h_sigma", "error_b_r"])
        for r in self.rows:
            w.writerow([repr(r.delta), repr(r.alpha), repr(r.error_h_sigma), repr(r.error_b_r)])
        return buf.getvalue()


def run_rate_experiment(cfg: ExperimentConfig, backend: str | None = None) -> RateReport:
    """Solve the diagonal problem at every noise level and fit the H^sigma rate.

    The plan is built (and validated) before any solve, so an infeasible
    signature raises :class:`~besovreg.planner.PlanError` up front.
    """
    plan = cfg.make_plan()
    sig = cfg.signature
    J = cfg.max_level
    u_true = make_source(sig.source, J, cfg.margin, cfg.seed)
    op = DiagonalScaleOperator(cfg.eta, J)
    clean = op.apply(u_true)
    sigma = float(plan.sigma)
    B_R = plan.penalty_space
    rows = []
    for i, delta in enumerate(cfg.deltas):
        data = add_noise(clean, delta, cfg.seed, i)
        alpha = cfg.alpha_constant * delta
        rep = solve_diagonal(op, data.noisy, PenaltySpec(B_R, alpha), backend=backend)
        err = rep.minimizer - u_true
        rows.append(
            RateRow(
                delta=delta,
                alpha=alpha,
                error_h_sigma=sobolev_norm(err, sigma, B_R.d),
                error_b_r=besov_norm(err, B_R),
                objective=rep.objective,
                iterations=rep.iterations,
            )
        )
    slope, intercept, r2 = fit_log_log_slope(
        [r.delta for r in rows], [r.error_h_sigma for r in rows]
    )
    return RateReport(tuple(rows), slope, intercept, r2, sigma, plan)
