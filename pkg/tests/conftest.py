import sys
from fractions import Fraction as Q
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from besovreg import kernels  # noqa: E402
from besovreg.planner import ProblemSignature  # noqa: E402
from besovreg.spaces import BesovSpace, CoefField, field_size  # noqa: E402


def random_field(rng, max_level, scale=1.0):
    return CoefField(max_level, scale * rng.standard_normal(field_size(max_level)))


@st.composite
def fields(draw, max_level=st.integers(0, 6)):
    J = draw(max_level)
    vals = draw(
        st.lists(
            st.floats(-1e3, 1e3, allow_nan=False, allow_subnormal=False),
            min_size=field_size(J),
            max_size=field_size(J),
        )
    )
    return CoefField(J, vals)


@st.composite
def spaces(draw, p_min=1.0, p_max=4.0):
    s = draw(st.floats(-3, 3, allow_nan=False))
    p = draw(st.floats(p_min, p_max, allow_nan=False))
    return BesovSpace(s, p, 1)


def _rat(rng, lo, hi, den=24):
    """Random rational in [lo, hi] with denominator ``den``."""
    return Q(int(rng.integers(int(np.ceil(lo * den)), int(np.floor(hi * den)) + 1)), den)


def random_signature(rng, strict_p=False, exact=True):
    """A random ProblemSignature satisfying every planner invariant.

    With ``strict_p`` the source index is strictly below ``min(p_D, p_G)``.
    """
    while True:
        d = int(rng.integers(1, 4))
        p_D = _rat(rng, 1.1, 4)
        p_Dstar = p_D / (p_D - 1)
        s_D = _rat(rng, -3, 3)
        ddim_Dstar = -s_D - d / p_Dstar
        if rng.random() < 0.3:
            # range of the adjoint equal to the dual of the domain
            p_G, gap_G = p_Dstar, Q(0)
        else:
            p_G, gap_G = _rat(rng, 1, min(p_Dstar, 6)), _rat(rng, 1 / 24, 2)
        if p_G > min(p_Dstar, 6):
            continue
        s_G = ddim_Dstar + gap_G + d / p_G
        hi = min(p_D, p_G)
        p_S = _rat(rng, 1, hi)
        if p_S > hi or (strict_p and p_S >= hi):
            continue
        ddim_D = s_D - d / p_D
        s_S = ddim_D + _rat(rng, 1 / 24, 3) + d / p_S
        eps = Q(1, 10 ** int(rng.integers(3, 7)))
        conv = (lambda x: x) if exact else float
        sig = ProblemSignature(
            BesovSpace(conv(s_D), conv(p_D), d),
            BesovSpace(conv(s_G), conv(p_G), d),
            BesovSpace(conv(s_S), conv(p_S), d),
            epsilon=conv(eps),
        )
        return sig


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture(params=kernels.available_backends())
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if rep.when != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                lines.append((props["criterion"], outcome, props.get("detail", "")))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, outcome, detail in sorted(lines):
            terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  criterion {num:>2}  {detail}")
