from __future__ import annotations

import warnings

import numpy as np
import pytest

from ratl2.cauchy import MeasureM, RationalPart, TargetFunction
from ratl2.errors import ConditioningWarning

warnings.simplefilter("ignore", ConditioningWarning)


@pytest.fixture(scope="session")
def markov():
    """Constant density on [-0.4, 0.4]."""
    return TargetFunction(MeasureM.constant(-0.4, 0.4))


@pytest.fixture(scope="session")
def half():
    """Constant density on [-1/2, 1/2]; its Cauchy transform is 1/w."""
    return TargetFunction(MeasureM.constant(-0.5, 0.5))


@pytest.fixture(scope="session")
def twisted():
    """Density exp(0.3 i t) on [-0.4, 0.4]."""
    return TargetFunction(MeasureM.from_expr(-0.4, 0.4, "exp(0.3j*t)"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pole(c: complex) -> TargetFunction:
    return TargetFunction(None, RationalPart.simple(c))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for k in sorted(results):
            terminalreporter.write_line(results[k])
