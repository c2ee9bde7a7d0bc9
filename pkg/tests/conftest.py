import os
import sys
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

from colemantrace.acceptance import context, kw_pair  # noqa: E402

settings.register_profile("ci", max_examples=25, deadline=None)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def c1():
    return context("C1", 40, 16, 8)


@pytest.fixture(scope="session")
def c3():
    return context("C3", 40, 16, 8)


@pytest.fixture(scope="session")
def c1_kw():
    return kw_pair("C1", 40, 16, 8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def matches(el, fr: Fraction, N: int) -> bool:
    """el == fr mod pi^N for an element of a ring containing Z_p."""
    R = el.ring
    return (el * R.element(fr.denominator) - R.element(fr.numerator)).valuation() >= N
