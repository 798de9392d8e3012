from fractions import Fraction

import pytest
from hypothesis import settings

from torcalc.forms import Expansion, LocalForm, PointType, Term, const, translate_series
from torcalc.series import DEFAULT_DEGREE

settings.register_profile("torcalc", deadline=None, max_examples=100)
settings.load_profile("torcalc")

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE
D = DEFAULT_DEGREE


def mono(p, c=1):
    return Expansion.monomial(tuple(p), const(Fraction(c), D), D)


def shifted(p, alpha, name):
    """x^p (name + alpha)."""
    return Expansion.translate(tuple(p), Fraction(alpha), name, D)


def terms(*items):
    """Sum of (exponent, coefficient-series-or-rational) pairs."""
    return Expansion.indexed_sum([(tuple(p), c) for p, c in items], degree=D)


def anchored(low, p, beta):
    """sum of low terms + x^p (z + beta)."""
    return Expansion.series_plus_z([(tuple(q), c) for q, c in low], tuple(p), Fraction(beta), D)


def form(source, target, u, v, w, provenance=None):
    return LocalForm(source, target, u, v, w, provenance)


@pytest.fixture
def z_plus():
    return lambda beta: translate_series(Fraction(beta), "z", D)
