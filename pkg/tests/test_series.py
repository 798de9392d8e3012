from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from torcalc.errors import (ConstantNotOne, DivergentSubstitution, NotAUnit, TruncationMismatch,
                            UnrepresentableConstant)
from torcalc.series import TruncatedSeries, exact_power

XY = ("x", "y")
XYZ = ("x", "y", "z")


def S(terms, degree=12, variables=XY):
    return TruncatedSeries(variables, terms, degree)


def X(d=12, v=XY):
    return TruncatedSeries.variable("x", v, d)


def Y(d=12, v=XY):
    return TruncatedSeries.variable("y", v, d)


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=5)


@st.composite
def series(draw, degree=None, unit=None, variables=XYZ):
    d = draw(st.integers(1, 12)) if degree is None else degree
    n = len(variables)
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, 3)] * n), rationals, max_size=6))
    if unit is not None:
        terms[(0,) * n] = unit if unit != "any" else draw(rationals.filter(bool))
    return TruncatedSeries(variables, terms, d)


class TestArithmetic:
    def test_difference_of_squares(self):
        assert (1 + X()) * (1 - X()) == 1 - X() ** 2

    def test_add_zero(self):
        s = S({(1, 2): 3, (0, 0): Fraction(1, 2)})
        assert s + TruncatedSeries.zero(XY) == s

    def test_hand_product_at_degree_two(self):
        got = (1 + X(2) + Y(2)) * (1 + X(2))
        assert got == S({(0, 0): 1, (1, 0): 2, (0, 1): 1, (2, 0): 1, (1, 1): 1}, 2)

    def test_truncation_drops_high_terms(self):
        assert X(3) ** 4 == TruncatedSeries.zero(XY, 3)

    def test_mixed_truncations_rejected(self):
        with pytest.raises(TruncationMismatch):
            X(3) + X(5)

    @given(series(degree=6), series(degree=6), series(degree=6))
    def test_ring_laws(self, a, b, c):
        assert (a * b) * c == a * (b * c)
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


class TestInverse:
    def test_geometric(self):
        inv = (1 + X(5)).invert_unit()
        assert inv == S({(k, 0): (-1) ** k for k in range(6)}, 5)

    def test_two_plus_x(self):
        inv = (2 + X(4)).invert_unit()
        assert inv == S({(k, 0): Fraction((-1) ** k, 2 ** (k + 1)) for k in range(5)}, 4)

    def test_one(self):
        assert TruncatedSeries.constant(1, XY).invert_unit() == TruncatedSeries.constant(1, XY)

    def test_not_a_unit(self):
        with pytest.raises(NotAUnit):
            X().invert_unit()

    @given(series(unit="any"))
    def test_inverse_property(self, u):
        one = TruncatedSeries.constant(1, XYZ, u.degree)
        assert (u * u.invert_unit()).equal_mod(one, u.degree)


class TestPowers:
    def test_square_root(self):
        r = (1 + X(2)).rational_power(Fraction(1, 2))
        assert r == S({(0, 0): 1, (1, 0): Fraction(1, 2), (2, 0): Fraction(-1, 8)}, 2)
        assert r * r == 1 + X(2)

    def test_square(self):
        assert (1 + X()).rational_power(2) == 1 + 2 * X() + X() ** 2

    def test_zero_exponent(self):
        assert (1 + X() + Y()).rational_power(0) == TruncatedSeries.constant(1, XY)

    def test_constant_must_be_one(self):
        with pytest.raises(ConstantNotOne):
            (2 + X()).rational_power(Fraction(1, 2))

    def test_unit_power_needs_a_rational_root(self):
        assert (4 + X(3)).unit_power(Fraction(1, 2)).constant_term == 2
        with pytest.raises(UnrepresentableConstant):
            (2 + X(3)).unit_power(Fraction(1, 2))
        assert exact_power(Fraction(8, 27), Fraction(-2, 3)) == Fraction(9, 4)

    @given(series(unit=Fraction(1)), st.integers(1, 5), st.integers(-5, 5))
    def test_root_then_power(self, u, q, p):
        lhs = u.rational_power(Fraction(p, q)) ** q
        rhs = u ** p if p >= 0 else u.invert_unit() ** (-p)
        assert lhs.equal_mod(rhs, u.degree)


class TestSubstitute:
    def test_monomial_chart(self):
        x1, y1 = X(), Y()
        got = (X() * Y()).substitute({"x": x1, "y": x1 * y1 + x1}, variables=XY)
        assert got == x1 ** 2 * y1 + x1 ** 2

    def test_identity(self):
        assert X().substitute({"x": X()}) == X()

    def test_hand_expansion(self):
        s = 1 + X(2) + X(2) ** 2
        got = s.substitute({"x": X(2) + Y(2)})
        assert got == S({(0, 0): 1, (1, 0): 1, (0, 1): 1, (2, 0): 1, (1, 1): 2, (0, 2): 1}, 2)

    def test_constant_image_needs_permission(self):
        with pytest.raises(DivergentSubstitution):
            (X() * Y()).substitute({"x": 1 + X()})
        got = (X() * Y()).substitute({"x": 1 + X()}, shifted=["x"])
        assert got == Y() + X() * Y()

    def test_images_must_share_truncation(self):
        with pytest.raises(TruncationMismatch):
            X().substitute({"x": X(3), "y": Y(4)})

    @given(series(degree=5), series(degree=5), series(degree=5, unit=Fraction(0)),
           series(degree=5, unit=Fraction(0)))
    def test_substitution_is_a_ring_map(self, a, b, gx, gy):
        m = {"x": gx, "y": gy}
        assert (a + b).substitute(m) == a.substitute(m) + b.substitute(m)
        assert (a * b).substitute(m) == a.substitute(m) * b.substitute(m)

    def test_revert(self):
        f = X(6) + X(6) ** 2
        r = f.revert("x")
        assert f.substitute({"x": r}) == X(6)
