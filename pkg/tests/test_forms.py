import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import D, ONE, THREE, TWO, anchored, form, mono, shifted, terms
from torcalc.errors import MalformedInput, NoMatch, NotGood, NotPrepared, NotSuper, NotToroidalPair
from torcalc.forms import (VARS, Expansion, Family, PointType, Term, classify_monomial_form, classify_pair,
                           classify_toroidal, classify_w, const, is_good, is_prepared, is_super,
                           is_weakly_good, normalize_w, translate_series)
from torcalc.harness.generate import TEMPLATES, Bounds, generate_prepared
from torcalc.series import TruncatedSeries
from torcalc.tau import tau

Y = Expansion.variable("y", D)
Z = Expansion.variable("z", D)


def unit(terms_):
    return TruncatedSeries(VARS, terms_, D)


class TestPointType:
    def test_divisor_variables(self):
        assert PointType.parse("OnePoint") is ONE
        with pytest.raises(MalformedInput):
            PointType.parse("FourPoint")


class TestPairs:
    def test_plane_monomials(self):
        c = classify_pair(form(TWO, TWO, mono((2, 1, 0)), mono((1, 2, 0)), Z))
        assert c.family is Family.TOROIDAL_PAIR and c.case == "2"
        w = c.witnesses
        assert w["a"] * w["d"] - w["b"] * w["c"] == 3

    def test_line_over_line(self):
        assert classify_pair(form(ONE, ONE, mono((3, 0, 0)), Y, Z)).case == "5"

    def test_plane_power_translate(self):
        c = classify_pair(form(TWO, TWO, mono((4, 6, 0)), shifted((2, 3, 0), 1, "z"), Z))
        assert c.case == "3"
        assert (c.witnesses["k"], c.witnesses["t"], c.witnesses["a"], c.witnesses["b"]) == (2, 1, 2, 3)
        assert c.witnesses["alpha"] == 1

    def test_wrong_target(self):
        with pytest.raises(NotToroidalPair):
            classify_pair(form(TWO, ONE, mono((4, 6, 0)), shifted((2, 3, 0), 1, "z"), Z))

    def test_deterministic(self):
        f = form(TWO, TWO, mono((2, 1, 0)), mono((1, 2, 0)), Z)
        assert classify_pair(f) == classify_pair(f)


class TestToroidal:
    def test_three_point_monomials(self):
        f = form(THREE, THREE, mono((1, 1, 0)), mono((1, 0, 1)), mono((0, 1, 1)))
        assert classify_toroidal(f).case == "1"

    def test_line_over_line(self):
        assert classify_toroidal(form(ONE, ONE, mono((4, 0, 0)), Y, Z)).case == "6"

    def test_plane_over_plane(self):
        assert classify_toroidal(form(TWO, TWO, mono((2, 1, 0)), mono((1, 2, 0)), Z)).case == "4"

    def test_not_toroidal(self):
        with pytest.raises(NoMatch):
            classify_toroidal(form(ONE, ONE, mono((2, 0, 0)), Y, anchored([((3, 1, 0), 1)], (4, 0, 0), 1)))


class TestMonomialForms:
    def test_plane_power_pair(self):
        f = form(TWO, TWO, mono((2, 2, 0)), shifted((1, 1, 0), 1, "z"), mono((3, 1, 0)))
        assert classify_monomial_form(f).case == "3"

    def test_line_pair(self):
        f = form(ONE, TWO, mono((2, 0, 0)), shifted((3, 0, 0), 1, "y"), shifted((1, 0, 0), 5, "z"))
        assert classify_monomial_form(f).case == "1"

    def test_w_not_monomial(self):
        with pytest.raises(NoMatch):
            classify_monomial_form(form(ONE, TWO, mono((2, 0, 0)), shifted((3, 0, 0), 1, "y"), Y))


class TestPrepared:
    def test_three_point(self):
        w = Expansion.monomial((2, 1, 1), unit({(0, 0, 0): 1, (1, 0, 0): 1}), D)
        assert is_prepared(form(THREE, THREE, mono((1, 1, 0)), mono((1, 0, 1)), w)).case == "1"

    def test_line_with_v_carrying_z(self):
        v = Expansion.series_plus_z([((2, 0, 0), unit({(0, 0, 0): 1, (0, 1, 0): 1}))], (3, 0, 0), 0, D)
        c = is_prepared(form(ONE, TWO, mono((3, 0, 0)), v, Y))
        assert c.case == "2b"
        assert (c.witnesses["a"], c.witnesses["c"], c.witnesses["d"]) == (3, 2, 1)

    def test_rank_one(self):
        with pytest.raises(NotPrepared):
            is_prepared(form(ONE, ONE, mono((1, 0, 0)), mono((1, 0, 0)), Z))

    @pytest.mark.parametrize("template", TEMPLATES)
    def test_generated_templates_classify_back(self, template):
        rng = random.Random(f"forms/{template}")
        for _ in range(20):
            f = generate_prepared(rng, Bounds(), template, D)
            assert f.provenance == f"generated:{template}"
            try:
                classify_toroidal(f)
            except NoMatch:
                is_prepared(f)

    def test_toroidal_implies_minus_infinity(self):
        rng = random.Random("forms/toroidal")
        seen = 0
        for _ in range(200):
            f = generate_prepared(rng, Bounds(), degree=D)
            try:
                classify_toroidal(f)
            except NoMatch:
                continue
            seen += 1
            assert tau(f)[0].is_neg_infinity
        assert seen


class TestSuper:
    def test_unit_times_monomial(self):
        g = unit({(0, 0, 0): 1, (1, 0, 0): 1, (0, 1, 0): 1})
        w = Expansion((Term((3, 0, 0), g), Term((5, 0, 0), translate_series(2, "z", D))), "series_plus_z")
        f = form(ONE, TWO, mono((2, 0, 0)), shifted((1, 0, 0), 1, "y"), w)
        c = is_super(f)
        assert c.case == "1"

    def test_zero_gamma(self):
        f = form(ONE, TWO, mono((2, 0, 0)), shifted((1, 0, 0), 1, "y"), anchored([], (5, 0, 0), 2))
        assert is_super(f).case == "1"

    def test_not_super(self):
        f = form(ONE, TWO, mono((2, 0, 0)), shifted((1, 0, 0), 1, "y"), terms(((0, 1, 0), 1), ((0, 0, 1), 1)))
        with pytest.raises(NotSuper):
            is_super(f)


class TestGood:
    def test_a_does_not_divide(self):
        assert is_good(form(ONE, ONE, mono((2, 0, 0)), Y, anchored([((3, 1, 0), 1)], (4, 0, 0), 1)))

    def test_a_divides(self):
        with pytest.raises(NotGood):
            is_good(form(ONE, ONE, mono((2, 0, 0)), Y, anchored([((2, 1, 0), 1)], (4, 0, 0), 1)))

    def test_empty_sum(self):
        assert is_good(form(ONE, ONE, mono((2, 0, 0)), Y, anchored([], (4, 0, 0), 1)))

    def test_plane_lattice_filter(self):
        u, v = mono((2, 1, 0)), mono((1, 2, 0))
        assert is_good(form(TWO, TWO, u, v, anchored([((1, 1, 0), 1)], (3, 3, 0), 0)))
        with pytest.raises(NotGood):
            is_good(form(TWO, TWO, u, v, anchored([((3, 3, 0), 1)], (4, 4, 0), 0)))

    @given(st.integers(2, 5), st.integers(3, 10), st.data())
    def test_good_implies_weakly_good(self, a, n, data):
        idx = data.draw(st.lists(st.integers(1, n - 1).filter(lambda i: i % a), min_size=1, max_size=3,
                                 unique=True))
        low = [((i, data.draw(st.integers(0, 2)), 0), data.draw(st.integers(1, 5))) for i in idx]
        f = form(ONE, ONE, mono((a, 0, 0)), Y, anchored(low, (n, 0, 0), data.draw(st.integers(-3, 3))))
        assert is_good(f)
        wg = is_weakly_good(f)
        assert wg.family is Family.WEAKLY_GOOD and wg.case == "1"

    def test_weakly_good_needs_leading_index_off_the_lattice(self):
        f = form(ONE, ONE, mono((2, 0, 0)), Y, anchored([((2, 0, 0), 1), ((3, 0, 0), 1)], (5, 0, 0), 0))
        with pytest.raises(NotGood):
            is_weakly_good(f)


class TestNormalize:
    def test_line(self):
        f = form(ONE, ONE, mono((2, 0, 0)), Y, terms(((1, 0, 0), 1), ((3, 0, 1), 1), ((3, 0, 0), 1)))
        w = normalize_w(f).w
        assert w.kind == "series_plus_z"
        assert w.value(D) == f.w.value(D)
        assert [t.exponent for t in w.terms] == [(1, 0, 0), (3, 0, 0)]

    def test_bare_z(self):
        f = form(ONE, ONE, mono((2, 0, 0)), Y, Z)
        w = normalize_w(f).w
        assert [t.exponent for t in w.terms] == [(0, 0, 0)]

    def test_plane_translated(self):
        w = Expansion((Term((2, 2, 0), translate_series(1, "z", D)), Term((1, 1, 0), const(1, D))))
        f = form(TWO, TWO, mono((2, 1, 0)), mono((1, 2, 0)), w)
        assert classify_w(f).case == "2"
        g = normalize_w(f)
        assert [t.exponent for t in g.w.terms] == [(1, 1, 0), (2, 2, 0)]
        assert g.w.value(D) == f.w.value(D)
