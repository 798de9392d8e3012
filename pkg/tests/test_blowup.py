import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import D, ONE, THREE, TWO, anchored, form, mono
from torcalc.blowup import (ChartTransform, apply_chart, blow_source_2curve, blow_target_point_chart,
                            blowup_curves, bform_is_good, curve_blowup_step, descent_counter, line_v_form, line_w_form,
                            match_bform, plane_v_form, plane_w_form)
from torcalc.errors import (ChartMismatch, ConstraintViolated, Indeterminate, MalformedInput, NoMatch, NotABForm,
                            UnrepresentableConstant, UnsupportedCase)
from torcalc.forms import VARS, Expansion, Term, classify_pair, classify_toroidal, is_prepared, translate_series
from torcalc.harness.generate import Bounds, chart_constant, generate_bform, generate_space
from torcalc.harness.oracles import check_chart
from torcalc.series import TruncatedSeries
from torcalc.tau import Tau

Y = Expansion.variable("y", D)


def curve(chart, alpha=0, curve_="x"):
    return ChartTransform("SourceCurve", chart, Fraction(alpha), curve=curve_)


def two_curve(chart, alpha=0):
    return ChartTransform("Source2Curve", chart, Fraction(alpha))


def verified(res, undecidable_ok=False):
    """Check res against direct substitution; beyond the truncation only if allowed."""
    try:
        chk = check_chart(res, D, "length")
    except Indeterminate:
        if undecidable_ok:
            return res
        raise
    assert chk.ok, chk.problems
    return res


class TestTwoCurve:
    def test_untranslated_chart_shifts_exponents(self):
        f = form(THREE, TWO, mono((2, 1, 1)), mono((1, 2, 1)), anchored([((1, 1, 1), 1)], (2, 2, 2), 0))
        res = verified(blow_source_2curve(f, two_curve("x")))
        assert res.case == "3"
        # x = x1, y = x1 y1: the x exponent becomes the x + y row sum
        assert [t.exponent for t in res.after.u.terms] == [(3, 1, 1)]
        assert [t.exponent for t in res.after.v.terms] == [(3, 2, 1)]
        assert res.tau_after <= res.tau_before

    def test_independent_rows_translated(self):
        rng = random.Random("independent")
        f = generate_space(rng, Bounds(), False, D)
        res = verified(blow_source_2curve(f, two_curve("x", 1)))
        assert res.case == "1"
        assert classify_pair(res.after).case == "2"
        assert res.monotone

    def test_proportional_rows_translated(self):
        rng = random.Random("proportional")
        for _ in range(20):
            f = generate_space(rng, Bounds(), True, D)
            try:
                res = blow_source_2curve(f, two_curve("x", 1))
            except UnsupportedCase:
                continue
            verified(res, undecidable_ok=True)
            assert res.case == "2"
            assert classify_pair(res.after).case == "3"
            assert res.monotone
            return
        pytest.fail("no proportional instance with a z term drawn")

    def test_toroidal_stays_toroidal(self):
        f = form(THREE, THREE, mono((1, 1, 0)), mono((1, 0, 1)), mono((0, 1, 1)))
        res = blow_source_2curve(f, two_curve("x"))
        assert res.tau_before.is_neg_infinity and res.tau_after.is_neg_infinity
        classify_toroidal(res.after)

    @given(st.integers(0, 10 ** 6), st.booleans(), st.sampled_from("xy"), st.booleans())
    def test_prepared_monotone_and_verified(self, seed, proportional, chart, translated):
        rng = random.Random(seed)
        f = generate_space(rng, Bounds(), proportional, D)
        alpha = chart_constant(rng, Bounds()) if translated else Fraction(0)
        try:
            res = blow_source_2curve(f, two_curve(chart, alpha))
        except (UnsupportedCase, UnrepresentableConstant):
            return
        is_prepared(res.after)
        assert res.tau_after <= res.tau_before
        verified(res, undecidable_ok=True)


class TestTargetCharts:
    def form(self):
        phi = TruncatedSeries(VARS, {(0, 0, 0): 2, (0, 1, 0): 1}, D)
        w = Expansion((Term((3, 0, 0), phi), Term((5, 0, 0), translate_series(1, "z", D))))
        return form(ONE, ONE, mono((3, 0, 0)), Y, w)

    def test_divide_by_u(self):
        res = verified(blow_target_point_chart(self.form(), ChartTransform("TargetCurve", "translate", 2)))
        expect = TruncatedSeries(VARS, {(0, 1, 0): 1, (2, 0, 0): 1, (2, 0, 1): 1}, D)
        assert res.after.w.value(D) == expect
        assert res.after.u == self.form().u

    def test_wrong_constant(self):
        with pytest.raises(ChartMismatch):
            blow_target_point_chart(self.form(), ChartTransform("TargetCurve", "translate", 3))

    def test_output_toroidal(self):
        w = Expansion.monomial((4, 0, 0), translate_series(1, "z", D), D)
        res = verified(blow_target_point_chart(form(ONE, ONE, mono((4, 0, 0)), Y, w),
                                               ChartTransform("TargetCurve", "translate", 1)))
        assert res.outcome == "toroidal"

    def test_unknown_chart(self):
        with pytest.raises(MalformedInput):
            blow_target_point_chart(self.form(), ChartTransform("TargetCurve", "sideways", 2))


class TestCurveSteps:
    def test_reentry_raises_d(self):
        res = verified(curve_blowup_step(line_w_form(5, 2, 3, 1), curve("translate")))
        assert res.outcome == "bform"
        assert match_bform(res.after).params["d"] == 4
        assert (res.counter_before.value, res.counter_after.value) == (2, 1)

    def test_terminal(self):
        res = verified(curve_blowup_step(line_w_form(5, 2, 4, 1), curve("translate", 1)))
        assert res.outcome == "toroidal" and res.tau_after.is_neg_infinity

    def test_exchange_to_three_point(self):
        res = verified(curve_blowup_step(plane_w_form(2, 2, 1, 3, 1, 1), curve("exchange")))
        assert res.after.source is THREE and res.outcome == "toroidal"

    def test_line_v_steps(self):
        f = line_v_form(3, 1, 4, 1, {(1, 0): Fraction(1), (2, 1): Fraction(-2)})
        for chart, alpha in (("translate", 0), ("translate", 1), ("exchange", 0)):
            res = verified(curve_blowup_step(f, curve(chart, alpha)))
            assert res.tau_after <= res.tau_before

    def test_curve_must_be_in_center(self):
        with pytest.raises(ConstraintViolated):
            match_bform(plane_w_form(1, 1, 2, 1, 2, 0))

    def test_not_a_bform(self):
        with pytest.raises(NotABForm):
            curve_blowup_step(form(ONE, ONE, mono((2, 0, 0)), Y, anchored([], (3, 0, 0), 0)), curve("translate"))

    def test_line_forms_have_no_y_curve(self):
        with pytest.raises(UnsupportedCase):
            curve_blowup_step(line_w_form(5, 2, 3, 1), curve("translate", 0, "y"))

    def test_apply_chart_dispatch(self):
        res = apply_chart(line_w_form(5, 2, 3, 1), curve("translate"))
        assert res.outcome == "bform"


class TestDescentCounter:
    def test_line_v(self):
        assert descent_counter(line_v_form(5, 2, 7, 1, {(1, 0): 1})).value == 3

    def test_plane_v(self):
        assert descent_counter(plane_v_form(1, 1, 3, 1, 2, 5, 4, {(1, 0): 1})).value == 3

    def test_plane_w(self):
        assert descent_counter(plane_w_form(3, 2, 1, 3, 1, 1)).value == 3

    @given(st.integers(0, 10 ** 6))
    def test_chains_terminate(self, seed):
        f = generate_bform(random.Random(seed), Bounds(), degree=D)
        c0 = descent_counter(f).value
        cur, last = f, c0
        for _ in range(c0 + 1):
            res = curve_blowup_step(cur, curve("translate", 0, blowup_curves(cur)[0]))
            if res.outcome != "bform":
                return
            assert res.counter_after.value < last
            last, cur = res.counter_after.value, res.after
        pytest.fail(f"still a B-form after {c0 + 1} steps")


@given(st.integers(0, 10 ** 6))
def test_good_forms_stay_good_or_drop(seed):
    rng = random.Random(seed)
    f = generate_bform(rng, Bounds(), good=True, degree=D)
    assert bform_is_good(match_bform(f))
    for chart, alpha in (("translate", Fraction(0)), ("translate", chart_constant(rng, Bounds())),
                         ("exchange", Fraction(0))):
        try:
            res = curve_blowup_step(f, curve(chart, alpha))
        except UnrepresentableConstant:
            continue
        from torcalc.harness.suite import _w_good
        assert _w_good(res) or res.tau_after < res.tau_before
