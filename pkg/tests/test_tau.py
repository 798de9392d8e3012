import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import D, ONE, THREE, TWO, anchored, form, mono, shifted
from torcalc.errors import NoMatch, NotPrepared
from torcalc.forms import VARS, Expansion, Term, classify_toroidal
from torcalc.harness.generate import Bounds, generate_prepared, generate_space, generate_toroidal_three
from torcalc.harness.io import dump_form, load_form
from torcalc.harness.oracles import oracle_quotient
from torcalc.harness.recipes import shift_w, swap_uv
from torcalc.lattice import SubLattice, quotient
from torcalc.series import TruncatedSeries
from torcalc.tau import NEG_INF, Tau, tau, tau_prepared_region

Y = Expansion.variable("y", D)
Z = Expansion.variable("z", D)


def plane():
    return form(TWO, TWO, mono((2, 1, 0)), mono((1, 2, 0)), anchored([((1, 1, 0), 1)], (3, 3, 0), 0))


class TestExamples:
    def test_plane_over_plane(self):
        t, cert = tau(plane())
        assert t == Tau(1)
        assert SubLattice(cert.H) == SubLattice([(2, 1), (1, 2), (1, 1)])
        assert SubLattice(cert.A) == SubLattice([(2, 1), (1, 2)])
        assert cert.report.order == 3
        assert tau(plane(), "order")[0] == Tau(3, "order")

    def test_line_over_plane(self):
        f = form(ONE, TWO, mono((4, 0, 0)), shifted((2, 0, 0), 1, "y"), anchored([((3, 0, 0), 1)], (6, 0, 0), 1))
        assert tau(f)[0] == Tau(1)

    def test_toroidal(self):
        t, cert = tau(form(ONE, ONE, mono((4, 0, 0)), Y, Z))
        assert t.is_neg_infinity and t == NEG_INF and cert.case == "toroidal"

    def test_all_indices_inside(self):
        low = [((2, 0, 0), TruncatedSeries(VARS, {(0, 0, 0): 1, (0, 1, 0): 1}, D))]
        f = form(ONE, ONE, mono((2, 0, 0)), Y, anchored(low, (4, 0, 0), 1))
        assert tau(f)[0] == Tau(0)

    def test_not_prepared(self):
        with pytest.raises(NotPrepared):
            tau(form(ONE, ONE, mono((1, 0, 0)), mono((1, 0, 0)), Z))

    def test_unknown_measure(self):
        with pytest.raises(ValueError):
            tau(plane(), "volume")

    def test_ordering(self):
        assert NEG_INF < Tau(0) < Tau(1)
        assert max(NEG_INF, Tau(0)) == Tau(0)


class TestRegion:
    def test_one_point_targets_only(self):
        f = form(ONE, ONE, mono((2, 0, 0)), Y, anchored([((3, 1, 0), 1)], (4, 0, 0), 1))
        t = tau(f)[0].value
        assert tau_prepared_region([f], t)["tau_prepared"]

    def test_three_point_offends(self):
        f = generate_space(random.Random("region"), Bounds(), False, D)
        t = tau(f)[0].value
        rep = tau_prepared_region([plane(), f], t)
        assert not rep["tau_prepared"] and 1 in rep["offending"]

    def test_empty(self):
        assert tau_prepared_region([], 3)["tau_prepared"]


def _certificate_value(cert, measure):
    rep = quotient(SubLattice(cert.H), SubLattice(cert.A))
    return rep.measure(measure)


@given(st.integers(0, 10 ** 6), st.sampled_from(["length", "order"]))
def test_generated_forms_have_finite_certified_tau(seed, measure):
    f = generate_prepared(random.Random(seed), Bounds(), degree=D)
    t, cert = tau(f, measure)
    try:
        classify_toroidal(f)
        assert t.is_neg_infinity
        return
    except NoMatch:
        pass
    assert t.value is not None and t.value >= 0
    assert cert.report.finite
    assert _certificate_value(cert, measure) == t.value
    assert oracle_quotient(cert.H, cert.A) == cert.report.order
    assert tau(load_form(dump_form(f), degree=D), measure)[0] == t


@given(st.integers(0, 10 ** 6))
def test_orderings_agree_over_three_point_targets(seed):
    rng = random.Random(seed)
    f = generate_toroidal_three(rng, Bounds(), D) if seed % 5 == 0 else generate_space(rng, Bounds(), seed % 2 == 0, D)
    t, cert = tau(f)  # raises TauDisagreement if two orderings differ
    assert all(v == t.to_json() for _, v in cert.alternatives)


@given(st.integers(0, 10 ** 6))
def test_independent_of_parameter_choice(seed):
    rng = random.Random(seed)
    f = generate_prepared(rng, Bounds(), "line_pair", D)
    assert swap_uv(f, D).holds
    assert shift_w(f, {(1, 0): Fraction(rng.randint(1, 3))}, D).holds


def test_length_never_exceeds_order():
    rng = random.Random("measures")
    for _ in range(50):
        f = generate_space(rng, Bounds(), False, D)
        a, b = tau(f, "length")[0], tau(f, "order")[0]
        assert a.value <= b.value
