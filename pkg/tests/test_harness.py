import json
import random
from fractions import Fraction

import pytest

from conftest import D, ONE, THREE, TWO, anchored, form, mono
from torcalc.errors import GeneratorExhausted, MalformedInput, ScenarioError, UnsupportedCase
from torcalc.forms import is_prepared
from torcalc.harness import cli
from torcalc.harness.generate import (RNG_NAME, TEMPLATES, Bounds, generate_bform, generate_prepared,
                                      generate_space, generate_toroidal_three, make_rng)
from torcalc.harness.io import (SCENARIO_SCHEMA, Config, Scenario, dump_form, dumps_report, load_form,
                                load_scenario, parse_rational, stringify)
from torcalc.harness.oracles import check_rewrite, oracle_quotient
from torcalc.harness.recipes import SPECIALIZATIONS, applicable, specialize, swap_uv
from torcalc.harness.scan import semicontinuity_scan
from torcalc.harness.scenario import run_scenario
from torcalc.harness.suite import SuiteConfig, run_suite


def v_unit_instance():
    return generate_space(random.Random("scan/50"), Bounds(), False, D)


class TestGenerator:
    def test_prepared_by_construction(self):
        f = generate_prepared(1, Bounds(), degree=D)
        assert f.provenance.startswith("generated:")
        is_prepared(f)

    def test_same_seed_same_form(self):
        for t in TEMPLATES:
            assert generate_prepared(7, Bounds(), t, D) == generate_prepared(7, Bounds(), t, D)
        assert generate_bform(3, Bounds(), degree=D) == generate_bform(3, Bounds(), degree=D)

    def test_seed_accepts_rng_or_int(self):
        assert make_rng(5).random() == make_rng(random.Random(5)).random()

    def test_small_bounds_exhaust(self):
        with pytest.raises(GeneratorExhausted):
            generate_prepared(1, Bounds(max_exponent=1, retries=50), "plane_swapped", D)

    def test_bounds_validated(self):
        with pytest.raises(MalformedInput):
            Bounds(max_exponent=7)
        with pytest.raises(MalformedInput):
            Bounds(max_coeff=10)

    def test_coefficients_within_bounds(self):
        b = Bounds(max_coeff=3)
        for s in range(30):
            f = generate_prepared(s, b, "line_pair", D)
            for t in f.w.terms:
                for c in t.coeff.terms.values():
                    assert abs(c.numerator) <= 3 and c.denominator <= 3


class TestIO:
    def test_round_trip(self):
        rng = random.Random("io")
        for _ in range(50):
            f = generate_prepared(rng, Bounds(), degree=D)
            again = load_form(json.loads(json.dumps(dump_form(f))), degree=D)
            assert again == f

    def test_rationals_are_strings(self):
        assert parse_rational("-3/4") == Fraction(-3, 4)
        assert parse_rational(2) == 2
        for bad in (0.5, True, "x"):
            with pytest.raises(ScenarioError):
                parse_rational(bad)

    def test_unknown_fields_rejected(self):
        with pytest.raises(ScenarioError, match="unknown"):
            load_scenario({"schema": SCENARIO_SCHEMA, "colour": "red"})
        doc = {"schema": SCENARIO_SCHEMA, "forms": [dump_form(generate_prepared(1, Bounds(), degree=D))]}
        doc["forms"][0]["u"]["terms"][0]["power"] = "2"
        with pytest.raises(ScenarioError, match="unknown"):
            load_scenario(doc)

    def test_schema_checked(self):
        with pytest.raises(ScenarioError):
            load_scenario({"schema": "torcalc.scenario/0"})

    def test_operation_checks(self):
        doc = {"schema": SCENARIO_SCHEMA, "forms": [], "operations": [{"op": "tau", "form": "0"}]}
        with pytest.raises(ScenarioError, match="no form"):
            load_scenario(doc)
        doc["operations"] = [{"op": "paint"}]
        with pytest.raises(ScenarioError):
            load_scenario(doc)

    def test_config(self):
        scn = load_scenario({"schema": SCENARIO_SCHEMA, "config": {"seed": "18446744073709551615",
                                                                   "measure": "order",
                                                                   "bounds": {"max_exponent": "4"}}})
        assert scn.config.seed == 2 ** 64 - 1 and scn.config.measure == "order"
        assert scn.config.max_exponent == 4
        with pytest.raises(ScenarioError):
            load_scenario({"schema": SCENARIO_SCHEMA, "config": {"seed": str(2 ** 64)}})

    def test_report_text_is_canonical(self):
        rep = {"b": [Fraction(1, 2), 3], "a": True}
        text = dumps_report(rep)
        assert text.endswith("\n")
        assert json.loads(text) == {"a": True, "b": ["1/2", "3"], "schema": "torcalc.report/1"}
        assert stringify((1, None)) == ["1", None]


class TestOracle:
    def test_examples(self):
        assert oracle_quotient([(1, 0), (0, 1)], [(2, 1), (1, 2)]) == 3
        assert oracle_quotient([(1, 0), (0, 1)], [(1, 0), (0, 1)]) == 1
        assert oracle_quotient([(2, 0), (0, 1)], [(4, 0), (0, 1)]) == 2


class TestScan:
    def test_toroidal(self):
        f = generate_toroidal_three(random.Random("scan"), Bounds(), D)
        rep = semicontinuity_scan(f, degree=D)
        assert rep.entries and rep.holds
        assert all(e.tau_generic.is_neg_infinity and e.tau_special.is_neg_infinity for e in rep.entries)

    def test_independent_rows(self):
        f = generate_space(random.Random("scan/independent"), Bounds(), False, D)
        rep = semicontinuity_scan(f, "independent", degree=D)
        assert rep.entries and rep.holds
        assert all(e.oracle in ("passed", "indeterminate") for e in rep.entries)

    def test_v_unit(self):
        rep = semicontinuity_scan(v_unit_instance(), "v_unit", degree=D)
        assert rep.entries and rep.holds

    def test_every_recipe_is_reachable(self):
        seen = set()
        rng = random.Random("recipes")
        for _ in range(80):
            f = generate_toroidal_three(rng, Bounds(), D) if rng.random() < 0.2 else \
                generate_space(rng, Bounds(), rng.random() < 0.4, D)
            seen.update(s.recipe for s in applicable(f))
        assert seen == set(SPECIALIZATIONS)

    def test_unknown_recipe(self):
        with pytest.raises(UnsupportedCase):
            semicontinuity_scan(v_unit_instance(), "sideways", degree=D)

    def test_rewrites_verified_by_substitution(self):
        f = v_unit_instance()
        for s in applicable(f):
            rw = specialize(f, s, (Fraction(1),) * (2 if s.recipe.startswith("one_point") else 1), D)
            assert rw.holds
            assert check_rewrite(rw, D, "length").ok

    def test_swap_recipe(self):
        f = generate_prepared(4, Bounds(), "line_pair", D)
        rw = swap_uv(f, D)
        assert rw.tau_before == rw.tau_after


class TestSuite:
    def test_empty(self):
        rep = run_suite(SuiteConfig(count=0))
        assert rep.passed and rep.defects == []
        assert all(c == {"pass": 0, "fail": 0, "skip": 0} for c in rep.counts.values())

    def test_deterministic(self):
        cfg = SuiteConfig(seed=42, count=5)
        a, b = run_suite(cfg).to_json(), run_suite(cfg).to_json()
        assert a == b and a["rng"] == RNG_NAME
        assert dumps_report(a) == dumps_report(b)

    def test_workers_do_not_change_the_report(self):
        cfg = SuiteConfig(seed=3, count=4, properties=("tau_total", "descent"))
        assert run_suite(cfg).to_json() == run_suite(SuiteConfig(**{**cfg.__dict__, "workers": 2})).to_json()

    def test_negative_control_is_reported(self):
        rep = run_suite(SuiteConfig(count=5, properties=("lattice_oracle",), negative_control=True))
        assert not rep.passed
        assert rep.defects and all(d["property"] == "negative_control" for d in rep.defects)

    def test_unknown_property(self):
        with pytest.raises(KeyError):
            run_suite(SuiteConfig(count=1, properties=("nope",)))


def _scenario_file(tmp_path, forms, ops, config=None):
    doc = stringify(Scenario(forms, ops, config or Config()).to_json())
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(doc))
    return str(path)


class TestScenario:
    def forms(self):
        good = form(ONE, ONE, mono((2, 0, 0)), mono((0, 1, 0)), anchored([((3, 1, 0), 1)], (4, 0, 0), 1))
        return [good, v_unit_instance()]

    def test_report_contents(self):
        ops = [{"op": "classify", "form": 0}, {"op": "tau", "form": 1}, {"op": "scan", "form": 1},
               {"op": "oracle", "H": [(1, 0), (0, 1)], "A": [(2, 1), (1, 2)]},
               {"op": "tau", "form": 0}]
        scn = Scenario(self.forms(), ops, Config())
        rep = run_scenario(scn)
        assert rep["summary"] == {"operations": 5, "failed": 0, "errors": 0}
        verdicts = rep["operations"][0]["result"]
        assert verdicts["good"]["holds"] and verdicts["prepared"]["holds"]
        assert not verdicts["toroidal"]["holds"]
        assert rep["operations"][3]["result"]["order"] == 3
        assert rep["operations"][4]["result"]["tau"] == 1

    def test_errors_are_recorded(self):
        bad = form(ONE, ONE, mono((1, 0, 0)), mono((1, 0, 0)), mono((0, 0, 1)))
        rep = run_scenario(Scenario([bad], [{"op": "tau", "form": 0}], Config()))
        assert rep["operations"][0]["status"] == "error"
        assert rep["summary"]["errors"] == 1

    def test_same_scenario_same_bytes(self, tmp_path):
        path = _scenario_file(tmp_path, self.forms(), [{"op": "scan", "form": 1}], Config(seed=9))
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert cli.main(["scan", "--input", path, "--output", str(out1)]) == 0
        assert cli.main(["scan", "--input", path, "--output", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestCLI:
    def test_tau(self, tmp_path, capsys):
        path = _scenario_file(tmp_path, TestScenario().forms(), [])
        assert cli.main(["tau", "--input", path]) == 0
        out = capsys.readouterr().out
        assert "tau = 1" in out

    def test_blowup(self, tmp_path, capsys):
        from torcalc.blowup import line_w_form
        ops = [{"op": "blowup", "form": 0, "center": "SourceCurve", "chart": "translate", "alpha": "0"}]
        path = _scenario_file(tmp_path, [line_w_form(5, 2, 3, 1)], ops)
        assert cli.main(["blowup", "--input", path]) == 0
        assert "tau 0 -> 0" in capsys.readouterr().out

    def test_oracle_inline(self, capsys):
        assert cli.main(["oracle", "--H", "1,0;0,1", "--A", "2,1;1,2"]) == 0
        assert "order 3" in capsys.readouterr().out

    def test_suite_exit_codes(self, tmp_path):
        out = tmp_path / "suite.json"
        assert cli.main(["suite", "--count", "3", "--property", "series_algebra", "--output", str(out)]) == 0
        assert json.loads(out.read_text())["passed"] is True
        assert cli.main(["suite", "--count", "3", "--property", "series_algebra", "--negative-control"]) == 1

    def test_input_errors(self, tmp_path):
        assert cli.main(["tau", "--input", str(tmp_path / "missing.json")]) == 2
        bad = tmp_path / "bad.json"
        bad.write_text('{"schema": "torcalc.scenario/1", "forms": 3}')
        assert cli.main(["classify", "--input", str(bad)]) == 2
        with pytest.raises(SystemExit) as exc:
            cli.main(["suite", "--seed", "-4"])
        assert exc.value.code == 2
