"""JSON scenario and report format.

Documents carry a ``schema`` field.  Integers and rationals are written as
decimal strings (``"3"``, ``"-2/5"``) so nothing passes through floating
point; on input, JSON integers are accepted as well, floats never.  Unknown
keys are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from ..errors import ScenarioError, TorcalcError
from ..forms import VARS, Expansion, LocalForm, PointType, Term
from ..series import DEFAULT_DEGREE, TruncatedSeries

SCENARIO_SCHEMA = "torcalc.scenario/1"
REPORT_SCHEMA = "torcalc.report/1"
MEASURES = ("length", "order")
OPERATIONS = ("classify", "tau", "blowup", "scan", "oracle")


# scalars

def parse_int(x, what="integer") -> int:
    if isinstance(x, bool):
        raise ScenarioError(f"{what}: expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            return int(x.strip(), 10)
        except ValueError:
            pass
    raise ScenarioError(f"{what}: expected an integer, got {x!r}")


def parse_rational(x, what="rational") -> Fraction:
    if isinstance(x, bool) or isinstance(x, float):
        raise ScenarioError(f"{what}: expected a decimal string, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise ScenarioError(f"{what}: expected a rational such as \"-3/4\", got {x!r}")


def rational_str(c) -> str:
    return str(Fraction(c))


def _keys(obj, what, required, optional=()):
    if not isinstance(obj, dict):
        raise ScenarioError(f"{what}: expected an object")
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ScenarioError(f"{what}: unknown field(s) {sorted(unknown)}")
    missing = [k for k in required if k not in obj]
    if missing:
        raise ScenarioError(f"{what}: missing field(s) {missing}")


def _vector(x, what, n=3):
    if not isinstance(x, list) or len(x) != n:
        raise ScenarioError(f"{what}: expected a list of {n} integers")
    return tuple(parse_int(a, what) for a in x)


# series, expansions, forms

def dump_series(s: TruncatedSeries) -> dict:
    terms = []
    for m in s.support():
        c = s.terms[m]
        terms.append({"exponent": [str(k) for k in m], "numerator": str(c.numerator),
                      "denominator": str(c.denominator)})
    return {"degree": str(s.degree), "terms": terms}


def load_series(obj, what="series", degree=DEFAULT_DEGREE) -> TruncatedSeries:
    if isinstance(obj, (str, int)) and not isinstance(obj, bool):
        return TruncatedSeries.constant(parse_rational(obj, what), VARS, degree)
    _keys(obj, what, ("terms",), ("degree",))
    deg = parse_int(obj.get("degree", degree), f"{what}.degree")
    if not isinstance(obj["terms"], list):
        raise ScenarioError(f"{what}.terms: expected a list")
    terms = {}
    for i, t in enumerate(obj["terms"]):
        tw = f"{what}.terms[{i}]"
        _keys(t, tw, ("exponent", "numerator"), ("denominator",))
        m = _vector(t["exponent"], f"{tw}.exponent")
        if min(m) < 0:
            raise ScenarioError(f"{tw}.exponent: negative entry")
        den = parse_int(t.get("denominator", "1"), f"{tw}.denominator")
        if den == 0:
            raise ScenarioError(f"{tw}.denominator: zero")
        terms[m] = terms.get(m, 0) + Fraction(parse_int(t["numerator"], f"{tw}.numerator"), den)
    return TruncatedSeries(VARS, terms, deg)


EXPANSION_KINDS = ("monomial", "translate", "series_plus_z", "indexed_sum", "raw")


def dump_expansion(e: Expansion) -> dict:
    return {"kind": e.kind, "exact": e.exact,
            "terms": [{"exponent": [str(k) for k in t.exponent], "coeff": dump_series(t.coeff)}
                      for t in e.terms]}


def load_expansion(obj, what="expansion", degree=DEFAULT_DEGREE) -> Expansion:
    _keys(obj, what, ("kind", "terms"), ("exact",))
    kind = obj["kind"]
    if kind not in EXPANSION_KINDS:
        raise ScenarioError(f"{what}.kind: one of {EXPANSION_KINDS}, got {kind!r}")
    exact = obj.get("exact", True)
    if not isinstance(exact, bool):
        raise ScenarioError(f"{what}.exact: expected true or false")
    if not isinstance(obj["terms"], list):
        raise ScenarioError(f"{what}.terms: expected a list")
    terms = []
    for i, t in enumerate(obj["terms"]):
        tw = f"{what}.terms[{i}]"
        _keys(t, tw, ("exponent", "coeff"))
        p = _vector(t["exponent"], f"{tw}.exponent")
        try:
            terms.append(Term(p, load_series(t["coeff"], f"{tw}.coeff", degree)))
        except TorcalcError as exc:
            raise ScenarioError(f"{tw}: {exc}") from exc
    return Expansion(tuple(terms), kind, exact)


def dump_form(f: LocalForm) -> dict:
    out = {"source": f.source.value, "target": f.target.value,
           "u": dump_expansion(f.u), "v": dump_expansion(f.v), "w": dump_expansion(f.w)}
    if f.provenance is not None:
        out["provenance"] = f.provenance
    return out


def load_form(obj, what="form", degree=DEFAULT_DEGREE) -> LocalForm:
    _keys(obj, what, ("source", "target", "u", "v", "w"), ("provenance",))
    try:
        source, target = PointType.parse(obj["source"]), PointType.parse(obj["target"])
    except TorcalcError as exc:
        raise ScenarioError(f"{what}: {exc}") from exc
    prov = obj.get("provenance")
    if prov is not None and not isinstance(prov, str):
        raise ScenarioError(f"{what}.provenance: expected a string")
    return LocalForm(source, target, *(load_expansion(obj[k], f"{what}.{k}", degree) for k in "uvw"),
                     prov)


# scenarios

@dataclass
class Config:
    truncation_degree: int = DEFAULT_DEGREE
    measure: str = "length"
    seed: int = 0
    count: int = 200
    max_exponent: int = 6
    max_terms: int = 8
    max_coeff: int = 9

    def __post_init__(self):
        if self.measure not in MEASURES:
            raise ScenarioError(f"measure must be one of {MEASURES}")
        if self.truncation_degree < 1:
            raise ScenarioError("truncation degree must be positive")
        if self.count < 0:
            raise ScenarioError("count must be non-negative")
        if not 0 <= self.seed < 2 ** 64:
            raise ScenarioError("seed must be an unsigned 64-bit integer")

    def to_json(self) -> dict:
        return {"truncation_degree": str(self.truncation_degree), "measure": self.measure,
                "seed": str(self.seed), "count": str(self.count),
                "bounds": {"max_exponent": str(self.max_exponent), "max_terms": str(self.max_terms),
                           "max_coeff": str(self.max_coeff)}}


def load_config(obj) -> Config:
    _keys(obj, "config", (), ("truncation_degree", "measure", "seed", "count", "bounds"))
    kw = {}
    for k in ("truncation_degree", "seed", "count"):
        if k in obj:
            kw[k] = parse_int(obj[k], f"config.{k}")
    if "measure" in obj:
        kw["measure"] = obj["measure"]
    if "bounds" in obj:
        b = obj["bounds"]
        _keys(b, "config.bounds", (), ("max_exponent", "max_terms", "max_coeff"))
        for k in b:
            kw[k] = parse_int(b[k], f"config.bounds.{k}")
    return Config(**kw)


_OP_FIELDS = {
    "classify": ("form",),
    "tau": ("form",),
    "blowup": ("form", "center", "chart", "alpha", "beta", "curve"),
    "scan": ("form", "recipe"),
    "oracle": ("H", "A", "box"),
}


@dataclass
class Scenario:
    forms: list = field(default_factory=list)
    operations: list = field(default_factory=list)
    config: Config = field(default_factory=Config)

    def to_json(self) -> dict:
        return {"schema": SCENARIO_SCHEMA, "forms": [dump_form(f) for f in self.forms],
                "operations": self.operations, "config": self.config.to_json()}


def _load_operation(obj, i, nforms):
    what = f"operations[{i}]"
    if not isinstance(obj, dict) or "op" not in obj:
        raise ScenarioError(f"{what}: expected an object with an \"op\" field")
    op = obj["op"]
    if op not in OPERATIONS:
        raise ScenarioError(f"{what}.op: one of {OPERATIONS}, got {op!r}")
    _keys(obj, what, ("op",), _OP_FIELDS[op])
    out = {"op": op}
    if "form" in obj:
        k = parse_int(obj["form"], f"{what}.form")
        if not 0 <= k < nforms:
            raise ScenarioError(f"{what}.form: no form number {k}")
        out["form"] = k
    if op == "blowup":
        for k in ("center", "chart"):
            if k not in obj:
                raise ScenarioError(f"{what}: blowup needs \"{k}\"")
            out[k] = str(obj[k])
        out["alpha"] = parse_rational(obj.get("alpha", "0"), f"{what}.alpha")
        if obj.get("beta") is not None:
            out["beta"] = parse_rational(obj["beta"], f"{what}.beta")
        out["curve"] = str(obj.get("curve", "x"))
    elif op == "scan":
        if "recipe" in obj:
            out["recipe"] = str(obj["recipe"])
    elif op == "oracle":
        for k in ("H", "A"):
            if k not in obj or not isinstance(obj[k], list):
                raise ScenarioError(f"{what}: oracle needs a list \"{k}\"")
            vecs = []
            for j, v in enumerate(obj[k]):
                if not isinstance(v, list):
                    raise ScenarioError(f"{what}.{k}[{j}]: expected a list of integers")
                vecs.append(tuple(parse_int(a, f"{what}.{k}[{j}]") for a in v))
            out[k] = vecs
        if "box" in obj:
            out["box"] = parse_int(obj["box"], f"{what}.box")
    return out


def load_scenario(obj, truncation_degree: int | None = None) -> Scenario:
    """Parse a scenario document; ``truncation_degree`` overrides its config."""
    _keys(obj, "scenario", ("schema",), ("forms", "operations", "config"))
    if obj["schema"] != SCENARIO_SCHEMA:
        raise ScenarioError(f"unsupported schema {obj['schema']!r}; expected {SCENARIO_SCHEMA!r}")
    config = load_config(obj.get("config", {}))
    if truncation_degree is not None:
        config = replace(config, truncation_degree=truncation_degree)
    forms_in = obj.get("forms", [])
    if not isinstance(forms_in, list):
        raise ScenarioError("forms: expected a list")
    forms = [load_form(f, f"forms[{i}]", config.truncation_degree) for i, f in enumerate(forms_in)]
    ops_in = obj.get("operations", [])
    if not isinstance(ops_in, list):
        raise ScenarioError("operations: expected a list")
    ops = [_load_operation(o, i, len(forms)) for i, o in enumerate(ops_in)]
    return Scenario(forms, ops, config)


def read_scenario(path, truncation_degree: int | None = None) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path} is not valid JSON: {exc}") from exc
    return load_scenario(obj, truncation_degree)


# reports

def stringify(obj):
    """Numbers to decimal strings throughout a JSON-ready structure."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, Fraction)):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [stringify(v) for v in obj]
    if hasattr(obj, "to_json"):
        return stringify(obj.to_json())
    return str(obj)


def dumps_report(report: dict) -> str:
    """Canonical text of a report: sorted keys, fixed indentation, final newline."""
    body = dict(report, schema=REPORT_SCHEMA)
    return json.dumps(stringify(body), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
