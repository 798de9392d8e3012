"""Run the operations of a scenario and assemble the report."""

from __future__ import annotations

from ..blowup import ChartTransform, apply_chart, match_bform
from ..errors import NoMatch, TorcalcError
from ..forms import (LocalForm, classify_monomial_form, classify_pair, classify_toroidal, is_good,
                     is_prepared, is_super, is_weakly_good)
from ..tau import tau
from .generate import RNG_NAME
from .io import Scenario, dump_form
from .oracles import oracle_quotient
from .scan import semicontinuity_scan


# source blow-ups for which tau must not go up; target charts carry no such claim
MONOTONE_CENTERS = ("Source2Curve", "SourceCurve")


def _verdict(fn, f):
    try:
        c = fn(f)
    except NoMatch as exc:
        return {"holds": False, "reason": str(exc)}
    return {"holds": True, "case": c.case, "name": c.name,
            "witnesses": {str(k): v for k, v in sorted(c.witnesses.items(), key=lambda kv: str(kv[0]))}}


def describe(f: LocalForm) -> dict:
    """Every classifier verdict on f, including failed matches with their reason."""
    out = {name: _verdict(fn, f) for name, fn in (
        ("pair", classify_pair), ("toroidal", classify_toroidal), ("monomial", classify_monomial_form),
        ("prepared", is_prepared), ("super", is_super), ("good", is_good),
        ("weakly_good", is_weakly_good))}
    try:
        bf = match_bform(f)
        out["bform"] = {"holds": True, "kind": bf.kind, "params": dict(bf.params)}
    except TorcalcError as exc:
        out["bform"] = {"holds": False, "reason": str(exc)}
    return out


def tau_entry(f: LocalForm, measure: str) -> dict:
    t, cert = tau(f, measure)
    return {"tau": t.to_json(), "measure": measure, "certificate": cert.to_json()}


def transform_entry(res) -> dict:
    out = {"case": res.case, "outcome": res.outcome, "chart": res.chart.to_json(),
           "after": dump_form(res.after), "tau_before": res.tau_before.to_json(),
           "tau_after": res.tau_after.to_json(), "monotone": res.monotone}
    if res.certificate is not None:
        out["certificate"] = res.certificate.to_json()
    if res.counter_before is not None:
        out["counter_before"] = res.counter_before.value
    if res.counter_after is not None:
        out["counter_after"] = res.counter_after.value
    return out


def _run_op(op: dict, scn: Scenario) -> dict:
    cfg = scn.config
    kind = op["op"]
    f = scn.forms[op["form"]] if "form" in op else None
    if kind == "classify":
        return describe(f)
    if kind == "tau":
        return tau_entry(f, cfg.measure)
    if kind == "blowup":
        chart = ChartTransform(op["center"], op["chart"], op["alpha"], op.get("beta"), op["curve"])
        return transform_entry(apply_chart(f, chart, cfg.truncation_degree, cfg.measure))
    if kind == "scan":
        rep = semicontinuity_scan(f, op.get("recipe"), cfg.seed, cfg.truncation_degree, cfg.measure)
        return rep.to_json()
    if kind == "oracle":
        return {"order": oracle_quotient(op["H"], op["A"], op.get("box", 100_000))}
    raise AssertionError(kind)


def run_scenario(scn: Scenario) -> dict:
    """Evaluate every operation; errors are recorded per operation, not raised.

    The report is a plain dict ready for :func:`io.dumps_report`.  ``failed``
    counts operations whose verdict is a violated property (a scan whose
    inequality fails, a source blow-up that raised tau); ``errors`` counts operations
    that raised.
    """
    results, failed, errors = [], 0, 0
    for i, op in enumerate(scn.operations):
        entry = {"index": i, "op": op["op"]}
        if "form" in op:
            entry["form"] = op["form"]
        try:
            entry["result"] = _run_op(op, scn)
            entry["status"] = "ok"
            r = entry["result"]
            if (op["op"] == "scan" and not r["holds"]) or (
                    op["op"] == "blowup" and op["center"] in MONOTONE_CENTERS and not r["monotone"]):
                entry["status"] = "failed"
                failed += 1
        except TorcalcError as exc:
            entry["status"] = "error"
            entry["error"] = {"type": type(exc).__name__, "message": str(exc)}
            errors += 1
        results.append(entry)
    return {"rng": RNG_NAME, "config": scn.config.to_json(),
            "forms": [dump_form(f) for f in scn.forms], "operations": results,
            "summary": {"operations": len(results), "failed": failed, "errors": errors}}
