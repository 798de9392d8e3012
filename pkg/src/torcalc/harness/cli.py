"""Command line: ``torcalc {classify,tau,blowup,scan,suite,oracle}``.

Exit status 0 when everything passed, 1 when a property failed, 2 when the
input could not be read or processed.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..errors import BoxTooSmall, ScenarioError, TorcalcError
from ..series import DEFAULT_DEGREE
from .generate import Bounds
from .io import MEASURES, Config, Scenario, dumps_report, parse_int, read_scenario
from .oracles import oracle_quotient
from .scenario import run_scenario
from .suite import PROPERTIES, SuiteConfig, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2
SCENARIO_COMMANDS = ("classify", "tau", "blowup", "scan")


def _u64(text):
    try:
        n = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return n


def _natural(text):
    try:
        n = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return n


def _vectors(text):
    """``"2,1;1,2"`` -> [(2, 1), (1, 2)]."""
    try:
        return [tuple(parse_int(x) for x in row.split(",")) for row in text.split(";") if row.strip()]
    except ScenarioError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="torcalc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, defaults):
        sp.add_argument("--seed", type=_u64, default=defaults.get("seed"))
        sp.add_argument("--truncation-degree", type=_natural, default=defaults.get("degree"))
        sp.add_argument("--measure", choices=MEASURES, default=defaults.get("measure"))
        sp.add_argument("--count", type=_natural, default=defaults.get("count"))
        sp.add_argument("--max-exponent", type=_natural, default=defaults.get("max_exponent"))
        sp.add_argument("--output", metavar="FILE", help="write the JSON report here ('-' for stdout)")

    for name in SCENARIO_COMMANDS:
        sp = sub.add_parser(name, help=f"run the {name} operations of a scenario file")
        sp.add_argument("--input", metavar="FILE", required=True)
        common(sp, {})  # scenario config applies unless overridden

    sp = sub.add_parser("suite", help="run the seeded property suite")
    common(sp, {"seed": 42, "degree": DEFAULT_DEGREE, "measure": "length", "count": 200, "max_exponent": 6})
    sp.add_argument("--property", action="append", choices=sorted(PROPERTIES), dest="properties")
    sp.add_argument("--negative-control", action="store_true",
                    help="add a deliberately corrupted certificate that must be reported")
    sp.add_argument("--workers", type=_natural, default=1)

    sp = sub.add_parser("oracle", help="count cosets of A in H by enumeration")
    sp.add_argument("--input", metavar="FILE", help="scenario whose oracle operations to run")
    sp.add_argument("--H", type=_vectors, help='generators of H, e.g. "1,0;0,1"')
    sp.add_argument("--A", type=_vectors, help='generators of A, e.g. "2,1;1,2"')
    sp.add_argument("--box", type=_natural, default=100_000)
    common(sp, {})
    return p


def _emit(report: dict, path):
    text = dumps_report(report)
    if path == "-":
        sys.stdout.write(text)
    elif path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _override(cfg: Config, args) -> Config:
    kw = {}
    for attr, key in (("seed", "seed"), ("truncation_degree", "truncation_degree"), ("measure", "measure"),
                      ("count", "count"), ("max_exponent", "max_exponent")):
        v = getattr(args, attr)
        if v is not None:
            kw[key] = v
    return replace(cfg, **kw) if kw else cfg


def _scenario_command(args) -> int:
    scn = read_scenario(args.input, args.truncation_degree)
    cfg = _override(scn.config, args)
    wanted = [op for op in scn.operations if op["op"] == args.command]
    if not wanted and args.command in ("classify", "tau", "scan"):
        wanted = [{"op": args.command, "form": i} for i in range(len(scn.forms))]
    report = run_scenario(Scenario(scn.forms, wanted, cfg))
    for entry in report["operations"]:
        print(_describe_entry(entry))
    s = report["summary"]
    print(f"{s['operations']} operation(s), {s['failed']} failed, {s['errors']} error(s)")
    _emit(report, args.output)
    if s["failed"]:
        return EXIT_FAILED
    return EXIT_INPUT if s["errors"] else EXIT_OK


def _describe_entry(entry) -> str:
    head = f"[{entry['index']}] {entry['op']}" + (f" form {entry['form']}" if "form" in entry else "")
    if entry["status"] == "error":
        return f"{head}: error {entry['error']['type']}: {entry['error']['message']}"
    r = entry["result"]
    op = entry["op"]
    if op == "classify":
        held = [k for k, v in r.items() if v["holds"]]
        return f"{head}: " + (", ".join(f"{k} {r[k].get('case', r[k].get('kind', ''))}".strip() for k in held)
                              or "no family matched")
    if op == "tau":
        return f"{head}: tau = {r['tau']} ({r['certificate']['case']})"
    if op == "blowup":
        return (f"{head}: {r['case']} -> {r['outcome']}, tau {r['tau_before']} -> {r['tau_after']}"
                + ("" if entry["status"] == "ok" else "  FAILED"))
    if op == "scan":
        lines = [f"{head}: {'holds' if r['holds'] else 'FAILED'}"]
        lines += [f"    {e['setting']}: tau {e['tau_generic']} -> {e['tau_special']}, oracle {e['oracle']}"
                  for e in r["entries"]]
        return "\n".join(lines)
    if op == "oracle":
        return f"{head}: order {r['order']}"
    return head


def _suite_command(args) -> int:
    cfg = SuiteConfig(seed=args.seed, count=args.count, degree=args.truncation_degree, measure=args.measure,
                      bounds=Bounds(max_exponent=args.max_exponent),
                      properties=tuple(args.properties) if args.properties else None,
                      negative_control=args.negative_control, workers=max(1, args.workers))
    report = run_suite(cfg)
    for name, c in report.counts.items():
        print(f"{name:22s} pass {c['pass']:5d}  fail {c['fail']:5d}  skip {c['skip']:5d}")
    for d in report.defects[:20]:
        print(f"  defect {d['property']}#{d['instance']}: {d['detail']}")
    if len(report.defects) > 20:
        print(f"  ... {len(report.defects) - 20} more defect(s)")
    print("PASS" if report.passed else "FAIL", f"(seed {cfg.seed}, {cfg.count} per property)")
    _emit(report.to_json(), args.output)
    return EXIT_OK if report.passed else EXIT_FAILED


def _oracle_command(args) -> int:
    if args.input:
        return _scenario_command(args)
    if not args.H or not args.A:
        raise ScenarioError("oracle needs --input or both --H and --A")
    try:
        order = oracle_quotient(args.H, args.A, args.box)
    except BoxTooSmall as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"order {order}")
    _emit({"oracle": {"H": args.H, "A": args.A, "box": args.box, "order": order}}, args.output)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "suite":
            return _suite_command(args)
        if args.command == "oracle":
            return _oracle_command(args)
        return _scenario_command(args)
    except (ScenarioError, TorcalcError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
