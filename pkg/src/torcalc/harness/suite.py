"""The seeded property suite.

Each property draws its instances from an rng seeded by the string
``"{seed}/{property}/{index}"``, so instances are independent of each other,
of the number of workers and of the order in which they run.  Instances
report ``pass``, ``fail`` or ``skip`` (no decidable instance could be drawn).
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from ..blowup import (ChartTransform, blow_source_2curve, blowup_curves, bform_is_good, curve_blowup_step,
                      descent_counter, match_bform)
from ..errors import (BoxTooSmall, ConstraintViolated, Indeterminate, NoMatch, NotABForm,
                      TorcalcError, UnrepresentableConstant, UnsupportedCase)
from ..forms import VARS, classify_toroidal, is_good, is_prepared
from ..lattice import SubLattice, quotient
from ..series import DEFAULT_DEGREE, TruncatedSeries
from ..tau import Tau, tau
from .generate import (RNG_NAME, Bounds, chart_constant, generate_bform, generate_prepared,
                       generate_space, generate_toroidal_three)
from .io import dump_form, load_form
from .oracles import check_chart, check_rewrite, oracle_quotient
from .recipes import applicable, shift_w, specialize_any, swap_uv, to_swapped_line

ATTEMPTS = 25


@dataclass(frozen=True)
class Outcome:
    status: str
    detail: str = ""


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 42
    count: int = 200
    degree: int = DEFAULT_DEGREE
    measure: str = "length"
    bounds: Bounds = Bounds()
    properties: tuple | None = None
    negative_control: bool = False
    workers: int = 1


PASS = Outcome("pass")


def _fail(msg):
    return Outcome("fail", msg)


def instance_rng(seed, name, index) -> random.Random:
    return random.Random(f"{seed}/{name}/{index}")


# certificates

def certified(t: Tau, cert, measure: str) -> Tau:
    """Recompute tau from its certificate, cross-checked by coset counting.

    Raises AssertionError when the certificate does not support the value.
    """
    if cert.report is None:
        if not t.is_neg_infinity:
            raise AssertionError("a finite tau without a quotient")
        return t
    rep = quotient(SubLattice(cert.H), SubLattice(cert.A))
    if not rep.finite:
        raise AssertionError("certificate quotient is infinite")
    try:
        order = oracle_quotient(cert.H, cert.A)
    except BoxTooSmall:
        order = rep.order
    if order != rep.order:
        raise AssertionError(f"coset count {order} differs from quotient order {rep.order}")
    return Tau(rep.measure(measure), measure)


def _retry(rng, build, attempts=ATTEMPTS):
    """Call build(rng) until it returns an Outcome; undecidable draws are redrawn."""
    last = "no attempt"
    for _ in range(attempts):
        try:
            return build(rng)
        except (Indeterminate, UnsupportedCase, UnrepresentableConstant, ConstraintViolated) as exc:
            last = f"{type(exc).__name__}: {exc}"
    return Outcome("skip", last)


# properties

def prop_lattice_oracle(rng, cfg):
    """lattice.quotient against coset enumeration on random finite quotients."""
    for _ in range(ATTEMPTS):
        n = rng.randint(1, 3)
        H = [tuple(rng.randint(-6, 6) for _ in range(n)) for _ in range(rng.randint(1, n + 1))]
        r = len(SubLattice(H).basis)
        if r == 0:
            continue
        A = []
        for _ in range(rng.randint(r, r + 1)):
            c = [rng.randint(-2, 2) for _ in H]
            a = tuple(sum(ci * h[i] for ci, h in zip(c, H)) for i in range(n))
            if max(map(abs, a), default=0) <= 6:
                A.append(a)
        if len(SubLattice(A).basis) != r:
            continue
        rep = quotient(SubLattice(H), SubLattice(A))
        try:
            order = oracle_quotient(H, A)
        except BoxTooSmall:
            continue
        if order != rep.order:
            return _fail(f"H={H} A={A}: quotient {rep.order}, oracle {order}")
        return PASS
    return Outcome("skip", "no finite quotient drawn")


def prop_measure_consistency(rng, cfg):
    """Adding a generator of H to A never raises tau, under either measure."""
    n = rng.randint(1, 3)
    basis = [tuple(1 if i == j else 0 for i in range(n)) for j in range(n)]
    A = [tuple(rng.choice([1, 2, 3, 4, 6]) * x for x in b) for b in basis]
    H = basis + [tuple(rng.randint(-6, 6) for _ in range(n))]
    extra = tuple(rng.randint(-6, 6) for _ in range(n))
    before = quotient(SubLattice(H), SubLattice(A))
    after = quotient(SubLattice(H), SubLattice(A + [extra]))
    for m in ("length", "order"):
        if after.measure(m) > before.measure(m):
            return _fail(f"{m} went up from {before.measure(m)} to {after.measure(m)} adding {extra}")
    return PASS


def prop_tau_total(rng, cfg):
    """tau is total on generated prepared forms and survives serialization."""
    f = generate_prepared(rng, cfg.bounds, degree=cfg.degree)
    try:
        t, cert = tau(f, cfg.measure)
    except TorcalcError as exc:
        return _fail(f"{f.provenance}: tau raised {type(exc).__name__}: {exc}")
    if t.value is not None and t.value < 0:
        return _fail(f"{f.provenance}: negative tau")
    try:
        classify_toroidal(f)
        if not t.is_neg_infinity:
            return _fail(f"{f.provenance}: toroidal form with tau {t}")
    except NoMatch:
        if t.is_neg_infinity:
            return _fail(f"{f.provenance}: tau -inf on a form that is not toroidal")
    try:
        if certified(t, cert, cfg.measure) != t:
            return _fail(f"{f.provenance}: certificate gives another value")
    except AssertionError as exc:
        return _fail(f"{f.provenance}: {exc}")
    g = load_form(dump_form(f), degree=cfg.degree)
    if tau(g, cfg.measure)[0] != t:
        return _fail(f"{f.provenance}: tau changed after a serialization round trip")
    return PASS


def _rewrite_ok(rw, cfg):
    if not rw.holds:
        return f"{rw.recipe}: tau {rw.tau_before} -> {rw.tau_after}"
    try:
        chk = check_rewrite(rw, cfg.degree, cfg.measure)
    except Indeterminate:
        return None
    if not chk.ok:
        return f"{rw.recipe}: {'; '.join(chk.problems)}"
    return None


def prop_independence(rng, cfg):
    """tau does not change under the documented changes of parameters."""
    def build(rng):
        f = generate_prepared(rng, cfg.bounds, "line_pair", cfg.degree)
        phi = {(rng.randint(0, 2), rng.randint(0, 2)): Fraction(rng.randint(-3, 3) or 1)
               for _ in range(rng.randint(1, 2))}
        phi = {k: c for k, c in phi.items() if sum(k) >= 1} or {(1, 0): Fraction(1)}
        rewrites = [swap_uv(f, cfg.degree, cfg.measure), shift_w(f, phi, cfg.degree, cfg.measure)]
        if f.w.value(cfg.degree).coefficient((0, 1, 0)):
            rewrites.append(to_swapped_line(f, cfg.degree, cfg.measure))
        for rw in rewrites:
            bad = _rewrite_ok(rw, cfg)
            if bad:
                return _fail(bad)
        return PASS
    return _retry(rng, build)


def _space_or_toroidal(rng, cfg):
    if rng.random() < 0.1:
        return generate_toroidal_three(rng, cfg.bounds, cfg.degree)
    return generate_space(rng, cfg.bounds, rng.random() < 0.3, cfg.degree)


def prop_semicontinuity(rng, cfg):
    """tau at a nearby 2-point or 1-point never exceeds tau at the 3-point."""
    def build(rng):
        f = _space_or_toroidal(rng, cfg)
        for s in applicable(f):
            rw = specialize_any(f, s, rng, cfg.degree, cfg.measure)
            try:
                tg = certified(rw.tau_before, rw.cert_before, cfg.measure)
                ts = certified(rw.tau_after, rw.cert_after, cfg.measure)
            except AssertionError as exc:
                return _fail(f"{s.label}: {exc}")
            if not ts <= tg:
                return _fail(f"{s.label}: tau {tg} at the 3-point, {ts} nearby")
            bad = _rewrite_ok(rw, cfg)
            if bad:
                return _fail(bad)
        return PASS
    return _retry(rng, build)


def two_curve_runs(f, rng, cfg):
    """The alpha = 0 chart and a translated chart on each side of the 2-curve."""
    out = []
    for chart in ("x", "y"):
        for alpha in (Fraction(0), chart_constant(rng, cfg.bounds)):
            try:
                res = blow_source_2curve(f, ChartTransform("Source2Curve", chart, alpha), cfg.degree,
                                         cfg.measure)
            except UnrepresentableConstant:
                res = blow_source_2curve(f, ChartTransform("Source2Curve", chart, Fraction(1)),
                                         cfg.degree, cfg.measure)
            out.append(res)
    return out


def prop_blowup_monotone(rng, cfg):
    """2-curve blow-ups stay prepared and do not raise tau."""
    def build(rng):
        f = generate_space(rng, cfg.bounds, rng.random() < 0.5, cfg.degree)
        for res in two_curve_runs(f, rng, cfg):
            try:
                is_prepared(res.after)
            except NoMatch as exc:
                return _fail(f"2-curve case {res.case}: output not prepared: {exc}")
            if not res.monotone:
                return _fail(f"2-curve case {res.case}: tau {res.tau_before} -> {res.tau_after}")
        return PASS
    return _retry(rng, build)


def descent_chain(f, cfg):
    """Follow the chart that re-enters a B-form; returns (steps, counters, last result)."""
    counters = [descent_counter(f).value]
    cur, steps, res = f, 0, None
    while steps <= counters[0]:
        chart = ChartTransform("SourceCurve", "translate", 0, curve=blowup_curves(cur)[0])
        res = curve_blowup_step(cur, chart, cfg.degree, cfg.measure)
        steps += 1
        if res.outcome != "bform":
            return steps, counters, res
        counters.append(res.counter_after.value)
        if counters[-1] >= counters[-2]:
            return steps, counters, res
        cur = res.after
    return steps, counters, res


def prop_descent(rng, cfg):
    """Iterated curve blow-ups leave the B-forms within C steps, C strictly falling."""
    def build(rng):
        f = generate_bform(rng, cfg.bounds, degree=cfg.degree)
        steps, counters, res = descent_chain(f, cfg)
        if any(b >= a for a, b in zip(counters, counters[1:])):
            return _fail(f"{f.provenance}: counter sequence {counters}")
        if res.outcome == "bform" or steps > counters[0]:
            return _fail(f"{f.provenance}: no exit after {steps} steps, C = {counters[0]}")
        return PASS
    return _retry(rng, build)


def _w_good(res):
    if res.outcome == "bform":
        return bform_is_good(match_bform(res.after))
    if res.outcome == "toroidal":
        return True
    try:
        is_good(res.after)
        return True
    except NoMatch:
        return False


def prop_good_dichotomy(rng, cfg):
    """After a curve blow-up of a good B-form, w is good or tau went down."""
    def build(rng):
        f = generate_bform(rng, cfg.bounds, good=True, degree=cfg.degree)
        for curve in blowup_curves(f):
            for chart, alpha in (("translate", Fraction(0)), ("translate", chart_constant(rng, cfg.bounds)),
                                 ("exchange", Fraction(0))):
                try:
                    res = curve_blowup_step(f, ChartTransform("SourceCurve", chart, alpha, curve=curve),
                                            cfg.degree, cfg.measure)
                except UnrepresentableConstant:
                    continue
                if not (_w_good(res) or res.tau_after < res.tau_before):
                    return _fail(f"{f.provenance} curve {curve} {chart} alpha={alpha}: w not good, tau "
                                 f"{res.tau_before} -> {res.tau_after}")
        return PASS
    return _retry(rng, build)


def _random_unit(rng, degree, c=None):
    terms = {(0, 0, 0): c if c is not None else Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))}
    for _ in range(rng.randint(1, 4)):
        m = tuple(rng.randint(0, 2) for _ in range(3))
        if any(m):
            terms[m] = Fraction(rng.randint(-5, 5), rng.randint(1, 5))
    return TruncatedSeries(VARS, terms, degree)


def prop_series_algebra(rng, cfg):
    """u * u^-1 = 1 and ((1 + m)^(p/q))^q = (1 + m)^p modulo truncation."""
    d = rng.randint(1, min(cfg.degree, 12))
    u = _random_unit(rng, d)
    one = TruncatedSeries.constant(1, VARS, d)
    if not (u * u.invert_unit()).equal_mod(one, d):
        return _fail(f"u * u^-1 != 1 for u = {u}, D = {d}")
    v = _random_unit(rng, d, Fraction(1))
    q = rng.randint(1, 5)
    p = rng.choice([k for k in range(-6, 7) if k])
    lhs = v.rational_power(Fraction(p, q)) ** q
    rhs = v ** p if p > 0 else v.invert_unit() ** (-p)
    if not lhs.equal_mod(rhs, d):
        return _fail(f"((1 + m)^({p}/{q}))^{q} != (1 + m)^{p} for 1 + m = {v}, D = {d}")
    return PASS


def transform_instance(rng, cfg):
    """A random transform: a curve blow-up step of a B-form or a 2-curve chart."""
    if rng.random() < 0.6:
        f = generate_bform(rng, cfg.bounds, degree=cfg.degree)
        chart = rng.choice(["translate", "translate", "exchange"])
        alpha = Fraction(0) if chart == "exchange" or rng.random() < 0.3 else chart_constant(rng, cfg.bounds)
        return curve_blowup_step(f, ChartTransform("SourceCurve", chart, alpha, curve=rng.choice(blowup_curves(f))),
                                 cfg.degree, cfg.measure)
    f = generate_space(rng, cfg.bounds, rng.random() < 0.4, cfg.degree)
    alpha = Fraction(0) if rng.random() < 0.3 else chart_constant(rng, cfg.bounds)
    return blow_source_2curve(f, ChartTransform("Source2Curve", rng.choice("xy"), alpha), cfg.degree,
                              cfg.measure)


def prop_chart_oracle(rng, cfg):
    """Structured chart output against substitution, renormalization and reclassification."""
    def build(rng):
        res = transform_instance(rng, cfg)
        chk = check_chart(res, cfg.degree, cfg.measure)
        if not chk.ok:
            return _fail(f"{res.case}: {'; '.join(chk.problems)}")
        return PASS
    return _retry(rng, build)


def prop_negative_control(rng, cfg):
    """A deliberately corrupted certificate: this property must fail.

    The A generators of the nearby point's certificate are scaled until the
    recomputed tau exceeds tau at the 3-point; the same verifier as in the
    semicontinuity property then has to reject it.
    """
    def build(rng):
        f = generate_space(rng, cfg.bounds, False, cfg.degree)
        for s in applicable(f):
            rw = specialize_any(f, s, rng, cfg.degree, cfg.measure)
            cert = rw.cert_after
            if cert is None or cert.report is None or rw.tau_before.is_neg_infinity:
                continue
            k = 2 ** (rw.tau_before.value + 1)
            bad = type(cert)(cert.case, cert.target, cert.H, tuple(tuple(k * x for x in a) for a in cert.A),
                             cert.report, cert.permutation)
            tg = certified(rw.tau_before, rw.cert_before, cfg.measure)
            ts = certified(rw.tau_after, bad, cfg.measure)
            if not ts <= tg:
                return _fail(f"{s.label}: corrupted certificate gives {ts} > {tg}")
            return PASS
        raise UnsupportedCase("no finite certificate to corrupt")
    return _retry(rng, build)


PROPERTIES = {
    "lattice_oracle": prop_lattice_oracle,
    "measure_consistency": prop_measure_consistency,
    "tau_total": prop_tau_total,
    "independence": prop_independence,
    "semicontinuity": prop_semicontinuity,
    "blowup_monotone": prop_blowup_monotone,
    "descent": prop_descent,
    "good_dichotomy": prop_good_dichotomy,
    "series_algebra": prop_series_algebra,
    "chart_oracle": prop_chart_oracle,
}


def run_instance(name, index, cfg) -> Outcome:
    fn = PROPERTIES.get(name) or (prop_negative_control if name == "negative_control" else None)
    if fn is None:
        raise KeyError(name)
    try:
        return fn(instance_rng(cfg.seed, name, index), cfg)
    except TorcalcError as exc:
        return _fail(f"unexpected {type(exc).__name__}: {exc}")


def _run(args):
    return run_instance(*args)


@dataclass
class SuiteReport:
    config: SuiteConfig
    counts: dict = field(default_factory=dict)
    defects: list = field(default_factory=list)
    skips: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.defects

    def to_json(self) -> dict:
        c = self.config
        return {"rng": RNG_NAME, "seed": str(c.seed),
                "config": {"count": str(c.count), "truncation_degree": str(c.degree), "measure": c.measure,
                           "bounds": {"max_exponent": str(c.bounds.max_exponent),
                                      "max_terms": str(c.bounds.max_terms),
                                      "max_coeff": str(c.bounds.max_coeff)},
                           "negative_control": c.negative_control},
                "properties": {k: {s: str(n) for s, n in v.items()} for k, v in self.counts.items()},
                "defects": self.defects, "skips": self.skips, "passed": self.passed}


def run_suite(cfg: SuiteConfig = SuiteConfig()) -> SuiteReport:
    """Run ``cfg.count`` instances of every selected property."""
    names = list(cfg.properties or PROPERTIES)
    unknown = [n for n in names if n not in PROPERTIES]
    if unknown:
        raise KeyError(f"unknown properties {unknown}")
    if cfg.negative_control:
        names.append("negative_control")
    jobs = [(n, i, cfg) for n in names for i in range(cfg.count)]
    if cfg.workers > 1 and jobs:
        with ProcessPoolExecutor(cfg.workers) as pool:
            outcomes = list(pool.map(_run, jobs, chunksize=16))
    else:
        outcomes = [_run(j) for j in jobs]
    report = SuiteReport(cfg)
    for (name, index, _), out in zip(jobs, outcomes):
        counts = report.counts.setdefault(name, {"pass": 0, "fail": 0, "skip": 0})
        counts[out.status] += 1
        entry = {"property": name, "instance": str(index), "detail": out.detail}
        if out.status == "fail":
            report.defects.append(entry)
        elif out.status == "skip":
            report.skips.append(entry)
    return report
