"""Explicit blow-up charts and their effect on local forms.

Three families are covered:

* blow-ups of the 2-curve x = y = 0 through a 3-point of the source;
* target charts ``u = u1, v = v1, w = u1 (w1 + alpha)`` and
  ``u = u1 v1, v = v1, w = v1 w1``;
* one step of the curve blow-up calculus on the four B-forms (the shapes met
  where the ideal of the resolving curve is not principal), with the descent
  counter C.

Every transform records the chart as three maps, all made of explicit series:
``source_map`` gives the old source variables in the chart coordinates,
``target_map`` gives the old target parameters as polynomials in the new
ones, and ``coordinates`` gives the output variables in the chart
coordinates.  With them the identity ``old o source_map = target_map(new o
coordinates)`` can be checked term by term (see ``harness.oracles``).

Whenever a translation alpha is nonzero the unit ``eps = alpha + t`` of the
chart appears with rational exponents; the divisor variables are rescaled by
powers of eps so that the chosen components become monomials, and what is
left of eps becomes a new coordinate.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import gcd
from typing import Mapping

from .errors import (ChartMismatch, ConstraintViolated, MalformedInput, NoMatch, NotABForm,
                     UnsupportedCase)
from .forms import Expansion, LocalForm, PointType, Term, classify_toroidal, is_prepared
from .forms.canonical import split_rank
from .forms.model import VARS, ZERO
from .forms.pairs import allowed_permutations, classify_pair_parts, det3
from .lattice import SubLattice, quotient
from .series import DEFAULT_DEGREE, TruncatedSeries, as_fraction, exact_power
from .tau import Tau, TauCertificate, tau

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE
TARGET_VARS = ("u", "v", "w")
CENTERS = ("Source2Curve", "SourceCurve", "SourcePoint", "TargetPoint", "TargetCurve")


@dataclass(frozen=True)
class ChartTransform:
    """A chart of a blow-up: its center, the chart selector and the constants.

    Callers fill in ``center``, ``chart`` and ``alpha``; the transform
    functions return a copy with the three substitution maps attached.
    """

    center: str
    chart: str
    alpha: Fraction = Fraction(0)
    beta: Fraction | None = None
    curve: str = "x"
    source_map: Mapping = field(default_factory=dict, compare=False)
    target_map: Mapping = field(default_factory=dict, compare=False)
    coordinates: Mapping = field(default_factory=dict, compare=False)
    note: str = ""

    def __post_init__(self):
        if self.center not in CENTERS:
            raise MalformedInput(f"unknown center {self.center!r}")
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.beta is not None:
            object.__setattr__(self, "beta", as_fraction(self.beta))

    def to_json(self) -> dict:
        return {"center": self.center, "chart": self.chart, "alpha": str(self.alpha),
                "curve": self.curve, "note": self.note,
                "source_map": {k: str(v) for k, v in self.source_map.items()},
                "target_map": {k: str(v) for k, v in self.target_map.items()},
                "coordinates": {k: str(v) for k, v in self.coordinates.items()}}


@dataclass(frozen=True)
class DescentCounter:
    """The natural number C(p) of a B-form."""

    value: int
    kind: str

    def __post_init__(self):
        if self.value < 0:
            raise ConstraintViolated(f"negative descent counter {self.value}")


@dataclass(frozen=True)
class BForm:
    """A matched B-form: its kind, integer parameters and the w coefficients."""

    kind: str
    params: Mapping
    terms: Mapping = field(default_factory=dict)

    def __getitem__(self, key):
        return self.params[key]


@dataclass(frozen=True)
class TransformResult:
    """Before and after forms, both tau values and the recorded verdict."""

    before: LocalForm
    after: LocalForm
    chart: ChartTransform
    tau_before: Tau
    tau_after: Tau
    monotone: bool
    outcome: str
    certificate: TauCertificate | None = None
    counter_before: DescentCounter | None = None
    counter_after: DescentCounter | None = None
    case: str = ""

    @property
    def descends(self) -> bool:
        """For re-entries into a B-form, whether C went down."""
        if self.counter_after is None:
            return True
        return self.counter_after.value < self.counter_before.value


# series helpers

def _const(c, degree):
    return TruncatedSeries.constant(as_fraction(c), VARS, degree)


def _var(name, degree):
    return TruncatedSeries.variable(name, VARS, degree)


def _mono(p, degree, c=1):
    return TruncatedSeries.monomial(tuple(p), VARS, as_fraction(c), degree)


def _eps(alpha, name, e, degree):
    """(alpha + name) ** e over x, y, z."""
    e = as_fraction(e)
    base = _const(alpha, degree) + _var(name, degree)
    if e.denominator == 1 and e >= 0:
        return base ** int(e)
    return base.unit_power(e)


def _rel(alpha, abar, name, e, kappa, degree):
    """(alpha + t) ** e written in s = (alpha + t) ** kappa - abar, s named ``name``.

    The constant is alpha ** e itself, so the branch of the root agrees with
    the one used for (alpha + t) ** e directly.
    """
    e = as_fraction(e)
    one = _const(1, degree) + _var(name, degree).scale(1 / as_fraction(abar))
    return one.rational_power(e / kappa).scale(exact_power(alpha, e))


def _tpoly(terms: Mapping, degree):
    """A polynomial in the new target parameters u, v, w."""
    return TruncatedSeries(TARGET_VARS, {tuple(m): as_fraction(c) for m, c in terms.items()}, degree)


def _target_identity(degree, perm=(0, 1, 2)):
    out = {}
    for j, i in enumerate(perm):
        m = [0, 0, 0]
        m[j] = 1
        out[TARGET_VARS[i]] = _tpoly({tuple(m): 1}, degree)
    return out


def _source_identity(degree):
    return {v: _var(v, degree) for v in VARS}


def _swap_series(s: TruncatedSeries) -> TruncatedSeries:
    return s.substitute({"x": _var("y", s.degree), "y": _var("x", s.degree)})


def _swap_exp(p):
    return (p[1], p[0], p[2])


def swap_xy(f: LocalForm) -> LocalForm:
    """Exchange the roles of x and y in every component."""
    def sw(e: Expansion) -> Expansion:
        return Expansion(tuple(Term(_swap_exp(t.exponent), _swap_series(t.coeff)) for t in e.terms),
                         e.kind, e.exact)
    return f.replace(u=sw(f.u), v=sw(f.v), w=sw(f.w))


def monomials(e: Expansion) -> dict:
    """The expansion as a polynomial: full exponent -> rational coefficient."""
    out: dict = {}
    for t in e.terms:
        for m, c in t.coeff.terms.items():
            p = tuple(a + b for a, b in zip(t.exponent, m))
            out[p] = out.get(p, 0) + c
    return {p: Fraction(c) for p, c in out.items() if c}


def _solve2(rows, rhs):
    """Solve a 2x2 rational system, or None when singular."""
    (p, q), (r, s) = rows
    det = Fraction(p) * s - Fraction(q) * r
    if det == 0:
        return None
    return ((rhs[0] * s - q * rhs[1]) / det, (p * rhs[1] - r * rhs[0]) / det)


def _geq(p, q):
    return all(a >= b for a, b in zip(p, q))


def _terms(items, kind="indexed_sum", exact=True):
    acc: dict = {}
    for p, c in items:
        p = tuple(p)
        acc[p] = acc[p] + c if p in acc else c
    return Expansion(tuple(Term(p, c) for p, c in sorted(acc.items())), kind, exact)


def _evaluate(f: LocalForm, tau_before: Tau, chart: ChartTransform, after: LocalForm,
              measure: str, case: str, counter_before=None, reentry=False) -> TransformResult:
    if reentry:
        bf = match_bform(after)
        t_after = bform_tau(bf, measure, after)
        return TransformResult(f, after, chart, tau_before, t_after, t_after <= tau_before,
                               "bform", None, counter_before, descent_counter(bf), case)
    t_after, cert = tau(after, measure)
    outcome = "toroidal" if t_after.is_neg_infinity else "prepared"
    return TransformResult(f, after, chart, tau_before, t_after, t_after <= tau_before,
                           outcome, cert, counter_before, None, case)


# source 2-curve blow-ups

def _pair4_split(f: LocalForm):
    for perm in allowed_permutations(f.target):
        g = f.permuted(perm)
        try:
            pair = classify_pair_parts(g.source, g.target, g.u, g.v)
        except NoMatch:
            continue
        if pair.case != "4":
            continue
        try:
            split = split_rank(g.w.graded(g.source), (pair.witnesses["u"], pair.witnesses["v"]))
        except (NoMatch, MalformedInput):
            continue
        return perm, g, pair, split
    raise UnsupportedCase("no ordering of the target parameters gives a rank 2 monomial pair "
                          "with a rank 3 term in w")


def blow_source_2curve(f: LocalForm, chart: ChartTransform, degree: int = DEFAULT_DEGREE,
                       measure: str = "length") -> TransformResult:
    """Blow up the 2-curve x = y = 0 through a 3-point of the source.

    ``chart.chart`` is ``"x"`` for x = x1, y = x1 (y1 + alpha) and ``"y"`` for
    the symmetric chart y = y1, x = y1 (x1 + alpha).
    """
    if f.source is not THREE:
        raise UnsupportedCase("2-curve blow-ups are implemented at 3-points of the source")
    if chart.chart not in ("x", "y"):
        raise MalformedInput(f"chart must be 'x' or 'y', not {chart.chart!r}")
    tau_before, _ = tau(f, measure)
    if chart.chart == "y":
        res = blow_source_2curve(swap_xy(f), replace(chart, chart="x"), degree, measure)
        return _unswap(f, res, replace(chart, chart="y"), measure)
    perm, g, pair, split = _pair4_split(f)
    u, v, N = pair.witnesses["u"], pair.witnesses["v"], split.anchor
    w = monomials(g.w)
    alpha = chart.alpha
    src = {"x": _var("x", degree), "y": _mono((1, 1, 0), degree) + _mono((1, 0, 0), degree, alpha),
           "z": _var("z", degree)}
    tmap = _target_identity(degree, perm)

    def img(p):
        return (p[0] + p[1], p[2])

    if alpha == 0:
        def m3(p):
            return (p[0] + p[1], p[1], p[2])
        after = LocalForm(THREE, f.target, Expansion.monomial(m3(u), degree=degree),
                          Expansion.monomial(m3(v), degree=degree),
                          _terms([(m3(p), _const(c, degree)) for p, c in w.items()]),
                          "2-curve chart, alpha = 0")
        ch = replace(chart, source_map=src, target_map=tmap, coordinates=_source_identity(degree),
                     note="monomial chart")
        return _evaluate(f, tau_before, ch, after, measure, "3")

    (A1, C1), (A2, C2), (NA, NC) = img(u), img(v), img(N)
    det1 = A1 * C2 - C1 * A2
    if det1:
        lam = _solve2([(A1, C1), (A2, C2)], (Fraction(-u[1]), Fraction(-v[1])))

        def kappa(p):
            A, C = img(p)
            return p[1] + A * lam[0] + C * lam[1]

        low, completion = {}, _const(0, degree)
        for p, c in w.items():
            A, C = img(p)
            if A >= NA and C >= NC:
                dA, dC = A - NA, C - NC
                completion = completion + _mono((dA, 0, dC), degree, c) * _eps(
                    alpha, "y", kappa(p) - dA * lam[0] - dC * lam[1], degree)
            elif kappa(p) != 0:
                raise UnsupportedCase(f"term {p} keeps a unit below the anchor")
            else:
                low[(A, C, 0)] = low.get((A, C, 0), 0) + c
        beta = completion.constant_term
        zc = completion - _const(beta, degree)
        if zc.coefficient((0, 1, 0)) == 0:
            raise UnsupportedCase("the completed variable is not a coordinate")
        w_out = Expansion.series_plus_z([(p, c) for p, c in sorted(low.items()) if c],
                                        (NA, NC, 0), beta, degree)
        after = LocalForm(TWO, f.target, Expansion.monomial((A1, C1, 0), degree=degree),
                          Expansion.monomial((A2, C2, 0), degree=degree), w_out,
                          "2-curve chart, independent rows")
        coords = {"x": _var("x", degree) * _eps(alpha, "y", -lam[0], degree),
                  "y": _var("z", degree) * _eps(alpha, "y", -lam[1], degree), "z": zc}
        ch = replace(chart, source_map=src, target_map=tmap, coordinates=coords,
                     note=f"lambda = {lam[0]}, {lam[1]}")
        return _evaluate(f, tau_before, ch, after, measure, "1")

    if C1 == 0 and C2 == 0:
        raise UnsupportedCase("proportional rows with no z: the chart leaves no 2-point pair")
    k = gcd(A1, C1)
    ab, bb = A1 // k, C1 // k
    t = A2 // ab if ab else C2 // bb
    if (t * ab, t * bb) != (A2, C2) or t <= 0 or ab <= 0 or bb <= 0:
        raise UnsupportedCase("proportional rows without a positive common direction")
    nu = Fraction(v[1]) - Fraction(t * u[1], k)
    mu = _solve2([(ab, bb), (NA, NC)], (Fraction(-u[1], k), Fraction(-N[1])))
    if mu is None or nu == 0:
        raise UnsupportedCase("the chart does not separate the pair from the anchor")
    abar = exact_power(alpha, nu)
    items, exact = [], True
    for p, c in w.items():
        A, C = img(p)
        e = p[1] + A * mu[0] + C * mu[1]
        r = e / nu
        if r.denominator != 1 or r < 0:
            exact = False
        items.append(((A, C, 0), _rel(alpha, abar, "z", e, nu, degree) * c))
    after = LocalForm(TWO, f.target, Expansion.monomial((k * ab, k * bb, 0), degree=degree),
                      Expansion.translate((t * ab, t * bb, 0), abar, "z", degree),
                      _terms(items, exact=exact), "2-curve chart, proportional rows")
    coords = {"x": _var("x", degree) * _eps(alpha, "y", -mu[0], degree),
              "y": _var("z", degree) * _eps(alpha, "y", -mu[1], degree),
              "z": _eps(alpha, "y", nu, degree) - _const(abar, degree)}
    ch = replace(chart, source_map=src, target_map=tmap, coordinates=coords,
                 note=f"mu = {mu[0]}, {mu[1]}; nu = {nu}")
    return _evaluate(f, tau_before, ch, after, measure, "2")


def _unswap(f, res: TransformResult, chart: ChartTransform, measure) -> TransformResult:
    """Translate a result computed on swap_xy(f) back to f."""
    def sw_map(m):
        return {("y" if k == "x" else "x" if k == "y" else k): _swap_series(s) for k, s in m.items()}
    ch = replace(chart, source_map=sw_map(res.chart.source_map), target_map=res.chart.target_map,
                 coordinates=sw_map(res.chart.coordinates), note=res.chart.note)
    after = swap_xy(res.after)
    if res.outcome == "bform":
        return replace(res, before=f, after=after, chart=ch,
                       counter_after=descent_counter(after))
    t_after, cert = tau(after, measure)
    return replace(res, before=f, after=after, chart=ch, tau_after=t_after, certificate=cert,
                   monotone=t_after <= res.tau_before)


# target charts

def _divide(e: Expansion, P, what: str) -> list:
    """Terms of e / X^P, raising ChartMismatch when some term is not a multiple."""
    out = []
    for t in e.terms:
        if _geq(t.exponent, P):
            out.append(Term(tuple(a - b for a, b in zip(t.exponent, P)), t.coeff))
            continue
        for m, c in t.coeff.terms.items():
            q = tuple(a + b for a, b in zip(t.exponent, m))
            if not _geq(q, P):
                raise ChartMismatch(f"{what} has the term x^{q}, not a multiple of x^{P}")
            out.append(Term(tuple(a - b for a, b in zip(q, P)),
                            TruncatedSeries.constant(c, VARS, t.coeff.degree)))
    return out


def blow_target_point_chart(f: LocalForm, chart: ChartTransform, degree: int = DEFAULT_DEGREE,
                            measure: str = "length") -> TransformResult:
    """Rewrite f in a chart of a blow-up of the target.

    ``"translate"``: u = u1, v = v1, w = u1 (w1 + alpha); the center is the
    curve u = w = 0.  ``"v_chart"``: u = u1 v1, v = v1, w = v1 w1; the center
    is the point u = v = w = 0.
    """
    if f.target not in (ONE, TWO):
        raise UnsupportedCase("target charts are implemented over 1-points and 2-points")
    tau_before, _ = tau(f, measure)
    alpha = chart.alpha
    if chart.chart == "translate":
        gu = monomials(f.u)
        if len(gu) != 1 or next(iter(gu.values())) != 1:
            raise ChartMismatch("u is not a monomial")
        P = next(iter(gu))
        terms = _divide(f.w, P, "w")
        terms.append(Term(ZERO, _const(-alpha, degree)))
        w1 = Expansion(tuple(terms), "indexed_sum", f.w.exact)
        lead = monomials(w1).get(ZERO, 0)
        if lead:
            raise ChartMismatch(f"alpha = {alpha} differs from the leading constant {lead + alpha}")
        after = f.replace(w=w1, provenance="target chart w = u (w1 + alpha)")
        tmap = _target_identity(degree)
        tmap["w"] = _tpoly({(1, 0, 1): 1, (1, 0, 0): alpha}, degree)
    elif chart.chart == "v_chart":
        gv = monomials(f.v)
        if len(gv) != 1 or next(iter(gv.values())) != 1:
            raise ChartMismatch("v is not a monomial")
        P = next(iter(gv))
        u1 = Expansion(tuple(_divide(f.u, P, "u")), "indexed_sum", f.u.exact)
        w1 = Expansion(tuple(_divide(f.w, P, "w")), "indexed_sum", f.w.exact)
        for name, e in (("u1", u1), ("w1", w1)):
            if monomials(e).get(ZERO, 0):
                raise ChartMismatch(f"{name} does not vanish at the point of this chart")
        after = LocalForm(f.source, TWO, u1, f.v, w1, "target chart u = u1 v1, w = v1 w1")
        tmap = _target_identity(degree)
        tmap["u"] = _tpoly({(1, 1, 0): 1}, degree)
        tmap["w"] = _tpoly({(0, 1, 1): 1}, degree)
    else:
        raise MalformedInput(f"unknown target chart {chart.chart!r}")
    try:
        classify_toroidal(after)
    except NoMatch:
        try:
            is_prepared(after)
        except NoMatch as exc:
            raise UnsupportedCase(f"chart output is not prepared: {exc}") from exc
    ch = replace(chart, source_map=_source_identity(degree), target_map=tmap,
                 coordinates=_source_identity(degree))
    return _evaluate(f, tau_before, ch, after, measure, chart.chart)


# B-forms

def line_v_form(a, b, n, beta, terms: Mapping, degree=DEFAULT_DEGREE) -> LocalForm:
    """u = x^a, v = x^b z, w = sum a_ij x^(i+bj) z^j + x^n (y + beta)."""
    items = [((i + b * j, 0, j), c) for (i, j), c in sorted(terms.items()) if c]
    y = _var("y", degree) + _const(beta, degree)
    w = Expansion.indexed_sum(items, ((n, 0, 0), y), degree)
    return LocalForm(ONE, ONE, Expansion.monomial((a, 0, 0), degree=degree),
                     Expansion.monomial((b, 0, 1), degree=degree), w, "BForm line_v")


def plane_v_form(a, b, k, c, d, e, f, terms: Mapping, degree=DEFAULT_DEGREE) -> LocalForm:
    """u = (x^a y^b)^k, v = x^c y^d z, w = sum a_il z^l x^(ai+cl) y^(bi+dl) + x^e y^f."""
    items = [((a * i + c * l, b * i + d * l, l), co) for (i, l), co in sorted(terms.items()) if co]
    w = Expansion.indexed_sum(items, ((e, f, 0), 1), degree)
    return LocalForm(TWO, ONE, Expansion.monomial((a * k, b * k, 0), degree=degree),
                     Expansion.monomial((c, d, 1), degree=degree), w, "BForm plane_v")


def line_w_form(a, b, d, beta, degree=DEFAULT_DEGREE) -> LocalForm:
    """u = x^a, v = x^b (beta + y), w = x^d z."""
    return LocalForm(ONE, TWO, Expansion.monomial((a, 0, 0), degree=degree),
                     Expansion.translate((b, 0, 0), beta, "y", degree),
                     Expansion.monomial((d, 0, 1), degree=degree), "BForm line_w")


def plane_w_form(a, b, c, d, g, h, degree=DEFAULT_DEGREE) -> LocalForm:
    """u = x^a y^b, v = x^c y^d, w = x^g y^h z."""
    return LocalForm(TWO, TWO, Expansion.monomial((a, b, 0), degree=degree),
                     Expansion.monomial((c, d, 0), degree=degree),
                     Expansion.monomial((g, h, 1), degree=degree), "BForm plane_w")


def _single(poly):
    if len(poly) != 1:
        return None
    (p, c), = poly.items()
    return p if c == 1 else None


def _lt(p, q):
    return _geq(q, p) and p != q


def _match_line_v(f, U, V, W):
    pu, pv = _single(U), _single(V)
    if not (pu and pv and pu[1:] == (0, 0) and pu[0] > 0 and pv[1:] == (0, 1)):
        return None
    a, b = pu[0], pv[0]
    ys = [p for p in W if p[1]]
    if len(ys) != 1 or ys[0][1:] != (1, 0) or W[ys[0]] != 1:
        return None
    n = ys[0][0]
    beta = W.get((n, 0, 0), Fraction(0))
    terms = {}
    for p, c in W.items():
        if p[1] or p == (n, 0, 0):
            continue
        i = p[0] - b * p[2]
        if i < 0:
            return None
        terms[(i, p[2])] = c
    if not b < a:
        raise ConstraintViolated(f"line_v needs b < a, got a = {a}, b = {b}")
    return BForm("line_v", {"a": a, "b": b, "n": n, "beta": beta}, terms)


def _match_plane_v(f, U, V, W):
    pu, pv = _single(U), _single(V)
    if not (pu and pv and pu[0] > 0 and pu[1] > 0 and pu[2] == 0 and pv[2] == 1):
        return None
    k = gcd(pu[0], pu[1])
    a, b = pu[0] // k, pu[1] // k
    c, d = pv[0], pv[1]
    terms, anchors = {}, []
    for p, co in W.items():
        P, Q = p[0] - c * p[2], p[1] - d * p[2]
        if P >= 0 and Q >= 0 and P * b == Q * a and P % a == 0:
            terms[(P // a, p[2])] = co
        else:
            anchors.append(p)
    if len(anchors) != 1 or anchors[0][2] != 0 or W[anchors[0]] != 1:
        return None
    e, f_ = anchors[0][:2]
    if a * f_ - e * b == 0:
        return None
    if not _lt((c, d), (a * k, b * k)):
        raise ConstraintViolated(f"plane_v needs (c, d) < (ak, bk), got {(c, d)} and {(a * k, b * k)}")
    return BForm("plane_v", {"a": a, "b": b, "k": k, "c": c, "d": d, "e": e, "f": f_}, terms)


def _match_line_w(f, U, V, W):
    pu, pw = _single(U), _single(W)
    if not (pu and pw and pu[1:] == (0, 0) and pu[0] > 0 and pw[1:] == (0, 1)):
        return None
    ys = [p for p in V if p[1]]
    if len(ys) != 1 or ys[0][1:] != (1, 0) or V[ys[0]] != 1:
        return None
    b = ys[0][0]
    beta = V.get((b, 0, 0), Fraction(0))
    if set(V) != {(b, 1, 0), (b, 0, 0)} or beta == 0 or b <= 0:
        return None
    a, d = pu[0], pw[0]
    if not d < a:
        raise ConstraintViolated(f"line_w needs d < a, got a = {a}, d = {d}")
    return BForm("line_w", {"a": a, "b": b, "d": d, "beta": beta})


def _match_plane_w(f, U, V, W):
    pu, pv, pw = _single(U), _single(V), _single(W)
    if not (pu and pv and pw and pu[2] == 0 and pv[2] == 0 and pw[2] == 1):
        return None
    (a, b), (c, d), (g, h) = pu[:2], pv[:2], pw[:2]
    if a * d - b * c == 0:
        return None
    if not _lt((g, h), (a, b)):
        raise ConstraintViolated(f"plane_w needs (g, h) < (a, b), got {(g, h)} and {(a, b)}")
    return BForm("plane_w", {"a": a, "b": b, "c": c, "d": d, "g": g, "h": h})


_MATCHERS = {(ONE, ONE): _match_line_v, (TWO, ONE): _match_plane_v,
             (ONE, TWO): _match_line_w, (TWO, TWO): _match_plane_w}


def match_bform(f: LocalForm) -> BForm:
    """Recognize one of the four B-forms; NotABForm otherwise."""
    matcher = _MATCHERS.get((f.source, f.target))
    if matcher is None:
        raise NotABForm(f"no B-form over {f.source.value} -> {f.target.value}")
    W = monomials(f.w)
    if ZERO in W:
        raise NotABForm("w does not vanish at the point")
    hit = matcher(f, monomials(f.u), monomials(f.v), W)
    if hit is None:
        raise NotABForm("components do not have a B-form shape")
    return hit


def descent_counter(f) -> DescentCounter:
    bf = f if isinstance(f, BForm) else match_bform(f)
    p = bf.params
    if bf.kind == "line_v":
        value = p["a"] - p["b"]
    elif bf.kind == "plane_v":
        value = p["a"] * p["k"] - p["c"] + p["b"] * p["k"] - p["d"]
    elif bf.kind == "line_w":
        value = p["a"] - p["d"]
    else:
        value = p["a"] - p["g"] + p["b"] - p["h"]
    return DescentCounter(value, bf.kind)


def bform_tau(bf: BForm, measure: str = "length", form: LocalForm | None = None) -> Tau:
    """tau attached to a B-form.

    For the two forms with a sum in w it is the size of (mZ + sum iZ)/mZ
    over the nonzero coefficients, m = a or k.  The other two are prepared
    forms and use tau directly.
    """
    if bf.kind in ("line_v", "plane_v"):
        m = bf["a"] if bf.kind == "line_v" else bf["k"]
        H = [(m,)] + [(i,) for (i, _), c in sorted(bf.terms.items()) if c]
        rep = quotient(SubLattice(H), SubLattice([(m,)]))
        return Tau(rep.measure(measure), measure)
    if form is None:
        form = (line_w_form(bf["a"], bf["b"], bf["d"], bf["beta"]) if bf.kind == "line_w" else
                plane_w_form(*(bf[k] for k in "abcdgh")))
    return tau(form, measure)[0]


def blowup_curves(f) -> tuple:
    """Which of the curves x = z = 0, y = z = 0 lie in the center at this point."""
    bf = f if isinstance(f, BForm) else match_bform(f)
    if bf.kind == "plane_v":
        return tuple(n for n, ok in (("x", bf["c"] < bf["a"] * bf["k"]), ("y", bf["d"] < bf["b"] * bf["k"])) if ok)
    if bf.kind == "plane_w":
        return tuple(n for n, ok in (("x", bf["g"] < bf["a"]), ("y", bf["h"] < bf["b"])) if ok)
    return ("x",)


def bform_is_good(bf: BForm) -> bool:
    """The goodness condition carried along the descent: m never divides i."""
    if bf.kind not in ("line_v", "plane_v"):
        return True
    m = bf["a"] if bf.kind == "line_v" else bf["k"]
    return all(i % m for (i, _), c in bf.terms.items() if c)


def curve_blowup_step(f: LocalForm, chart: ChartTransform, degree: int = DEFAULT_DEGREE,
                      measure: str = "length") -> TransformResult:
    """Blow up the curve x = z = 0 (or y = z = 0 with ``chart.curve == "y"``).

    ``chart.chart`` is ``"translate"`` (x = x2, z = x2 (z2 + alpha)) or
    ``"exchange"`` (x = x2 z2, z = z2).
    """
    bf = match_bform(f)
    if chart.chart not in ("translate", "exchange"):
        raise MalformedInput(f"chart must be 'translate' or 'exchange', not {chart.chart!r}")
    if chart.curve == "y":
        if bf.kind not in ("plane_v", "plane_w"):
            raise UnsupportedCase(f"{bf.kind} has no curve y = z = 0")
        res = curve_blowup_step(swap_xy(f), replace(chart, curve="x"), degree, measure)
        return _unswap(f, res, chart, measure)
    if bf.kind == "plane_v" and not bf["c"] < bf["a"] * bf["k"]:
        raise ConstraintViolated("x = z = 0 is not a curve of the center: c >= ak")
    if bf.kind == "plane_w" and not bf["g"] < bf["a"]:
        raise ConstraintViolated("x = z = 0 is not a curve of the center: g >= a")
    counter = descent_counter(bf)
    tau_before = bform_tau(bf, measure, f)
    step = {"line_v": _step_line_v, "plane_v": _step_plane_v,
            "line_w": _step_line_w, "plane_w": _step_plane_w}[bf.kind]
    after, maps, case = step(bf, chart, degree)
    src, tmap, coords = maps
    ch = replace(chart, source_map=src, target_map=tmap, coordinates=coords)
    return _evaluate(f, tau_before, ch, after, measure, f"{bf.kind}:{case}", counter,
                     reentry=case == "reentry")


def _chart_source(chart, degree):
    if chart.chart == "translate":
        return {"x": _var("x", degree), "y": _var("y", degree),
                "z": _mono((1, 0, 1), degree) + _mono((1, 0, 0), degree, chart.alpha)}
    return {"x": _mono((1, 0, 1), degree), "y": _var("y", degree), "z": _var("z", degree)}


def _swap_yz(degree):
    return {"x": _var("x", degree), "y": _var("z", degree), "z": _var("y", degree)}


def _tmap(degree, **polys):
    out = _target_identity(degree)
    for k, terms in polys.items():
        out[k] = _tpoly(terms, degree)
    return out


def _completion(absorbed, anchor, lam, alpha, degree):
    """sum c x^(p - anchor) eps^(r - (p - anchor).lam) over absorbed (c, p, r, extra)."""
    total = _const(0, degree)
    for c, p, r, extra in absorbed:
        dp = tuple(a - b for a, b in zip(p, anchor))
        e = r - sum(x * l for x, l in zip(dp, lam))
        term = _mono(dp, degree, c) * _eps(alpha, "z", e, degree)
        total = total + (term * extra if extra is not None else term)
    beta = total.constant_term
    return total - _const(beta, degree), beta


def _step_line_v(bf, chart, degree):
    a, b, n, beta = (bf[k] for k in ("a", "b", "n", "beta"))
    alpha, src = chart.alpha, _chart_source(chart, degree)
    yb = _var("y", degree) + _const(beta, degree)
    if chart.chart == "exchange":
        items = [((i + b * j, i + (b + 1) * j, 0), _const(c, degree)) for (i, j), c in bf.terms.items()]
        w = _terms(items + [((n, n, 0), _var("z", degree) + _const(beta, degree))])
        after = LocalForm(TWO, TWO, Expansion.monomial((a - b, a - b - 1, 0), degree=degree),
                          Expansion.monomial((b, b + 1, 0), degree=degree), w,
                          "curve chart exchange")
        return after, (src, _tmap(degree, u={(1, 1, 0): 1}), _swap_yz(degree)), "exchange"
    if a == b + 1:
        items = [((i + a * j, 0, 0), _eps(alpha, "y", j, degree) * c) for (i, j), c in bf.terms.items()]
        w = _terms(items + [((n, 0, 0), _var("z", degree) + _const(beta, degree))])
        after = LocalForm(ONE, ONE, Expansion.monomial((a, 0, 0), degree=degree),
                          Expansion.variable("y", degree), w, "curve chart, v = u (v1 + alpha)")
        tm = _tmap(degree, v={(1, 1, 0): 1, (1, 0, 0): alpha})
        return after, (src, tm, _swap_yz(degree)), "terminal"
    if alpha == 0:
        after = line_v_form(a, b + 1, n, beta, bf.terms, degree)
        return after, (src, _target_identity(degree), _source_identity(degree)), "reentry"
    r = a - b - 1
    abar = exact_power(alpha, Fraction(a, r))
    low, absorbed, exact = {}, [], True
    for (i, j), c in bf.terms.items():
        s = i + (b + 1) * j
        e = j + Fraction(s, r)
        if s >= n:
            absorbed.append((c, (s, 0, 0), e, None))
            continue
        exact &= (e * Fraction(r, a)).denominator == 1
        low[(s, 0, 0)] = low.get((s, 0, 0), _const(0, degree)) + _rel(
            alpha, abar, "y", e, Fraction(a, r), degree) * c
    absorbed.append((Fraction(1), (n, 0, 0), Fraction(n, r), yb))
    zc, bbar = _completion(absorbed, (n, 0, 0), (Fraction(1, r), 0, 0), alpha, degree)
    w = Expansion(tuple(Term(p, c) for p, c in sorted(low.items()))
                  + (Term((n, 0, 0), _var("z", degree) + _const(bbar, degree)),),
                  "series_plus_z", exact)
    after = LocalForm(ONE, TWO, Expansion.monomial((r, 0, 0), degree=degree),
                      Expansion.translate((b + 1, 0, 0), abar, "y", degree), w,
                      "curve chart, u = u1 v1, v = v1")
    coords = {"x": _var("x", degree) * _eps(alpha, "z", Fraction(-1, r), degree),
              "y": _eps(alpha, "z", Fraction(a, r), degree) - _const(abar, degree), "z": zc}
    return after, (src, _tmap(degree, u={(1, 1, 0): 1}), coords), "translate"


def _step_plane_v(bf, chart, degree):
    a, b, k, c, d, e, f = (bf[x] for x in "abkcdef")
    alpha, src = chart.alpha, _chart_source(chart, degree)
    if chart.chart == "exchange":
        items = [((a * i + c * l, b * i + d * l, l + a * i + c * l), _const(co, degree))
                 for (i, l), co in bf.terms.items()]
        w = _terms(items + [((e, f, e), _const(1, degree))])
        after = LocalForm(THREE, TWO, Expansion.monomial((a * k - c, b * k - d, a * k - c - 1), degree=degree),
                          Expansion.monomial((c, d, c + 1), degree=degree), w, "curve chart exchange")
        return after, (src, _tmap(degree, u={(1, 1, 0): 1}), _source_identity(degree)), "exchange"
    if (c + 1, d) == (a * k, b * k):
        items = [((a * (i + l * k), b * (i + l * k), 0), _eps(alpha, "z", l, degree) * co)
                 for (i, l), co in bf.terms.items()]
        w = _terms(items + [((e, f, 0), _const(1, degree))])
        after = LocalForm(TWO, ONE, Expansion.monomial((a * k, b * k, 0), degree=degree),
                          Expansion.variable("z", degree), w, "curve chart, v = u (v1 + alpha)")
        tm = _tmap(degree, v={(1, 1, 0): 1, (1, 0, 0): alpha})
        return after, (src, tm, _source_identity(degree)), "terminal"
    if alpha == 0:
        after = plane_v_form(a, b, k, c + 1, d, e, f, bf.terms, degree)
        return after, (src, _target_identity(degree), _source_identity(degree)), "reentry"
    tm = _tmap(degree, u={(1, 1, 0): 1})
    pu, pv = (a * k - c - 1, b * k - d), (c + 1, d)
    terms = [(co, (a * i + (c + 1) * l, b * i + d * l, 0), Fraction(l), i, l)
             for (i, l), co in bf.terms.items()]
    lam = _solve2([pu, pv], (Fraction(1), Fraction(-1)))
    if lam is not None:
        lam3 = (lam[0], lam[1], 0)

        def rr(p, r0):
            return r0 + p[0] * lam[0] + p[1] * lam[1]

        low, absorbed = {}, []
        for co, p, r0, _, _ in terms:
            if _geq(p, (e, f, 0)):
                absorbed.append((co, p, rr(p, r0), None))
            elif rr(p, r0) != 0:
                raise UnsupportedCase(f"term {p} keeps a unit below the anchor")
            else:
                low[p] = low.get(p, 0) + co
        absorbed.append((Fraction(1), (e, f, 0), rr((e, f), 0), None))
        zc, bbar = _completion(absorbed, (e, f, 0), lam3, alpha, degree)
        w = Expansion.series_plus_z([(p, co) for p, co in sorted(low.items()) if co], (e, f, 0),
                                    bbar, degree)
        after = LocalForm(TWO, TWO, Expansion.monomial(pu + (0,), degree=degree),
                          Expansion.monomial(pv + (0,), degree=degree), w,
                          "curve chart, u = u1 v1, independent")
        coords = {"x": _var("x", degree) * _eps(alpha, "z", -lam[0], degree),
                  "y": _var("y", degree) * _eps(alpha, "z", -lam[1], degree), "z": zc}
        return after, (src, tm, coords), "translate_independent"
    tbar, kbar = Fraction(pu[0], a), Fraction(pv[0], a)
    if tbar.denominator != 1 or kbar.denominator != 1 or tbar <= 0 or kbar <= 0:
        raise UnsupportedCase("proportional chart without integral multiplicities")
    tbar, kbar = int(tbar), int(kbar)
    mu = _solve2([(a, b), (e, f)], (Fraction(1, tbar), Fraction(0)))
    nu = Fraction(k, tbar)
    abar = exact_power(alpha, nu)
    items = []
    for co, p, r0, i, l in terms:
        e_ = r0 + p[0] * mu[0] + p[1] * mu[1]
        items.append(((a * (i + kbar * l), b * (i + kbar * l), 0), _rel(alpha, abar, "z", e_, nu, degree) * co))
    items.append(((e, f, 0), _const(1, degree)))
    after = LocalForm(TWO, TWO, Expansion.monomial((a * tbar, b * tbar, 0), degree=degree),
                      Expansion.translate((a * kbar, b * kbar, 0), abar, "z", degree),
                      _terms(items, exact=False), "curve chart, u = u1 v1, proportional")
    coords = {"x": _var("x", degree) * _eps(alpha, "z", -mu[0], degree),
              "y": _var("y", degree) * _eps(alpha, "z", -mu[1], degree),
              "z": _eps(alpha, "z", nu, degree) - _const(abar, degree)}
    return after, (src, tm, coords), "translate_proportional"


def _step_line_w(bf, chart, degree):
    a, b, d, beta = (bf[k] for k in ("a", "b", "d", "beta"))
    alpha, src = chart.alpha, _chart_source(chart, degree)
    if chart.chart == "exchange":
        after = LocalForm(TWO, THREE, Expansion.monomial((a - d, a - d - 1, 0), degree=degree),
                          Expansion.translate((b, b, 0), beta, "z", degree),
                          Expansion.monomial((d, d + 1, 0), degree=degree), "curve chart exchange")
        return after, (src, _tmap(degree, u={(1, 0, 1): 1}), _swap_yz(degree)), "exchange"
    if d + 1 == a:
        after = line_w_form(a, b, d, beta, degree).replace(
            w=Expansion.variable("z", degree), provenance="curve chart, w = u (w1 + alpha)")
        tm = _tmap(degree, w={(1, 0, 1): 1, (1, 0, 0): alpha})
        return after, (src, tm, _source_identity(degree)), "terminal"
    if alpha == 0:
        return line_w_form(a, b, d + 1, beta, degree), (
            src, _target_identity(degree), _source_identity(degree)), "reentry"
    r = a - d - 1
    abar = exact_power(alpha, Fraction(a, r))
    bbar = beta * exact_power(alpha, Fraction(b, r))
    after = LocalForm(ONE, THREE, Expansion.monomial((r, 0, 0), degree=degree),
                      Expansion.translate((b, 0, 0), bbar, "y", degree),
                      Expansion.translate((d + 1, 0, 0), abar, "z", degree),
                      "curve chart, u = u1 w1, w = w1")
    yb = _var("y", degree) + _const(beta, degree)
    coords = {"x": _var("x", degree) * _eps(alpha, "z", Fraction(-1, r), degree),
              "y": _eps(alpha, "z", Fraction(b, r), degree) * yb - _const(bbar, degree),
              "z": _eps(alpha, "z", Fraction(a, r), degree) - _const(abar, degree)}
    return after, (src, _tmap(degree, u={(1, 0, 1): 1}), coords), "translate"


def _step_plane_w(bf, chart, degree):
    a, b, c, d, g, h = (bf[k] for k in "abcdgh")
    alpha, src = chart.alpha, _chart_source(chart, degree)
    if chart.chart == "exchange":
        after = LocalForm(THREE, THREE, Expansion.monomial((a - g, b - h, a - g - 1), degree=degree),
                          Expansion.monomial((c, d, c), degree=degree),
                          Expansion.monomial((g, h, g + 1), degree=degree), "curve chart exchange")
        return after, (src, _tmap(degree, u={(1, 0, 1): 1}), _source_identity(degree)), "exchange"
    if (g + 1, h) == (a, b):
        after = plane_w_form(a, b, c, d, g, h, degree).replace(
            w=Expansion.variable("z", degree), provenance="curve chart, w = u (w1 + alpha)")
        tm = _tmap(degree, w={(1, 0, 1): 1, (1, 0, 0): alpha})
        return after, (src, tm, _source_identity(degree)), "terminal"
    if alpha == 0:
        return plane_w_form(a, b, c, d, g + 1, h, degree), (
            src, _target_identity(degree), _source_identity(degree)), "reentry"
    comps = [((a - g - 1, b - h), Fraction(-1)), ((c, d), Fraction(0)), ((g + 1, h), Fraction(1))]
    for i, j in ((0, 1), (1, 2), (0, 2)):
        lam = _solve2([comps[i][0], comps[j][0]], (-comps[i][1], -comps[j][1]))
        if lam is None:
            continue
        m = 3 - i - j
        pm, rm = comps[m]
        kappa = rm + pm[0] * lam[0] + pm[1] * lam[1]
        if kappa == 0:
            continue
        abar = exact_power(alpha, kappa)
        out = [None, None, None]
        out[i] = Expansion.monomial(comps[i][0] + (0,), degree=degree)
        out[j] = Expansion.monomial(comps[j][0] + (0,), degree=degree)
        out[m] = Expansion.translate(pm + (0,), abar, "z", degree)
        after = LocalForm(TWO, THREE, *out, "curve chart, u = u1 w1, w = w1")
        coords = {"x": _var("x", degree) * _eps(alpha, "z", -lam[0], degree),
                  "y": _var("y", degree) * _eps(alpha, "z", -lam[1], degree),
                  "z": _eps(alpha, "z", kappa, degree) - _const(abar, degree)}
        return after, (src, _tmap(degree, u={(1, 0, 1): 1}), coords), "translate"
    raise UnsupportedCase("no two components can be made monomial in this chart")


def apply_chart(f: LocalForm, chart: ChartTransform, degree: int = DEFAULT_DEGREE,
                measure: str = "length") -> TransformResult:
    """Dispatch on the center kind of the chart."""
    if chart.center == "Source2Curve":
        return blow_source_2curve(f, chart, degree, measure)
    if chart.center == "SourceCurve":
        return curve_blowup_step(f, chart, degree, measure)
    if chart.center in ("TargetPoint", "TargetCurve"):
        return blow_target_point_chart(f, chart, degree, measure)
    raise UnsupportedCase(f"no charts implemented for center {chart.center}")
