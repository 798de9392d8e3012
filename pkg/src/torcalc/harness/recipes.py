"""Change-of-parameter and specialization recipes.

Every recipe rewrites a prepared form in new parameters and keeps the maps
it used (source variables to chart coordinates, old target parameters as
polynomials in the new ones, new source coordinates in chart coordinates),
so the substitution oracle that checks blow-up charts checks these as well.

Independence recipes (tau must not change):

* ``swap_uv``: exchange u and v over a 1-point, x = xb (alpha + y)^(-1/b);
* ``to_swapped_line``: turn u, v, w with a y-linear w into the form where
  v carries z and w = y;
* ``shift_w``: w -> w + phi(u, v).

Specializations (tau may only drop) move from a 3-point to a nearby 2-point
or 1-point of the divisor, see ``specialize``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from ..blowup import (TARGET_VARS, _const, _eps, _mono, _rel, _solve2, _target_identity,
                      _tpoly, _var, monomials)
from ..errors import MalformedInput, NoMatch, UnrepresentableConstant, UnsupportedCase
from ..forms import Expansion, LocalForm, PointType, Term, classify_toroidal
from ..forms.canonical import split_rank
from ..forms.model import VARS, ZERO
from ..forms.pairs import classify_pair_parts, det2, det3
from ..series import DEFAULT_DEGREE, TruncatedSeries, as_fraction, exact_power
from ..tau import Tau, tau

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE


@dataclass(frozen=True)
class Rewrite:
    """A form rewritten in new parameters, with tau on both sides.

    ``relation`` is ``"equal"`` for the independence recipes and
    ``"at_most"`` for specializations.
    """

    recipe: str
    before: LocalForm
    after: LocalForm
    source_map: dict
    target_map: dict
    coordinates: dict
    tau_before: Tau
    tau_after: Tau
    relation: str
    constants: tuple = ()
    note: str = ""
    cert_before: object = None
    cert_after: object = None

    @property
    def holds(self) -> bool:
        if self.relation == "equal":
            return self.tau_after == self.tau_before
        return self.tau_after <= self.tau_before

    def to_json(self) -> dict:
        return {"recipe": self.recipe, "relation": self.relation,
                "constants": [str(c) for c in self.constants],
                "tau_before": str(self.tau_before), "tau_after": str(self.tau_after),
                "holds": self.holds, "note": self.note}


def _identity(degree):
    return {v: _var(v, degree) for v in VARS}


def _finish(recipe, f, after, smap, tmap, coords, relation, measure, constants=(), note=""):
    t0, c0 = tau(f, measure)
    t1, c1 = tau(after, measure)
    return Rewrite(recipe, f, after, smap, tmap, coords, t0, t1, relation, tuple(constants), note, c0, c1)


# independence recipes

def _line_pair(f: LocalForm):
    if f.source is not ONE or f.target is not TWO:
        raise UnsupportedCase("the recipe needs a 1-point over a 2-point")
    try:
        pair = classify_pair_parts(f.source, f.target, f.u, f.v)
    except NoMatch as exc:
        raise UnsupportedCase(f"(u, v) is not a line pair: {exc}") from exc
    if pair.case != "1":
        raise UnsupportedCase("(u, v) is not a line pair")
    wit = pair.witnesses
    return wit["a"], wit["b"], wit["alpha"]


def _z_anchor(W):
    zs = [p for p in W if p[2]]
    if not zs:
        raise UnsupportedCase("w does not involve z")
    c = min(p[0] for p in zs)
    if (c, 0, 1) not in W or any(p[0] < c for p in zs):
        raise UnsupportedCase("w has no term x^c z below its other z terms")
    return c


def swap_uv(f: LocalForm, degree: int = DEFAULT_DEGREE, measure: str = "length") -> Rewrite:
    """Exchange u and v for u = x^a, v = x^b (alpha + y).

    New coordinates xb = x (alpha + y)^(1/b), yb = (alpha + y)^(-a/b) - alpha^(-a/b)
    give v = xb^b, u = xb^a (abar + yb); z is rescaled by (alpha + y)^(-c/b).
    """
    a, b, alpha = _line_pair(f)
    W = monomials(f.w)
    c = _z_anchor(W)
    abar = exact_power(alpha, Fraction(-a, b))
    # y as a series in the new y, on the branch with constant alpha
    ynew = _var("y", degree).scale(1 / abar) + _const(1, degree)
    y_old = ynew.rational_power(Fraction(-b, a)).scale(alpha) - _const(alpha, degree)
    low: dict = {}
    completion = _const(0, degree)
    for p, co in W.items():
        if p[0] < c:
            if p[2]:
                raise UnsupportedCase("z appears below the anchor")
            unit = ynew.rational_power(Fraction(p[0], a)).scale(exact_power(alpha, Fraction(-p[0], b)))
            yj = y_old ** p[1] if p[1] else _const(1, degree)
            low[p[0]] = low.get(p[0], _const(0, degree)) + unit * yj * co
        else:
            completion = completion + _mono((p[0] - c, p[1], p[2]), degree, co)
    completion = completion * _eps(alpha, "y", Fraction(-c, b), degree)
    bbar = completion.constant_term
    terms = tuple(Term((i, 0, 0), s) for i, s in sorted(low.items()) if not s.is_zero())
    w = Expansion(terms + (Term((c, 0, 0), _const(bbar, degree) + _var("z", degree)),),
                  "series_plus_z", False)
    after = LocalForm(ONE, TWO, Expansion.monomial((b, 0, 0), degree=degree),
                      Expansion.translate((a, 0, 0), abar, "y", degree), w, "u and v exchanged")
    coords = {"x": _var("x", degree) * _eps(alpha, "y", Fraction(1, b), degree),
              "y": _eps(alpha, "y", Fraction(-a, b), degree) - _const(abar, degree),
              "z": completion - _const(bbar, degree)}
    return _finish("swap_uv", f, after, _identity(degree), _target_identity(degree, (1, 0, 2)),
                   coords, "equal", measure, (alpha,))


def to_swapped_line(f: LocalForm, degree: int = DEFAULT_DEGREE, measure: str = "length") -> Rewrite:
    """Use w as the new y when w has a nonzero linear term in y.

    The output is u = x^a, v = x^b (alpha + y(x, w, z)), w = y, where y(x, w, z)
    solves the equation for w by fixed-point iteration.
    """
    a, b, alpha = _line_pair(f)
    wval = f.w.value(degree)
    lam = wval.coefficient((0, 1, 0))
    if lam == 0:
        raise UnsupportedCase("w has no linear term in y")
    rest = wval - _var("y", degree).scale(lam)
    y = TruncatedSeries.zero(VARS, degree)
    for _ in range(degree + 1):
        y = (_var("y", degree) - rest.substitute({"y": y})).scale(1 / lam)
    v_new = f.v.value(degree).substitute({"y": y})
    after = LocalForm(ONE, TWO, f.u, Expansion.raw(v_new), Expansion.variable("y", degree),
                      "w taken as the new y")
    coords = {"x": _var("x", degree), "y": wval, "z": _var("z", degree)}
    return _finish("to_swapped_line", f, after, _identity(degree), _target_identity(degree),
                   coords, "equal", measure)


def shift_w(f: LocalForm, phi: dict, degree: int = DEFAULT_DEGREE, measure: str = "length") -> Rewrite:
    """Replace w by w + phi(u, v), phi = {(r, s): c} with r + s >= 1."""
    if any(r + s < 1 or r < 0 or s < 0 for r, s in phi):
        raise MalformedInput("phi must lie in the ideal (u, v)")
    if len(f.u.terms) != 1 or len(f.v.terms) != 1:
        raise UnsupportedCase("u and v must be single terms")
    (tu,), (tv,) = f.u.terms, f.v.terms
    added = []
    for (r, s), c in sorted(phi.items()):
        c = as_fraction(c)
        if not c:
            continue
        coeff = _const(c, degree)
        for t, k in ((tu, r), (tv, s)):
            if k:
                coeff = coeff * t.coeff ** k
        exp = tuple(r * p + s * q for p, q in zip(tu.exponent, tv.exponent))
        added.append(Term(exp, coeff))
    after = f.replace(w=Expansion(f.w.terms + tuple(added), "indexed_sum", f.w.exact),
                      provenance="w + phi(u, v)")
    tmap = _target_identity(degree)
    poly = {(0, 0, 1): Fraction(1)}
    for (r, s), c in phi.items():
        poly[(r, s, 0)] = poly.get((r, s, 0), 0) - as_fraction(c)
    tmap["w"] = _tpoly(poly, degree)
    return _finish("shift_w", f, after, _identity(degree), tmap, _identity(degree), "equal", measure,
                   note=str({k: str(v) for k, v in phi.items()}))


# specializations of a 3-point

SPECIALIZATIONS = ("independent", "proportional", "v_unit", "toroidal", "one_point_line",
                   "one_point_unit")


@dataclass(frozen=True)
class Setting:
    """Which recipe, the source axis involved, and whether u, v are exchanged.

    For the 2-point recipes ``axis`` is the translated variable; for the
    1-point recipes it is the variable that stays on the divisor.
    """

    recipe: str
    axis: int
    swap: bool = False

    @property
    def label(self) -> str:
        return f"{self.recipe}@{VARS[self.axis]}" + ("/swap" if self.swap else "")


@dataclass
class _Generic:
    perm: tuple
    U: tuple
    V: tuple
    N: tuple | None
    W: dict
    rows: list = field(default_factory=list)


def _generic(f: LocalForm) -> _Generic:
    """Read off the rank 2 pair and the rank 3 anchor of a 3-point form."""
    if f.source is not THREE:
        raise UnsupportedCase("specializations start at a 3-point")
    if f.target is THREE:
        try:
            tor = classify_toroidal(f)
        except NoMatch as exc:
            raise UnsupportedCase("over a 3-point only toroidal forms are specialized") from exc
        perm = tor.witnesses["permutation"]
        rows = [monomials(c) for c in f.components()]
        if any(list(r.values()) != [1] for r in rows):
            raise UnsupportedCase("only monomial toroidal forms are specialized")
        rows = [next(iter(r)) for r in rows]
        return _Generic(perm, rows[0], rows[1], None, {}, rows)
    if f.target is not TWO:
        raise UnsupportedCase("a 3-point lies over a 2-point or a 3-point")
    for perm in ((0, 1, 2), (1, 0, 2)):
        g = f.permuted(perm)
        try:
            pair = classify_pair_parts(g.source, g.target, g.u, g.v)
        except NoMatch:
            continue
        U, V = pair.witnesses["u"], pair.witnesses["v"]
        try:
            split = split_rank(g.w.graded(g.source), (U, V))
        except (NoMatch, MalformedInput):
            continue
        return _Generic(perm, U, V, split.anchor, monomials(g.w))
    raise UnsupportedCase("no rank 2 pair with a rank 3 term in w")


def _proj(p, axes):
    return tuple(p[i] for i in axes)


def _direction(q):
    k = gcd(q[0], q[1])
    return (q[0] // k, q[1] // k), k


def applicable(f: LocalForm) -> list:
    """Every specialization setting the form admits."""
    g = _generic(f)
    out = []
    if f.target is THREE:
        return [Setting("toroidal", t) for t in range(3)]
    for t in range(3):
        axes = tuple(i for i in range(3) if i != t)
        pu, pv = _proj(g.U, axes), _proj(g.V, axes)
        if det2(*pu, *pv):
            out.append(Setting("independent", t))
            continue
        for swap, (p1, p2) in ((False, (pu, pv)), (True, (pv, pu))):
            if any(p1) and not any(p2) and min(p1) > 0:
                out.append(Setting("v_unit", t, swap))
        if any(pu) and any(pv) and min(pu) > 0 and min(pv) > 0:
            out.append(Setting("proportional", t))
    for i in range(3):
        for swap, (r1, r2) in ((False, (g.U, g.V)), (True, (g.V, g.U))):
            if r1[i]:
                out.append(Setting("one_point_line" if r2[i] else "one_point_unit", i, swap))
                break
    return out


def specialize(f: LocalForm, setting: Setting, constants, degree: int = DEFAULT_DEGREE,
               measure: str = "length") -> Rewrite:
    """Move from the 3-point of f to a nearby point of the divisor.

    ``constants`` are the nonzero values of the translated variables (one for
    a 2-point, two for a 1-point).  Raises UnsupportedCase when the setting
    does not apply and UnrepresentableConstant when a needed root of a
    constant is irrational.
    """
    constants = tuple(as_fraction(c) for c in constants)
    if any(c == 0 for c in constants):
        raise MalformedInput("translation constants must be nonzero")
    g = _generic(f)
    if setting.swap:
        g.U, g.V = g.V, g.U
        g.perm = (g.perm[1], g.perm[0], g.perm[2])
    fn = {"independent": _independent, "proportional": _proportional, "v_unit": _v_unit,
          "toroidal": _toroidal, "one_point_line": _one_point,
          "one_point_unit": _one_point}.get(setting.recipe)
    if fn is None:
        raise MalformedInput(f"unknown specialization {setting.recipe!r}")
    after, smap, tmap, coords = fn(g, setting, constants, degree)
    return _finish(setting.label, f, after, smap, tmap, coords, "at_most", measure, constants)


def _shift_map(axes_consts, degree):
    smap = _identity(degree)
    for i, c in axes_consts:
        smap[VARS[i]] = _var(VARS[i], degree) + _const(c, degree)
    return smap


def _two_point_setup(g, setting, constants):
    if len(constants) != 1:
        raise MalformedInput("a 2-point specialization takes one constant")
    t = setting.axis
    axes = tuple(i for i in range(3) if i != t)
    return t, axes, constants[0]


def _unit_in(t, e, alpha, degree):
    return _eps(alpha, VARS[t], e, degree)


def _independent(g, setting, constants, degree):
    t, axes, alpha = _two_point_setup(g, setting, constants)
    pu, pv, pn = _proj(g.U, axes), _proj(g.V, axes), _proj(g.N, axes)
    lam = _solve2([pu, pv], (Fraction(-g.U[t]), Fraction(-g.V[t])))
    if lam is None:
        raise UnsupportedCase("the pair is not independent on this 2-point")

    def kappa(p):
        return p[t] + sum(p[i] * l for i, l in zip(axes, lam))

    lam3 = [Fraction(0)] * 3
    for i, l in zip(axes, lam):
        lam3[i] = l
    low, absorbed = {}, []
    for p, c in g.W.items():
        q = _proj(p, axes)
        if all(a >= b for a, b in zip(q, pn)):
            absorbed.append((c, p, kappa(p), None))
        elif kappa(p):
            raise UnsupportedCase(f"term {p} keeps a unit below the anchor")
        else:
            low[q + (0,)] = low.get(q + (0,), 0) + c
    zc, beta = _anchor_completion(absorbed, g.N, lam3, t, alpha, degree)
    w = Expansion.series_plus_z([(p, c) for p, c in sorted(low.items()) if c], pn + (0,), beta, degree)
    w, w0 = _drop_constant(w, degree)
    after = LocalForm(TWO, TWO, Expansion.monomial(pu + (0,), degree=degree),
                      Expansion.monomial(pv + (0,), degree=degree), w, "2-point, independent pair")
    coords = {"x": _var(VARS[axes[0]], degree) * _unit_in(t, -lam[0], alpha, degree),
              "y": _var(VARS[axes[1]], degree) * _unit_in(t, -lam[1], alpha, degree), "z": zc}
    _require_coordinate(coords)
    tmap = _target_identity(degree, g.perm)
    _add_constant(tmap, 2, w0, degree)
    return after, _shift_map([(t, alpha)], degree), tmap, coords


def _add_constant(tmap, old, c, degree):
    """Old parameter number ``old`` equals its new expression plus c."""
    if c:
        name = TARGET_VARS[old]
        tmap[name] = tmap[name] + _tpoly({ZERO: c}, degree)


def _drop_constant(w: Expansion, degree):
    """w minus its value at the point, and that value.

    A term that is a unit at the new point makes w nonzero there; the target
    parameter is recentred instead.
    """
    w0 = w.value(degree).constant_term
    if not w0:
        return w, w0
    terms = tuple(Term(t.exponent, t.coeff - _const(t.coeff.constant_term, degree))
                  if t.exponent == ZERO else t for t in w.terms)
    return Expansion(terms, w.kind, w.exact), w0


def _anchor_completion(absorbed, anchor, lam3, t, alpha, degree):
    """Sum of c X^(p - anchor) (alpha + t)^(kappa) over absorbed terms, minus its constant."""
    total = _const(0, degree)
    for c, p, kap, _ in absorbed:
        dp = [a - b for a, b in zip(p, anchor)]
        e = kap - sum(dp[i] * lam3[i] for i in range(3) if i != t)
        dp[t] = 0
        total = total + _mono(dp, degree, c) * _unit_in(t, e, alpha, degree)
    beta = total.constant_term
    return total - _const(beta, degree), beta


def _require_coordinate(coords):
    lin = [[coords[v].coefficient(tuple(1 if i == j else 0 for i in range(3))) for j in range(3)]
           for v in VARS]
    if det3(*lin) == 0:
        raise UnsupportedCase("the new parameters are not regular at this point")


def _power_setup(g, axes, t, p_main):
    (ab, bb), k = _direction(p_main)
    if ab <= 0 or bb <= 0:
        raise UnsupportedCase("the pair direction has a zero entry")
    pn = _proj(g.N, axes)
    lam = _solve2([(ab, bb), pn], (Fraction(-g.U[t], k), Fraction(-g.N[t])))
    if lam is None:
        raise UnsupportedCase("the anchor is proportional to the pair")
    return (ab, bb), k, lam


def _proportional(g, setting, constants, degree):
    t, axes, alpha = _two_point_setup(g, setting, constants)
    pu, pv = _proj(g.U, axes), _proj(g.V, axes)
    if det2(*pu, *pv) or not any(pu) or not any(pv):
        raise UnsupportedCase("the pair is not proportional on this 2-point")
    (ab, bb), k, lam = _power_setup(g, axes, t, pu)
    tt = pv[0] // ab if ab else pv[1] // bb
    nu = g.V[t] + tt * (ab * lam[0] + bb * lam[1])
    if nu == 0:
        raise UnsupportedCase("v has no unit left to translate")
    abar = exact_power(alpha, nu)
    items, exact = [], True
    for p, c in g.W.items():
        e = p[t] + sum(p[i] * l for i, l in zip(axes, lam))
        exact &= (e / nu).denominator == 1 and e >= 0
        items.append((_proj(p, axes) + (0,), _rel(alpha, abar, "z", e, nu, degree) * c))
    acc: dict = {}
    for p, c in items:
        acc[p] = acc[p] + c if p in acc else c
    w = Expansion(tuple(Term(p, c) for p, c in sorted(acc.items())), "indexed_sum", exact)
    w, w0 = _drop_constant(w, degree)
    after = LocalForm(TWO, TWO, Expansion.monomial(pu + (0,), degree=degree),
                      Expansion.translate(pv + (0,), abar, "z", degree), w,
                      "2-point, proportional pair")
    coords = {"x": _var(VARS[axes[0]], degree) * _unit_in(t, -lam[0], alpha, degree),
              "y": _var(VARS[axes[1]], degree) * _unit_in(t, -lam[1], alpha, degree),
              "z": _unit_in(t, nu, alpha, degree) - _const(abar, degree)}
    _require_coordinate(coords)
    tmap = _target_identity(degree, g.perm)
    _add_constant(tmap, 2, w0, degree)
    return after, _shift_map([(t, alpha)], degree), tmap, coords


def _v_unit(g, setting, constants, degree):
    t, axes, alpha = _two_point_setup(g, setting, constants)
    pu, pv = _proj(g.U, axes), _proj(g.V, axes)
    if any(pv) or not any(pu):
        raise UnsupportedCase("v is not a unit on this 2-point")
    (ab, bb), k, lam = _power_setup(g, axes, t, pu)
    f_ = g.V[t]
    abar = exact_power(alpha, f_)
    acc: dict = {}
    for p, c in g.W.items():
        e = p[t] + sum(p[i] * l for i, l in zip(axes, lam))
        q = _proj(p, axes) + (0,)
        s = _rel(alpha, abar, "z", e, f_, degree) * c
        acc[q] = acc[q] + s if q in acc else s
    w0 = acc[ZERO].constant_term if ZERO in acc else Fraction(0)
    if ZERO in acc:
        acc[ZERO] = acc[ZERO] - _const(w0, degree)
    w = Expansion(tuple(Term(p, c) for p, c in sorted(acc.items())), "indexed_sum", False)
    after = LocalForm(TWO, ONE, Expansion.monomial(pu + (0,), degree=degree),
                      Expansion.variable("z", degree), w, "2-point, v a unit")
    coords = {"x": _var(VARS[axes[0]], degree) * _unit_in(t, -lam[0], alpha, degree),
              "y": _var(VARS[axes[1]], degree) * _unit_in(t, -lam[1], alpha, degree),
              "z": _unit_in(t, f_, alpha, degree) - _const(abar, degree)}
    _require_coordinate(coords)
    tmap = _target_identity(degree, g.perm)
    _add_constant(tmap, g.perm[1], abar, degree)
    _add_constant(tmap, 2, w0, degree)
    return after, _shift_map([(t, alpha)], degree), tmap, coords


def _toroidal(g, setting, constants, degree):
    t, axes, alpha = _two_point_setup(g, setting, constants)
    rows = g.rows
    projs = [_proj(r, axes) for r in rows]
    for i, j in ((0, 1), (0, 2), (1, 2)):
        lam = _solve2([projs[i], projs[j]], (Fraction(-rows[i][t]), Fraction(-rows[j][t])))
        if lam is not None:
            break
    else:
        raise UnsupportedCase("no two components are independent on this 2-point")
    m = 3 - i - j
    kappa = rows[m][t] + projs[m][0] * lam[0] + projs[m][1] * lam[1]
    abar = exact_power(alpha, kappa)
    comps = [None] * 3
    comps[i] = Expansion.monomial(projs[i] + (0,), degree=degree)
    comps[j] = Expansion.monomial(projs[j] + (0,), degree=degree)
    tmap = _target_identity(degree)
    if any(projs[m]):
        comps[m] = Expansion.translate(projs[m] + (0,), abar, "z", degree)
        target = THREE
    else:
        comps[m] = Expansion.variable("z", degree)
        tmap[TARGET_VARS[m]] = tmap[TARGET_VARS[m]] + _tpoly({ZERO: abar}, degree)
        target = TWO
        if m != 2:
            # keep the two divisor parameters first
            order = [i, j, m]
            comps = [comps[k] for k in order]
            inv = {TARGET_VARS[k]: TARGET_VARS[n] for n, k in enumerate(order)}
            tmap = {old: _rename_target(tmap[old], inv, degree) for old in TARGET_VARS}
    after = LocalForm(TWO, target, *comps, "2-point of a toroidal form")
    coords = {"x": _var(VARS[axes[0]], degree) * _unit_in(t, -lam[0], alpha, degree),
              "y": _var(VARS[axes[1]], degree) * _unit_in(t, -lam[1], alpha, degree),
              "z": _unit_in(t, kappa, alpha, degree) - _const(abar, degree)}
    _require_coordinate(coords)
    return after, _shift_map([(t, alpha)], degree), tmap, coords


def _rename_target(poly, names, degree):
    """Rewrite a polynomial in u, v, w after the new parameters were reordered."""
    out = {}
    for mono, c in poly.terms.items():
        m = [0, 0, 0]
        for k, e in zip(TARGET_VARS, mono):
            m[TARGET_VARS.index(names[k])] += e
        out[tuple(m)] = c
    return TruncatedSeries(TARGET_VARS, out, degree)


def _one_point(g, setting, constants, degree):
    if len(constants) != 2:
        raise MalformedInput("a 1-point specialization takes two constants")
    i = setting.axis
    ts = tuple(k for k in range(3) if k != i)
    alpha, beta = constants
    a, d = g.U[i], g.V[i]
    if a == 0:
        raise UnsupportedCase("u does not vanish on this 1-point")
    if (d != 0) != (setting.recipe == "one_point_line"):
        raise UnsupportedCase("the setting does not match whether v vanishes here")
    lam = tuple(Fraction(-g.U[k], a) for k in ts)
    mu = tuple(g.V[k] + d * l for k, l in zip(ts, lam))
    abar = exact_power(alpha, mu[0]) * exact_power(beta, mu[1])
    gi = g.N[i]
    cs = dict(zip(ts, (alpha, beta)))

    def eps2(e1, e2):
        return _unit_in(ts[0], e1, alpha, degree) * _unit_in(ts[1], e2, beta, degree)

    ynew = _var("y", degree).scale(1 / abar) + _const(1, degree)
    low: dict = {}
    completion = _const(0, degree)
    for p, c in g.W.items():
        e = tuple(p[k] + p[i] * l for k, l in zip(ts, lam))
        if p[i] < gi:
            s = e[0] / mu[0] if mu[0] else e[1] / mu[1]
            if (s * mu[0], s * mu[1]) != e:
                raise UnsupportedCase(f"term {p} keeps a unit below the anchor")
            unit = ynew.rational_power(s).scale(exact_power(alpha, e[0]) * exact_power(beta, e[1]))
            low[p[i]] = low.get(p[i], _const(0, degree)) + unit * c
        else:
            dp = [0, 0, 0]
            dp[i] = p[i] - gi
            completion = completion + _mono(dp, degree, c) * eps2(p[ts[0]] + gi * lam[0],
                                                                   p[ts[1]] + gi * lam[1])
    bbar = completion.constant_term
    tmap = _target_identity(degree, g.perm)
    if setting.recipe == "one_point_unit":
        target, v = ONE, Expansion.variable("y", degree)
        _add_constant(tmap, g.perm[1], abar, degree)
    else:
        target, v = TWO, Expansion.translate((d, 0, 0), abar, "y", degree)
    terms = tuple(Term((j, 0, 0), s) for j, s in sorted(low.items()) if not s.is_zero())
    w = Expansion(terms + (Term((gi, 0, 0), _const(bbar, degree) + _var("z", degree)),),
                  "series_plus_z", False)
    w, w0 = _drop_constant(w, degree)
    _add_constant(tmap, 2, w0, degree)
    after = LocalForm(ONE, target, Expansion.monomial((a, 0, 0), degree=degree), v, w, "1-point")
    coords = {"x": _var(VARS[i], degree) * eps2(-lam[0], -lam[1]),
              "y": eps2(*mu) - _const(abar, degree),
              "z": completion - _const(bbar, degree)}
    _require_coordinate(coords)
    smap = _shift_map(list(cs.items()), degree)
    return after, smap, tmap, coords


def specialize_any(f: LocalForm, setting: Setting, rng, degree: int = DEFAULT_DEGREE,
                   measure: str = "length", tries: int = 8) -> Rewrite:
    """specialize with constants drawn from rng, retrying irrational roots.

    Falls back to the constant 1, whose every rational power is rational.
    """
    n = 2 if setting.recipe.startswith("one_point") else 1
    pool = [Fraction(x) for x in (2, -1, 4, 8, -8, 9, 16, 27, 64, Fraction(1, 4), Fraction(1, 8))]
    for _ in range(tries):
        consts = tuple(rng.choice(pool) for _ in range(n))
        try:
            return specialize(f, setting, consts, degree, measure)
        except UnrepresentableConstant:
            continue
    return specialize(f, setting, (Fraction(1),) * n, degree, measure)
