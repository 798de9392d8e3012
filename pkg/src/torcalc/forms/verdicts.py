"""Prepared, super, good and weakly good verdicts."""

from __future__ import annotations

from fractions import Fraction
from math import gcd

from ..errors import NoMatch, NotGood, NotPrepared, NotSuper
from ..lattice import SubLattice
from .canonical import leq, split_for_pair, split_proportional, split_z
from .model import ZERO, Family, FormClass, LocalForm, PointType
from .pairs import allowed_permutations, classify_pair, classify_pair_parts, det3

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE


def _prepared(case, name, wit):
    return FormClass(Family.PREPARED, case, name, wit)


def is_prepared(f: LocalForm) -> FormClass:
    """Match one of the prepared cases for the declared target type."""
    if f.target is THREE:
        graded = f.graded()
        monos = [g.unit_monomial() for g in graded]
        if all(monos):
            for perm in allowed_permutations(THREE):
                comps = [f.components()[i] for i in perm]
                try:
                    pair = classify_pair_parts(f.source, f.target, comps[0], comps[1])
                except NoMatch:
                    continue
                return _prepared("1", "monomials over a 3-point",
                                 {"permutation": perm, "pair": pair.case,
                                  "exponents": [m[0] for m in monos]})
        raise NotPrepared("not unit times monomial with a toroidal pair")
    if f.target is TWO:
        for perm in ((0, 1, 2), (1, 0, 2)):
            g = f.permuted(perm)
            try:
                pair = classify_pair(g)
            except NoMatch:
                continue
            split_for_pair(pair, g.source, g.w)
            return _prepared("2a", "toroidal pair over a 2-point",
                             {"permutation": perm, "pair": pair.case})
        hit = _line_swapped(f) if f.source is ONE else _plane_swapped(f) if f.source is TWO else None
        if hit:
            return hit
        raise NotPrepared("no prepared shape over a 2-point")
    for perm in ((0, 1, 2), (0, 2, 1)):
        g = f.permuted(perm)
        try:
            pair = classify_pair(g)
        except NoMatch:
            continue
        split_for_pair(pair, g.source, g.w)
        return _prepared("3", "toroidal pair over a 1-point",
                         {"permutation": perm, "pair": pair.case})
    raise NotPrepared("the given parameters contain no toroidal pair")


def _line_swapped(f: LocalForm):
    """u = x^a, v = x^c (gamma(x, y) + x^d z), w = y."""
    gu, gv, gw = f.graded()
    pu = gu.is_exact_monomial()
    if not pu or pu[0] <= 0 or not gw.is_variable("y"):
        return None
    try:
        s = split_z(gv, "z")
    except NoMatch:
        return None
    if not s.low:
        return None
    c = min(s.low)
    if s.low[c].constant_term == 0 or s.anchor[0] <= c[0]:
        return None
    return _prepared("2b", "line with v carrying z",
                     {"a": pu[0], "c": c[0], "d": s.anchor[0] - c[0], "beta": s.beta})


def _plane_swapped(f: LocalForm):
    """u = (x^a y^b)^k, v = (x^a y^b)^l (gamma(x^a y^b, z) + x^c y^d), w = z."""
    gu, gv, gw = f.graded()
    pu = gu.is_exact_monomial()
    if not pu or pu[0] <= 0 or pu[1] <= 0 or not gw.is_variable("z"):
        return None
    k = gcd(pu[0], pu[1])
    a, b = pu[0] // k, pu[1] // k
    try:
        s = split_proportional(gv, a, b)
    except NoMatch:
        return None
    if not s.low:
        return None
    lead = min(s.low, key=lambda p: s.index[p])
    if s.low[lead].constant_term == 0:
        return None
    return _prepared("2c", "plane with v carrying the independent monomial",
                     {"a": a, "b": b, "k": k, "l": s.index[lead],
                      "c": s.anchor[0], "d": s.anchor[1]})


# super parameters

def _unit_times_monomial_or_zero(items):
    """(C, constant) when the exponent -> coefficient map is X^C times a unit."""
    if not items:
        return None, Fraction(0)
    c = tuple(min(p[i] for p in items) for i in range(3))
    if c not in items or items[c].get(ZERO, 0) == 0:
        return False, None
    return c, Fraction(items[c][ZERO])


def is_super(f: LocalForm, target: PointType | None = None) -> FormClass:
    """Match one of the six super parameter shapes."""
    if target is not None and target is not f.target:
        f = f.replace(target=target)
    try:
        pair = classify_pair(f)
    except NoMatch as exc:
        raise NotSuper(str(exc)) from exc
    case, wit = int(pair.case), dict(pair.witnesses)
    if (case <= 4) != (f.target is TWO):
        raise NotSuper("target type does not fit the pair")
    items = f.w.graded(f.source).raw_items()
    if case in (1, 2, 5):
        zs = [(p, m) for p, t in items.items() for m in t if m[2] > 0]
        if len(zs) != 1 or zs[0][1] != (0, 0, 1) or items[zs[0][0]][zs[0][1]] != 1:
            raise NotSuper("w is not gamma-part plus a monomial times (z + beta)")
        d = zs[0][0]
        rest = {p: {m: c for m, c in t.items() if m[2] == 0} for p, t in items.items()}
        rest = {p: t for p, t in rest.items() if t}
        for beta in (Fraction(rest.get(d, {}).get(ZERO, 0)), Fraction(0)):
            trial = {p: dict(t) for p, t in rest.items()}
            if beta:
                trial[d][ZERO] -= beta
                trial[d] = {m: c for m, c in trial[d].items() if c}
                if not trial[d]:
                    del trial[d]
            c, lead = _unit_times_monomial_or_zero(trial)
            if c is not False:
                wit.update(gamma_exponent=c, z_exponent=d, beta=beta, gamma_zero=c is None)
                return FormClass(Family.SUPER, str(case), f"super parameters {case}", wit)
        raise NotSuper("the z-free part is not a unit times a monomial")
    if case in (3, 6):
        a, b = wit["a"], wit["b"]
        indep = [p for p in items if p[0] * b != p[1] * a]
    else:
        indep = [p for p in items if det3(wit["u"], wit["v"], p) != 0]
    if len(indep) != 1 or items[indep[0]] != {ZERO: 1}:
        raise NotSuper("w does not carry exactly one independent monomial")
    n = indep[0]
    rest = {p: t for p, t in items.items() if p != n}
    c, lead = _unit_times_monomial_or_zero(rest)
    if c is False:
        raise NotSuper("the dependent part is not a unit times a monomial")
    wit.update(gamma_exponent=c, n_exponent=n, gamma_zero=c is None)
    return FormClass(Family.SUPER, str(case), f"super parameters {case}", wit)


# good and weakly good

GOOD_CASE = {5: 1, 6: 2, 1: 3, 2: 4, 3: 5, 4: 6}
GOOD_NAMES = {
    1: "line over line, a does not divide i",
    2: "plane over line, k does not divide i",
    3: "line over curve, gcd(a, b) does not divide i",
    4: "plane monomials, (i, j) outside the pair lattice",
    5: "plane power translate, gcd(k, t) does not divide i",
    6: "space, dependent terms outside the pair lattice",
}


def is_good(f: LocalForm) -> FormClass:
    """Check that every invariant-relevant term of w escapes the pair lattice."""
    try:
        pair = classify_pair(f)
    except NoMatch as exc:
        raise NotGood(str(exc)) from exc
    pcase, wit = int(pair.case), pair.witnesses
    split = split_for_pair(pair, f.source, f.w)
    case = GOOD_CASE[pcase]
    if pcase == 5:
        bad = [p for p in split.low if p[0] % wit["a"] == 0]
    elif pcase == 6:
        bad = [p for p in split.low if split.index[p] % wit["k"] == 0]
    elif pcase == 1:
        g = gcd(wit["a"], wit["b"])
        bad = [p for p in split.low if p[0] % g == 0]
    elif pcase == 2:
        lat = SubLattice([(wit["a"], wit["b"]), (wit["c"], wit["d"])])
        bad = [p for p in split.low if lat.contains(p[:2])]
    elif pcase == 3:
        g = gcd(wit["k"], wit["t"])
        bad = [p for p in split.low if split.index[p] % g == 0]
    else:
        lat = SubLattice([wit["u"], wit["v"]])
        bad = [p for p in split.low if lat.contains(p)]
    if bad:
        raise NotGood(f"terms {sorted(bad)} violate the good condition")
    return FormClass(Family.GOOD, str(case), GOOD_NAMES[case],
                     dict(wit, low=sorted(split.low), anchor=split.anchor))


def is_weakly_good(f: LocalForm) -> FormClass:
    """Weakly good forms over a 1-point target."""
    try:
        pair = classify_pair(f)
    except NoMatch as exc:
        raise NotGood(str(exc)) from exc
    pcase, wit = int(pair.case), pair.witnesses
    if pcase not in (5, 6):
        raise NotGood("weakly good forms need a pair over a 1-point target")
    split = split_for_pair(pair, f.source, f.w)
    if pcase == 5:
        sigma = sorted(p[0] for p in split.low)
        modulus = wit["a"]
    else:
        sigma = sorted(split.index[p] for p in split.low)
        modulus = wit["k"]
    if not sigma:
        raise NotGood("no terms before the anchor")
    if sigma[0] == 0 or sigma[0] % modulus == 0:
        raise NotGood(f"sigma_0 = {sigma[0]} fails the divisibility condition")
    case = "1" if pcase == 5 else "2"
    return FormClass(Family.WEAKLY_GOOD, case, "weakly good", dict(wit, sigma=sigma))
