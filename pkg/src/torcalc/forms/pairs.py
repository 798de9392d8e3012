"""Toroidal pairs, toroidal morphisms and monomial forms."""

from __future__ import annotations

from itertools import permutations
from math import gcd

from ..errors import NoMatch, NotToroidal, NotToroidalPair
from ..lattice import rank_of_monomials
from .model import Family, FormClass, LocalForm, PointType

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE

PAIR_NAMES = {
    1: "line over curve-or-point: x^a, x^b(alpha+y)",
    2: "plane monomials: x^a y^b, x^c y^d",
    3: "plane power translate: (x^a y^b)^k, (x^a y^b)^t (alpha+z)",
    4: "space monomials of rank 2",
    5: "line over line: x^a, y",
    6: "plane over line: (x^a y^b)^k, z",
}


def det2(a, b, c, d) -> int:
    return a * d - b * c


def det3(r1, r2, r3) -> int:
    return (r1[0] * (r2[1] * r3[2] - r2[2] * r3[1])
            - r1[1] * (r2[0] * r3[2] - r2[2] * r3[0])
            + r1[2] * (r2[0] * r3[1] - r2[1] * r3[0]))


def _pair_cases(source, target, gu, gv):
    """Yield (case, witnesses) for every toroidal pair shape (gu, gv) fits."""
    if source is ONE and target in (TWO, THREE):
        pu, hit = gu.is_exact_monomial(), gv.as_translate("y")
        if pu and hit and hit[1] != 0 and pu[0] > 0 and hit[0][0] > 0:
            yield 1, {"a": pu[0], "b": hit[0][0], "alpha": hit[1]}
    if source is TWO and target in (TWO, THREE):
        pu, pv = gu.is_exact_monomial(), gv.is_exact_monomial()
        if pu and pv:
            a, b, c, d = pu[0], pu[1], pv[0], pv[1]
            if det2(a, b, c, d):
                yield 2, {"a": a, "b": b, "c": c, "d": d, "det": det2(a, b, c, d)}
        hit = gv.as_translate("z")
        if pu and hit and hit[1] != 0:
            w = _power_witness(pu)
            if w:
                a, b, k = w
                pv = hit[0]
                if pv[0] % a == 0 and pv[0] // a > 0 and pv[0] * b == pv[1] * a:
                    yield 3, {"a": a, "b": b, "k": k, "t": pv[0] // a, "alpha": hit[1]}
    if source is THREE and target in (TWO, THREE):
        pu, pv = gu.is_exact_monomial(), gv.is_exact_monomial()
        if pu and pv and rank_of_monomials([pu, pv]) == 2:
            yield 4, {"u": pu, "v": pv}
    if source is ONE and target is ONE:
        pu = gu.is_exact_monomial()
        if pu and pu[0] > 0 and gv.is_variable("y"):
            yield 5, {"a": pu[0]}
    if source is TWO and target is ONE:
        pu = gu.is_exact_monomial()
        w = _power_witness(pu) if pu else None
        if w and gv.is_variable("z"):
            a, b, k = w
            yield 6, {"a": a, "b": b, "k": k}


def _power_witness(p):
    """(a, b, k) with p = k(a, b), gcd(a, b) = 1 and a, b > 0."""
    if p[0] <= 0 or p[1] <= 0 or p[2]:
        return None
    k = gcd(p[0], p[1])
    return p[0] // k, p[1] // k, k


def classify_pair_parts(source, target, u, v) -> FormClass:
    gu, gv = u.graded(source), v.graded(source)
    found = list(_pair_cases(source, target, gu, gv))
    if not found:
        raise NotToroidalPair(f"(u, v) is not a toroidal pair for {source.value} over {target.value}")
    case, wit = found[0]
    return FormClass(Family.TOROIDAL_PAIR, str(case), PAIR_NAMES[case], wit,
                     tuple(str(c) for c, _ in found))


def classify_pair(f: LocalForm) -> FormClass:
    """The first toroidal pair case (in listing order) matched by (u, v)."""
    return classify_pair_parts(f.source, f.target, f.u, f.v)


def pair_or_none(f: LocalForm):
    try:
        return classify_pair(f)
    except NoMatch:
        return None


# toroidal morphisms

TOROIDAL_NAMES = {
    1: "3-point over 3-point monomials",
    2: "2-point over 3-point",
    3: "1-point over 3-point",
    4: "2-point over 2-point",
    5: "1-point over 2-point",
    6: "1-point over 1-point",
}


def allowed_permutations(target: PointType):
    """Reorderings of (u, v, w) that keep the target divisor in place."""
    if target is THREE:
        return list(permutations(range(3)))
    if target is TWO:
        return [(0, 1, 2), (1, 0, 2)]
    return [(0, 1, 2), (0, 2, 1)]


def _toroidal_case(source, target, gu, gv, gw):
    if source is THREE and target is THREE:
        ps = [g.is_exact_monomial() for g in (gu, gv, gw)]
        if all(ps) and det3(*ps):
            return 1, {"rows": ps, "det": det3(*ps)}
    if source is TWO and target is THREE:
        pu, pv, hit = gu.is_exact_monomial(), gv.is_exact_monomial(), gw.as_translate("z")
        if pu and pv and hit and hit[1] != 0 and det2(pu[0], pu[1], pv[0], pv[1]):
            return 2, {"u": pu, "v": pv, "w": hit[0], "alpha": hit[1]}
    if source is ONE and target is THREE:
        pu, hv, hw = gu.is_exact_monomial(), gv.as_translate("y"), gw.as_translate("z")
        if (pu and hv and hw and hv[1] != 0 and hw[1] != 0
                and pu[0] > 0 and hv[0][0] > 0 and hw[0][0] > 0):
            return 3, {"a": pu[0], "d": hv[0][0], "g": hw[0][0], "alpha": hv[1], "beta": hw[1]}
    if source is TWO and target is TWO and gw.is_variable("z"):
        pu, pv = gu.is_exact_monomial(), gv.is_exact_monomial()
        if pu and pv and det2(pu[0], pu[1], pv[0], pv[1]):
            return 4, {"u": pu, "v": pv}
    if source is ONE and target is TWO and gw.is_variable("z"):
        pu, hv = gu.is_exact_monomial(), gv.as_translate("y")
        if pu and hv and hv[1] != 0 and pu[0] > 0 and hv[0][0] > 0:
            return 5, {"a": pu[0], "d": hv[0][0], "alpha": hv[1]}
    if source is ONE and target is ONE:
        pu = gu.is_exact_monomial()
        if pu and pu[0] > 0 and gv.is_variable("y") and gw.is_variable("z"):
            return 6, {"a": pu[0]}
    return None


def classify_toroidal(f: LocalForm) -> FormClass:
    """Match the triple against the six toroidal morphism forms.

    Target parameters may be reordered as long as the target divisor is kept.
    """
    graded = f.graded()
    for perm in allowed_permutations(f.target):
        hit = _toroidal_case(f.source, f.target, *(graded[i] for i in perm))
        if hit:
            case, wit = hit
            wit = dict(wit, permutation=perm)
            return FormClass(Family.TOROIDAL_MORPHISM, str(case), TOROIDAL_NAMES[case], wit)
    raise NotToroidal("not one of the toroidal forms")


def is_toroidal(f: LocalForm) -> bool:
    try:
        classify_toroidal(f)
        return True
    except NoMatch:
        return False


# monomial forms

MONOMIAL_NAMES = {
    1: "line pair, w = x^c (z + alpha)",
    2: "plane monomial pair, w = x^e y^f (z + alpha)",
    3: "plane power pair, w = x^c y^d",
    4: "space pair, w of rank 3",
    5: "line over line, w = x^b (z + alpha)",
    6: "plane over line, w = x^c y^d",
}


def classify_monomial_form(f: LocalForm) -> FormClass:
    """Match a non-toroidal monomial form."""
    pair = classify_pair(f)
    case, wit = int(pair.case), pair.witnesses
    gw = f.w.graded(f.source)
    out = None
    if case == 1 and f.target is TWO:
        hit = gw.as_translate("z")
        if hit and hit[0][0] > 0:
            out = {"c": hit[0][0], "alpha_w": hit[1]}
    elif case == 2 and f.target is TWO:
        hit = gw.as_translate("z")
        if hit and hit[0][0] + hit[0][1] > 0:
            out = {"e": hit[0][0], "f": hit[0][1], "alpha_w": hit[1]}
    elif case in (3, 6) and (case == 6 or f.target is TWO):
        p = gw.is_exact_monomial()
        if p and det2(wit["a"], wit["b"], p[0], p[1]):
            out = {"c": p[0], "d": p[1], "det": det2(wit["a"], wit["b"], p[0], p[1])}
    elif case == 4 and f.target is TWO:
        p = gw.is_exact_monomial()
        if p and det3(wit["u"], wit["v"], p):
            out = {"w": p, "det": det3(wit["u"], wit["v"], p)}
    elif case == 5:
        hit = gw.as_translate("z")
        if hit and hit[0][0] > 0:
            out = {"b_w": hit[0][0], "alpha_w": hit[1]}
    if out is None:
        raise NoMatch("not a monomial form")
    return FormClass(Family.MONOMIAL_FORM, str(case), MONOMIAL_NAMES[case], dict(wit, **out))
