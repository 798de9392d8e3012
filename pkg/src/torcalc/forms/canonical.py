"""Canonical expansions of w relative to a toroidal pair.

Two shapes occur.  When the pair leaves a free variable z for w, w is
``sum_{p not >= P} c_p X^p + X^P (z' + beta)`` where X^P is the least
monomial whose coefficient involves z, and z' is the completed variable.
When the pair already uses every free variable, w is a sum of terms whose
exponents are dependent on the pair exponents plus one independent monomial N
times a unit, and the unit is absorbed by a change of the divisor variables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import Indeterminate, MalformedInput
from .model import (VARS, ZERO, Expansion, Family, FormClass, Graded, LocalForm,
                    PointType, Term, series)
from .pairs import classify_pair, det3


def leq(p, q) -> bool:
    """Componentwise p <= q."""
    return all(a <= b for a, b in zip(p, q))


@dataclass(frozen=True)
class WSplit:
    """w separated into its invariant-relevant part and its anchor monomial.

    ``low`` maps exponent to coefficient series for the terms that are not
    multiples of the anchor.  For the z shape, ``beta`` is the translation of
    the completed variable; for the N shape, ``index`` maps each dependent
    exponent to its integer index along the pair direction (when there is one).
    """

    kind: str
    anchor: tuple
    low: dict
    beta: Fraction | None = None
    index: dict = field(default_factory=dict)
    dependent: tuple = ()

    def low_exponents(self) -> list:
        return sorted(self.low)


def _minimal(points):
    mins = [p for p in points if not any(q != p and leq(q, p) for q in points)]
    return mins


def split_z(g: Graded, wvar: str = "z") -> WSplit:
    """Split w = low + X^P (z' + beta) with z' the completed variable."""
    i = VARS.index(wvar)
    items = g.raw_items()
    with_z = [p for p, t in items.items() if any(m[i] for m in t)]
    if not with_z:
        raise MalformedInput(f"w does not involve {wvar}")
    mins = _minimal(with_z)
    if len(mins) != 1:
        raise MalformedInput(f"no least monomial multiplying {wvar}: {sorted(mins)}")
    anchor = mins[0]
    if g.precision_at(anchor) < 1:
        raise Indeterminate("truncation too small to see the linear term")
    lin = tuple(1 if j == i else 0 for j in range(3))
    if items[anchor].get(lin, 0) == 0:
        raise MalformedInput(f"coefficient of the least {wvar}-monomial is not a unit times {wvar}")
    beta = Fraction(items[anchor].get(ZERO, 0))
    low = {}
    for p in items:
        if not leq(anchor, p):
            low[p] = g.coeff(p)
    return WSplit("z", anchor, low, beta)


def split_proportional(g: Graded, a: int, b: int) -> WSplit:
    """Split w = sum c_i(z) (x^a y^b)^i + N * unit over a 2-point source."""
    items = g.raw_items()
    dependent, other = [], []
    for p in items:
        (dependent if p[0] * b == p[1] * a and p[0] % a == 0 and p[1] % b == 0 else other).append(p)
    if not other:
        raise MalformedInput("w has no monomial independent of the pair")
    mins = _minimal(other)
    if len(mins) != 1:
        raise MalformedInput(f"no least independent monomial: {sorted(mins)}")
    anchor = mins[0]
    c = g.coeff(anchor)
    if c.constant_term == 0:
        raise MalformedInput("the independent monomial does not carry a unit")
    low, index = {}, {}
    for p in dependent:
        if not leq(anchor, p):
            low[p] = g.coeff(p)
            index[p] = p[0] // a
    return WSplit("n", anchor, low, index=index, dependent=tuple(sorted(dependent)))


def split_rank(g: Graded, rows) -> WSplit:
    """Split w = sum alpha_i M_i + N * unit over a 3-point source."""
    items = g.raw_items()
    dependent = [p for p in items if det3(rows[0], rows[1], p) == 0]
    other = [p for p in items if p not in dependent]
    if not other:
        raise MalformedInput("w has no monomial of rank 3")
    mins = _minimal(other)
    if len(mins) != 1:
        raise MalformedInput(f"no least rank-3 monomial: {sorted(mins)}")
    anchor = mins[0]
    if g.coeff(anchor).constant_term == 0:
        raise MalformedInput("the rank-3 monomial does not carry a unit")
    low = {p: g.coeff(p) for p in dependent if not leq(anchor, p)}
    return WSplit("n", anchor, low, dependent=tuple(sorted(dependent)))


def split_for_pair(pair: FormClass, source: PointType, w: Expansion) -> WSplit:
    g = w.graded(source)
    case, wit = int(pair.case), pair.witnesses
    if case in (1, 2, 5):
        return split_z(g, "z")
    if case in (3, 6):
        return split_proportional(g, wit["a"], wit["b"])
    return split_rank(g, (wit["u"], wit["v"]))


def split_w(f: LocalForm) -> tuple:
    """(pair, split) for a form whose (u, v) is a toroidal pair."""
    pair = classify_pair(f)
    return pair, split_for_pair(pair, f.source, f.w)


def canonical_expansion(split: WSplit, exact: bool = True) -> Expansion:
    terms = [Term(p, c) for p, c in sorted(split.low.items())]
    if split.kind == "z":
        lead = series({ZERO: split.beta, (0, 0, 1): 1})
        terms.append(Term(split.anchor, lead))
        return Expansion(tuple(terms), "series_plus_z", exact)
    terms.append(Term(split.anchor, series({ZERO: 1})))
    return Expansion(tuple(terms), "indexed_sum", exact)


def normalize_w(f: LocalForm) -> LocalForm:
    """Rewrite w in the canonical expansion for the toroidal pair (u, v).

    The z shape completes z: every term at or above the anchor is absorbed
    into the new variable, leaving its constant as the translation beta.
    """
    pair, split = split_w(f)
    w = canonical_expansion(split, f.w.exact)
    return f.replace(w=w, provenance=f"WCanonical {pair.case}")


def classify_w(f: LocalForm) -> FormClass:
    pair, split = split_w(f)
    wit = dict(pair.witnesses, anchor=split.anchor, low=sorted(split.low))
    if split.kind == "z":
        wit["beta"] = split.beta
    return FormClass(Family.W_CANONICAL, pair.case, f"w canonical for pair {pair.case}", wit)
