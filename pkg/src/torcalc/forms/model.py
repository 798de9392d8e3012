"""Data model for local forms: point types, structured expansions, verdicts."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import Indeterminate, MalformedInput
from ..series import DEFAULT_DEGREE, TruncatedSeries, as_fraction, graded_lex_key

VARS = ("x", "y", "z")
ZERO = (0, 0, 0)


class PointType(Enum):
    ONE = "OnePoint"
    TWO = "TwoPoint"
    THREE = "ThreePoint"

    @property
    def n(self) -> int:
        return {"OnePoint": 1, "TwoPoint": 2, "ThreePoint": 3}[self.value]

    @property
    def divisor_vars(self) -> tuple:
        return VARS[: self.n]

    @property
    def free_vars(self) -> tuple:
        return VARS[self.n:]

    @classmethod
    def parse(cls, text) -> "PointType":
        if isinstance(text, PointType):
            return text
        key = str(text).strip().lower().replace("-", "").replace("_", "")
        table = {"onepoint": cls.ONE, "1": cls.ONE, "one": cls.ONE,
                 "twopoint": cls.TWO, "2": cls.TWO, "two": cls.TWO,
                 "threepoint": cls.THREE, "3": cls.THREE, "three": cls.THREE}
        if key not in table:
            raise MalformedInput(f"unknown point type {text!r}")
        return table[key]


def series(terms: Mapping | None = None, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    return TruncatedSeries(VARS, terms or {}, degree)


def const(c, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    return TruncatedSeries.constant(c, VARS, degree)


def var(name: str, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    return TruncatedSeries.variable(name, VARS, degree)


def translate_series(alpha, name: str, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """The series alpha + name."""
    return const(alpha, degree) + var(name, degree)


@dataclass(frozen=True)
class Term:
    """x^exponent * coeff, with coeff an arbitrary series in x, y, z."""

    exponent: tuple
    coeff: TruncatedSeries

    def __post_init__(self):
        e = tuple(int(a) for a in self.exponent)
        if len(e) != 3 or min(e) < 0:
            raise MalformedInput(f"bad exponent {self.exponent!r}")
        object.__setattr__(self, "exponent", e)
        if self.coeff.variables != VARS:
            raise MalformedInput(f"coefficient over {self.coeff.variables}")

    def value(self, degree: int | None = None) -> TruncatedSeries:
        c = self.coeff if degree is None else _at_degree(self.coeff, degree)
        return c.times_monomial(self.exponent)


def _at_degree(s: TruncatedSeries, degree: int) -> TruncatedSeries:
    if degree <= s.degree:
        return s.truncate(degree)
    return TruncatedSeries(s.variables, s.terms, degree)


@dataclass(frozen=True)
class Expansion:
    """A finite sum of terms x^e * c_e.

    ``kind`` records the shape the expansion was built as (monomial, translate,
    series_plus_z, indexed_sum, raw).  ``exact`` says whether the coefficient
    series are the whole truth (structured input) or truncations of unknown
    series (results of substitution).
    """

    terms: tuple
    kind: str = "indexed_sum"
    exact: bool = True

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(t for t in self.terms if not t.coeff.is_zero()))

    # constructors for the documented shapes
    @classmethod
    def monomial(cls, exponent, unit=None, degree=DEFAULT_DEGREE) -> "Expansion":
        unit = const(1, degree) if unit is None else _as_series(unit, degree)
        return cls((Term(exponent, unit),), "monomial")

    @classmethod
    def translate(cls, exponent, alpha, name: str, degree=DEFAULT_DEGREE) -> "Expansion":
        return cls((Term(exponent, translate_series(alpha, name, degree)),), "translate")

    @classmethod
    def variable(cls, name: str, degree=DEFAULT_DEGREE) -> "Expansion":
        return cls((Term(ZERO, var(name, degree)),), "translate")

    @classmethod
    def series_plus_z(cls, g: Iterable, exponent, beta, degree=DEFAULT_DEGREE) -> "Expansion":
        """g + x^exponent (z + beta); g is a list of (exponent, coeff) pairs or a series."""
        terms = list(_terms_of(g, degree))
        terms.append(Term(exponent, translate_series(beta, "z", degree)))
        return cls(tuple(terms), "series_plus_z")

    @classmethod
    def indexed_sum(cls, items: Iterable, remainder=None, degree=DEFAULT_DEGREE) -> "Expansion":
        """sum coeff_i x^{e_i} + remainder; items and remainder are (exponent, coeff)."""
        terms = list(_terms_of(items, degree))
        if remainder is not None:
            terms.extend(_terms_of([remainder], degree))
        return cls(tuple(terms), "indexed_sum")

    @classmethod
    def raw(cls, s: TruncatedSeries, exact: bool = False) -> "Expansion":
        if s.variables != VARS:
            raise MalformedInput(f"raw series over {s.variables}")
        return cls((Term(ZERO, s),), "raw", exact)

    def value(self, degree: int | None = None) -> TruncatedSeries:
        if degree is None:
            degree = min((t.coeff.degree for t in self.terms), default=DEFAULT_DEGREE)
        total = TruncatedSeries.zero(VARS, degree)
        for t in self.terms:
            total = total + t.value(degree)
        return total

    def graded(self, source: "PointType") -> "Graded":
        return Graded.build(self, source)


def _as_series(c, degree) -> TruncatedSeries:
    if isinstance(c, TruncatedSeries):
        return c
    return const(as_fraction(c), degree)


def _terms_of(items, degree):
    if isinstance(items, TruncatedSeries):
        yield Term(ZERO, items)
        return
    for item in items:
        if isinstance(item, Term):
            yield item
        else:
            e, c = item
            yield Term(e, _as_series(c, degree))


INFINITE = 10 ** 9


class Graded:
    """w written as sum_p X^p c_p with X the divisor variables.

    ``p`` is a 3-tuple that is zero on the free variables, and each ``c_p`` is
    a series in the free variables only.  For inexact expansions, the
    precision of c_p shrinks with the distance from the contributing terms.
    """

    def __init__(self, source, items: dict, horizons: list):
        self.source = source
        self._items = items
        self._horizons = horizons

    @classmethod
    def build(cls, exp: Expansion, source: PointType) -> "Graded":
        k = source.n
        acc: dict = {}
        horizons = []
        for t in exp.terms:
            e = t.exponent
            if not exp.exact:
                horizons.append((tuple(e[:k]), t.coeff.degree))
            for m, c in t.coeff.terms.items():
                full = tuple(a + b for a, b in zip(e, m))
                p = full[:k] + (0,) * (3 - k)
                free = (0,) * k + full[k:]
                acc.setdefault(p, {})
                acc[p][free] = acc[p].get(free, 0) + c
        items = {}
        for p, terms in acc.items():
            terms = {m: c for m, c in terms.items() if c}
            if terms:
                items[p] = terms
        return cls(source, items, horizons)

    def precision_at(self, p) -> int:
        k = self.source.n
        best = INFINITE
        for e, d in self._horizons:
            if all(a >= b for a, b in zip(p[:k], e)):
                best = min(best, d - sum(a - b for a, b in zip(p[:k], e)))
        return best

    def support(self) -> list:
        return sorted(self._items, key=graded_lex_key)

    def __contains__(self, p):
        return p in self._items

    def coeff(self, p) -> TruncatedSeries:
        prec = self.precision_at(p)
        if prec < 0:
            raise Indeterminate(f"coefficient at {p} lies beyond the truncation")
        degree = min(prec, DEFAULT_DEGREE)
        return TruncatedSeries(VARS, self._items.get(p, {}), degree)

    def raw_items(self) -> dict:
        return {p: dict(t) for p, t in self._items.items()}

    def is_exact_monomial(self):
        """The exponent p when the expansion is exactly X^p, else None."""
        if len(self._items) != 1:
            return None
        (p, t), = self._items.items()
        return p if t == {ZERO: 1} else None

    def as_translate(self, name: str):
        """(p, alpha) when the expansion is exactly X^p (alpha + name), else None."""
        if len(self._items) != 1:
            return None
        (p, t), = self._items.items()
        unit = tuple(1 if v == name else 0 for v in VARS)
        if set(t) - {ZERO, unit} or t.get(unit) != 1:
            return None
        return p, Fraction(t.get(ZERO, 0))

    def is_variable(self, name: str) -> bool:
        hit = self.as_translate(name)
        return hit is not None and hit == (ZERO, 0)

    def unit_monomial(self):
        """(p0, c) when the expansion is X^{p0} times a unit, else None."""
        if not self._items:
            return None
        p0 = tuple(min(p[i] for p in self._items) for i in range(3))
        if p0 not in self._items or self._items[p0].get(ZERO, 0) == 0:
            return None
        return p0, Fraction(self._items[p0][ZERO])


class Family(Enum):
    TOROIDAL_PAIR = "ToroidalPair"
    W_CANONICAL = "WCanonical"
    TOROIDAL_MORPHISM = "ToroidalMorphism"
    MONOMIAL_FORM = "MonomialForm"
    PREPARED = "Prepared"
    SUPER = "SuperParam"
    GOOD = "Good"
    WEAKLY_GOOD = "WeaklyGood"


@dataclass(frozen=True)
class FormClass:
    """A classifier verdict: the family, the listed case, and extracted witnesses."""

    family: Family
    case: str
    name: str
    witnesses: Mapping = field(default_factory=dict)
    matched: tuple = ()

    def __str__(self):
        return f"{self.family.value} {self.case} ({self.name})"


@dataclass(frozen=True)
class LocalForm:
    """A local model of the morphism at a source point over a target point."""

    source: PointType
    target: PointType
    u: Expansion
    v: Expansion
    w: Expansion
    provenance: str | None = None

    def components(self) -> tuple:
        return (self.u, self.v, self.w)

    def permuted(self, perm: Sequence[int]) -> "LocalForm":
        comps = self.components()
        u, v, w = (comps[i] for i in perm)
        return replace(self, u=u, v=v, w=w)

    def replace(self, **kw) -> "LocalForm":
        return replace(self, **kw)

    def graded(self) -> tuple:
        return tuple(e.graded(self.source) for e in self.components())
