"""Seeded random generation of prepared forms and B-forms.

Every sampler draws from a ``random.Random`` (Mersenne Twister, portable
across Python builds), rejects draws that do not classify, and gives up with
GeneratorExhausted after a bounded number of attempts.  All monomials stay
below the truncation degree, so translated substitutions remain exact.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

from ..blowup import line_v_form, line_w_form, match_bform, plane_v_form, plane_w_form
from ..errors import GeneratorExhausted, MalformedInput, NoMatch, NotABForm
from ..forms import Expansion, LocalForm, PointType, is_prepared
from ..forms.model import const, var
from ..forms.pairs import det3
from ..lattice import rank_of_monomials
from ..series import DEFAULT_DEGREE

ONE, TWO, THREE = PointType.ONE, PointType.TWO, PointType.THREE

RNG_NAME = "MT19937 (Python random.Random)"

TEMPLATES = ("line_pair", "plane_monomial", "plane_power", "space", "line_free", "plane_free",
             "line_swapped", "plane_swapped", "three_target")
BFORM_KINDS = ("line_v", "plane_v", "line_w", "plane_w")


@dataclass(frozen=True)
class Bounds:
    """Size limits for generated forms."""

    max_exponent: int = 6
    max_terms: int = 8
    max_coeff: int = 9
    retries: int = 200

    def __post_init__(self):
        if not 1 <= self.max_exponent <= 6:
            raise MalformedInput("max exponent must lie in 1..6")
        if not 1 <= self.max_terms <= 8:
            raise MalformedInput("term count must lie in 1..8")
        if not 1 <= self.max_coeff <= 9:
            raise MalformedInput("coefficient bound must lie in 1..9")


def make_rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


class _Reject(Exception):
    pass


class _Draw:
    """Helpers bound to one rng, bound set and truncation degree."""

    def __init__(self, rng, bounds, degree):
        self.rng, self.b, self.degree = rng, bounds, degree

    def exp(self, lo=0):
        return self.rng.randint(lo, self.b.max_exponent)

    def vec(self, lo=0):
        return tuple(self.exp(lo) for _ in range(3))

    def coef(self):
        m = self.b.max_coeff
        num = self.rng.choice([k for k in range(-m, m + 1) if k])
        den = self.rng.choice([1, 1, 1] + list(range(2, m + 1)))
        return Fraction(num, den)

    def constant(self, root=1):
        """A nonzero rational s ** root inside the coefficient bound."""
        m = self.b.max_coeff
        pool = []
        for num in range(-3, 4):
            for den in (1, 2, 3):
                if num and gcd(num, den) == 1:
                    c = Fraction(num, den) ** root
                    if abs(c.numerator) <= m and c.denominator <= m:
                        pool.append(c)
        return self.rng.choice(pool)

    def fits(self, p):
        return sum(p) < self.degree and max(p) <= self.b.max_exponent

    def pick(self, candidates, k):
        candidates = sorted(set(candidates))
        k = min(k, len(candidates), self.b.max_terms - 1)
        return self.rng.sample(candidates, max(k, 0))


def _z(beta, degree):
    return const(beta, degree) + var("z", degree)


def _mono(p, degree):
    return Expansion.monomial(p, degree=degree)


# prepared templates; each returns a LocalForm or raises _Reject

def _line_pair(d: _Draw):
    a, b, c = d.exp(1), d.exp(1), d.exp(1)
    alpha = d.constant(b)
    low = [(i, j, 0) for i in range(c) for j in range(d.b.max_exponent + 1) if (i, j) != (0, 0)]
    items = [(p, d.coef()) for p in d.pick([p for p in low if d.fits(p)], d.rng.randint(0, 3))]
    beta = d.rng.choice([Fraction(0), d.coef()])
    if not d.fits((c, 0, 1)):
        raise _Reject
    w = Expansion.indexed_sum(items, ((c, 0, 0), _z(beta, d.degree)), d.degree)
    return LocalForm(ONE, TWO, _mono((a, 0, 0), d.degree),
                     Expansion.translate((b, 0, 0), alpha, "y", d.degree), w)


def _plane_monomial(d: _Draw):
    u, v = d.vec()[:2] + (0,), d.vec()[:2] + (0,)
    if u[0] * v[1] - u[1] * v[0] == 0:
        raise _Reject
    n = d.vec()[:2] + (0,)
    beta = Fraction(0) if n == (0, 0, 0) else d.rng.choice([Fraction(0), d.coef()])
    low = [(i, j, 0) for i, j in product(range(d.b.max_exponent + 1), repeat=2)
           if (i, j) != (0, 0) and not (i >= n[0] and j >= n[1])]
    items = [(p, d.coef()) for p in d.pick([p for p in low if d.fits(p)], d.rng.randint(0, 3))]
    if not d.fits((n[0], n[1], 1)):
        raise _Reject
    w = Expansion.indexed_sum(items, (n, _z(beta, d.degree)), d.degree)
    return LocalForm(TWO, TWO, _mono(u, d.degree), _mono(v, d.degree), w)


def _coprime(d: _Draw):
    a, b = d.exp(1), d.exp(1)
    if gcd(a, b) != 1:
        raise _Reject
    return a, b


def _proportional_w(d: _Draw, a, b, start=0):
    """Dependent terms (x^a y^b)^i z^j not above an independent anchor x^e y^f."""
    e, f = d.exp(), d.exp()
    if a * f - b * e == 0:
        raise _Reject
    cands = [(a * i, b * i, j) for i in range(start, 7) for j in range(3)
             if (i, j) != (0, 0) and not (a * i >= e and b * i >= f) and d.fits((a * i, b * i, j))]
    items = [(p, d.coef()) for p in d.pick(cands, d.rng.randint(0, 3))]
    if not d.fits((e, f, 0)):
        raise _Reject
    return items, (e, f, 0)


def _plane_power(d: _Draw):
    a, b = _coprime(d)
    k, t = d.exp(1), d.exp(1)
    items, anchor = _proportional_w(d, a, b)
    w = Expansion.indexed_sum(items, (anchor, 1), d.degree)
    return LocalForm(TWO, TWO, _mono((a * k, b * k, 0), d.degree),
                     Expansion.translate((a * t, b * t, 0), d.constant(), "z", d.degree), w)


def _plane_free(d: _Draw):
    a, b = _coprime(d)
    k = d.exp(1)
    items, anchor = _proportional_w(d, a, b)
    w = Expansion.indexed_sum(items, (anchor, 1), d.degree)
    return LocalForm(TWO, ONE, _mono((a * k, b * k, 0), d.degree), Expansion.variable("z", d.degree), w)


def _line_free(d: _Draw):
    a, c = d.exp(1), d.exp(1)
    low = [(i, j, 0) for i in range(c) for j in range(d.b.max_exponent + 1) if (i, j) != (0, 0)]
    items = [(p, d.coef()) for p in d.pick([p for p in low if d.fits(p)], d.rng.randint(0, 3))]
    beta = d.rng.choice([Fraction(0), d.coef()])
    if not d.fits((c, 0, 1)):
        raise _Reject
    w = Expansion.indexed_sum(items, ((c, 0, 0), _z(beta, d.degree)), d.degree)
    return LocalForm(ONE, ONE, _mono((a, 0, 0), d.degree), Expansion.variable("y", d.degree), w)


def space_form(d: _Draw, proportional=False):
    """u, v monomials of rank 2 over a 3-point, w with a rank 3 anchor.

    With ``proportional`` the images (u0 + u1, u2) and (v0 + v1, v2) under the
    2-curve chart are parallel.
    """
    u = d.vec()
    if proportional:
        m = d.b.max_exponent
        cands = [v for v in product(range(m + 1), repeat=3)
                 if (u[0] + u[1]) * v[2] == (v[0] + v[1]) * u[2] and rank_of_monomials([u, v]) == 2]
        if not cands:
            raise _Reject
        v = d.rng.choice(cands)
    else:
        v = d.vec()
    if not any(u) or not any(v) or rank_of_monomials([u, v]) != 2:
        raise _Reject
    n = d.vec()
    if det3(u, v, n) == 0 or not d.fits(n):
        raise _Reject
    cands = [p for p in product(range(d.b.max_exponent + 1), repeat=3)
             if any(p) and det3(u, v, p) == 0 and d.fits(p) and not all(x >= y for x, y in zip(p, n))]
    items = [(p, d.coef()) for p in d.pick(cands, d.rng.randint(0, 3))]
    w = Expansion.indexed_sum(items, (n, 1), d.degree)
    return LocalForm(THREE, TWO, _mono(u, d.degree), _mono(v, d.degree), w)


def _space(d: _Draw):
    return space_form(d, proportional=d.rng.random() < 0.3)


def _line_swapped(d: _Draw):
    a, c, e = d.exp(1), d.exp(), d.exp(1)
    cands = [(i, j, 0) for i in range(c, c + e) for j in range(4) if (i, j) != (c, 0) and d.fits((i, j, 0))]
    items = [((c, 0, 0), d.coef())] + [(p, d.coef()) for p in d.pick(cands, d.rng.randint(0, 2))]
    beta = d.rng.choice([Fraction(0), d.coef()])
    if not d.fits((c + e, 0, 1)) or c + e == 0:
        raise _Reject
    v = Expansion.indexed_sum(items, ((c + e, 0, 0), _z(beta, d.degree)), d.degree)
    return LocalForm(ONE, TWO, _mono((a, 0, 0), d.degree), v, Expansion.variable("y", d.degree))


def _plane_swapped(d: _Draw):
    a, b = _coprime(d)
    k, l = d.exp(1), d.exp()
    items, anchor = _proportional_w(d, a, b, start=l)
    lead = (a * l, b * l, 0)
    if not d.fits(lead) or (lead[0] >= anchor[0] and lead[1] >= anchor[1]) or lead == (0, 0, 0):
        raise _Reject
    items = [(p, c) for p, c in items if p != lead] + [(lead, d.coef())]
    v = Expansion.indexed_sum(items, (anchor, 1), d.degree)
    return LocalForm(TWO, TWO, _mono((a * k, b * k, 0), d.degree), v, Expansion.variable("z", d.degree))


def _three_target(d: _Draw):
    """Over a 3-point w keeps its expanded shape and equals M0 times a unit."""
    source = d.rng.choice([ONE, TWO, THREE])
    if source is THREE and d.rng.random() < 0.3:
        rows = [d.vec() for _ in range(3)]
        if det3(*rows) == 0 or not all(d.fits(r) for r in rows):
            raise _Reject
        return LocalForm(THREE, THREE, *(_mono(r, d.degree) for r in rows))
    if source is ONE:
        i0, c = d.exp(1), d.exp(1)
        if c <= i0:
            raise _Reject
        u = _mono((d.exp(1), 0, 0), d.degree)
        v = Expansion.translate((d.exp(1), 0, 0), d.constant(), "y", d.degree)
        low = [(i, j, 0) for i in range(i0, c) for j in range(3) if (i, j) != (i0, 0)]
        m0, anchor = (i0, 0, 0), (c, 0, 0)
    elif source is TWO:
        p, q = d.vec()[:2] + (0,), d.vec()[:2] + (0,)
        if p[0] * q[1] - p[1] * q[0] == 0:
            raise _Reject
        u, v = _mono(p, d.degree), _mono(q, d.degree)
        m0 = d.vec()[:2] + (0,)
        anchor = (m0[0] + d.exp(), m0[1] + d.exp(), 0)
        low = [(i, j, 0) for i in range(m0[0], anchor[0] + 1) for j in range(m0[1], anchor[1] + 1)
               if (i, j, 0) != m0 and not (i >= anchor[0] and j >= anchor[1])]
    else:
        p, q = d.vec(), d.vec()
        if rank_of_monomials([p, q]) != 2:
            raise _Reject
        u, v = _mono(p, d.degree), _mono(q, d.degree)
        m0, anchor = d.vec(), d.vec()
        anchor = tuple(a + b for a, b in zip(m0, anchor))
        if det3(p, q, m0) != 0 or det3(p, q, anchor) == 0:
            raise _Reject
        low = [x for x in product(range(d.b.max_exponent + 1), repeat=3)
               if x != m0 and det3(p, q, x) == 0 and all(a >= b for a, b in zip(x, m0))
               and not all(a >= b for a, b in zip(x, anchor))]
    if not any(m0) or not d.fits(anchor) or not d.fits(m0) or m0 == anchor:
        raise _Reject
    items = [(m0, d.coef())] + [(x, d.coef()) for x in d.pick([x for x in low if d.fits(x)],
                                                              d.rng.randint(0, 2))]
    if source is THREE:
        rest = (anchor, 1)
    else:
        if not d.fits(anchor[:2] + (1,)):
            raise _Reject
        rest = (anchor, _z(d.rng.choice([Fraction(0), d.coef()]), d.degree))
    return LocalForm(source, THREE, u, v, Expansion.indexed_sum(items, rest, d.degree))


_SAMPLERS = {"line_pair": _line_pair, "plane_monomial": _plane_monomial, "plane_power": _plane_power,
             "space": _space, "line_free": _line_free, "plane_free": _plane_free,
             "line_swapped": _line_swapped, "plane_swapped": _plane_swapped,
             "three_target": _three_target}


def _attempt(rng, bounds, degree, sampler, accept, what):
    d = _Draw(rng, bounds, degree)
    for _ in range(bounds.retries):
        try:
            f = sampler(d)
        except _Reject:
            continue
        try:
            if accept(f):
                return f
        except (NoMatch, MalformedInput, NotABForm):
            continue
    raise GeneratorExhausted(f"no {what} found in {bounds.retries} attempts")


def generate_prepared(seed, bounds: Bounds = Bounds(), template: str | None = None,
                      degree: int = DEFAULT_DEGREE) -> LocalForm:
    """A random prepared form; the template is recorded in its provenance.

    ``seed`` is an integer or an existing ``random.Random``.
    """
    rng = make_rng(seed)
    name = template or rng.choice(TEMPLATES)
    if name not in _SAMPLERS:
        raise MalformedInput(f"unknown template {name!r}")

    def accept(f):
        is_prepared(f)
        return True

    f = _attempt(rng, bounds, degree, _SAMPLERS[name], accept, f"{name} form")
    return f.replace(provenance=f"generated:{name}")


def generate_space(seed, bounds: Bounds = Bounds(), proportional: bool = False,
                   degree: int = DEFAULT_DEGREE) -> LocalForm:
    """A prepared form over a 3-point with a rank 2 monomial pair."""
    rng = make_rng(seed)

    def accept(f):
        is_prepared(f)
        return True

    f = _attempt(rng, bounds, degree, lambda d: space_form(d, proportional), accept, "3-point form")
    return f.replace(provenance="generated:space" + (":proportional" if proportional else ""))


def generate_toroidal_three(seed, bounds: Bounds = Bounds(), degree: int = DEFAULT_DEGREE) -> LocalForm:
    """u, v, w monomials of rank 3 over a 3-point: a toroidal form."""
    rng = make_rng(seed)

    def sample(d):
        rows = [d.vec() for _ in range(3)]
        if det3(*rows) == 0 or not all(d.fits(r) for r in rows):
            raise _Reject
        return LocalForm(THREE, THREE, *(_mono(r, d.degree) for r in rows))

    f = _attempt(rng, bounds, degree, sample, lambda f: True, "toroidal form")
    return f.replace(provenance="generated:toroidal_three")


# B-forms

def _bform_sampler(kind, good):
    def line_v(d: _Draw):
        a = d.rng.randint(2, d.b.max_exponent)
        b, n = d.rng.randint(0, a - 1), d.exp(1)
        cands = [(i, j) for i in range(7) for j in range(3)
                 if (i, j) != (0, 0) and i + b * j < n and (not good or i % a) and d.fits((i + b * j, 0, j))]
        terms = {p: d.coef() for p in d.pick(cands, d.rng.randint(0, 3))}
        if not d.fits((n, 1, 0)):
            raise _Reject
        return line_v_form(a, b, n, d.rng.choice([Fraction(0), d.coef()]), terms, d.degree)

    def plane_v(d: _Draw):
        a, b = _coprime(d)
        k = d.exp(1)
        c, dd = d.rng.randint(0, a * k - 1), d.rng.randint(0, b * k)
        e, f = d.exp(), d.exp()
        if a * f - b * e == 0 or not d.fits((c, dd, 1)) or not d.fits((e, f, 0)):
            raise _Reject
        cands = [(i, l) for i in range(7) for l in range(3)
                 if (i, l) != (0, 0) and not (a * i >= e and b * i >= f) and (not good or i % k)
                 and d.fits((a * i + c * l, b * i + dd * l, l))]
        terms = {p: d.coef() for p in d.pick(cands, d.rng.randint(0, 3))}
        return plane_v_form(a, b, k, c, dd, e, f, terms, d.degree)

    def line_w(d: _Draw):
        a = d.rng.randint(2, d.b.max_exponent)
        return line_w_form(a, d.exp(1), d.rng.randint(0, a - 1), d.constant(), d.degree)

    def plane_w(d: _Draw):
        a, b, c, dd = (d.exp() for _ in range(4))
        if a * dd - b * c == 0 or a == 0:
            raise _Reject
        g, h = d.rng.randint(0, a - 1), d.rng.randint(0, b)
        if not d.fits((g, h, 1)):
            raise _Reject
        return plane_w_form(a, b, c, dd, g, h, d.degree)

    return {"line_v": line_v, "plane_v": plane_v, "line_w": line_w, "plane_w": plane_w}[kind]


def generate_bform(seed, bounds: Bounds = Bounds(), kind: str | None = None, good: bool = False,
                   degree: int = DEFAULT_DEGREE) -> LocalForm:
    """A random B-form whose curve x = z = 0 can be blown up.

    With ``good`` the w coefficients avoid multiples of a (or k).
    """
    rng = make_rng(seed)
    kind = kind or rng.choice(BFORM_KINDS)
    if kind not in BFORM_KINDS:
        raise MalformedInput(f"unknown B-form kind {kind!r}")
    f = _attempt(rng, bounds, degree, _bform_sampler(kind, good), lambda f: bool(match_bform(f)),
                 f"{kind} B-form")
    return f.replace(provenance=f"generated:{kind}" + (":good" if good else ""))


def chart_constant(rng: random.Random, bounds: Bounds = Bounds()) -> Fraction:
    """A nonzero chart constant; perfect powers make most roots rational."""
    pool = [Fraction(c) for c in (1, -1, 4, 8, -8, 9, Fraction(1, 4), Fraction(1, 8), Fraction(4, 9))]
    return rng.choice([c for c in pool if abs(c.numerator) <= bounds.max_coeff
                       and c.denominator <= bounds.max_coeff])
