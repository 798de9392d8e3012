"""Exact-rational multivariate power series truncated at a total degree.

A :class:`TruncatedSeries` stores the terms of total degree at most ``degree``.
Terms above the truncation are unknown, never assumed zero, so every operation
reports its result at the precision it can actually certify.
"""

from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import (
    ConstantNotOne,
    DivergentSubstitution,
    NotAUnit,
    NotDivisible,
    TruncationMismatch,
    UnrepresentableConstant,
    VariableMismatch,
)

DEFAULT_DEGREE = 12

Monomial = tuple


def as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def _int_root(n: int, q: int) -> int | None:
    """Exact q-th root of a non-negative integer, or None."""
    if n < 2:
        return n
    r = round(n ** (1.0 / q))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** q == n:
            return cand
    # float rounding can be far off for huge n; fall back to bisection
    lo, hi = 0, 1 << (n.bit_length() // q + 1)
    while lo <= hi:
        mid = (lo + hi) // 2
        p = mid ** q
        if p == n:
            return mid
        if p < n:
            lo = mid + 1
        else:
            hi = mid - 1
    return None


def exact_power(c, e) -> Fraction:
    """Return c**e for rational c, e when the result is rational.

    Raises UnrepresentableConstant when the required root does not exist
    in the rationals (or c is zero with a negative exponent).
    """
    c, e = as_fraction(c), as_fraction(e)
    if c == 0:
        if e > 0:
            return Fraction(0)
        if e == 0:
            return Fraction(1)
        raise UnrepresentableConstant(f"0 ** {e}")
    p, q = e.numerator, e.denominator
    sign = 1
    if c < 0:
        if q % 2 == 0:
            raise UnrepresentableConstant(f"({c}) ** {e} is not real")
        sign = -1 if p % 2 else 1
        c = -c
    num = _int_root(c.numerator, q)
    den = _int_root(c.denominator, q)
    if num is None or den is None:
        raise UnrepresentableConstant(f"({c}) ** {e} is irrational")
    return sign * Fraction(num, den) ** p


def _mono_str(variables, mono) -> str:
    parts = []
    for v, k in zip(variables, mono):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def graded_lex_key(mono):
    # ascending total degree, then earlier variables first
    return (sum(mono), tuple(-k for k in mono))


class TruncatedSeries:
    """A power series over ``variables`` known up to total degree ``degree``."""

    __slots__ = ("_vars", "_terms", "_degree", "_hash")

    def __init__(self, variables: Iterable[str], terms: Mapping | None = None,
                 degree: int = DEFAULT_DEGREE):
        self._vars = tuple(variables)
        if len(self._vars) > 3 or len(set(self._vars)) != len(self._vars):
            raise ValueError(f"bad variable tuple {self._vars!r}")
        if degree < 0:
            raise ValueError("truncation degree must be non-negative")
        self._degree = int(degree)
        n = len(self._vars)
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(k) for k in mono)
            if len(mono) != n or min(mono, default=0) < 0:
                raise ValueError(f"bad exponent {mono!r} for {self._vars!r}")
            c = as_fraction(c)
            if c and sum(mono) <= self._degree:
                clean[mono] = clean.get(mono, 0) + c
        self._terms = {m: c for m, c in clean.items() if c}
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, c, variables, degree=DEFAULT_DEGREE):
        return cls(variables, {(0,) * len(tuple(variables)): c}, degree)

    @classmethod
    def zero(cls, variables, degree=DEFAULT_DEGREE):
        return cls(variables, {}, degree)

    @classmethod
    def variable(cls, name, variables, degree=DEFAULT_DEGREE):
        variables = tuple(variables)
        mono = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise VariableMismatch(f"{name} not in {variables}")
        return cls(variables, {mono: 1}, degree)

    @classmethod
    def monomial(cls, exponents, variables, coeff=1, degree=DEFAULT_DEGREE):
        return cls(variables, {tuple(exponents): coeff}, degree)

    # accessors
    @property
    def variables(self) -> tuple:
        return self._vars

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def terms(self) -> Mapping:
        return MappingProxyType(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, mono) -> Fraction:
        return self._terms.get(tuple(mono), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient((0,) * len(self._vars))

    def is_unit(self) -> bool:
        return self.constant_term != 0

    def is_constant(self) -> bool:
        zero = (0,) * len(self._vars)
        return all(m == zero for m in self._terms)

    def order(self) -> int | None:
        """Lowest total degree of a nonzero term, None for the zero series."""
        return min((sum(m) for m in self._terms), default=None)

    def depends_on(self, var: str) -> bool:
        i = self._index(var)
        return any(m[i] for m in self._terms)

    def support(self) -> list:
        return sorted(self._terms, key=graded_lex_key)

    def _index(self, var):
        try:
            return self._vars.index(var)
        except ValueError:
            raise VariableMismatch(f"{var} not in {self._vars}") from None

    # comparison
    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self._vars == other._vars and self._degree == other._degree
                and self._terms == other._terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self._vars, self._degree, frozenset(self._terms.items())))
        return self._hash

    def equal_mod(self, other: "TruncatedSeries", degree: int | None = None) -> bool:
        """Equality of all terms up to ``degree`` (default: the lower precision)."""
        if self._vars != other._vars:
            raise VariableMismatch(f"{self._vars} vs {other._vars}")
        d = min(self._degree, other._degree) if degree is None else degree
        a = {m: c for m, c in self._terms.items() if sum(m) <= d}
        b = {m: c for m, c in other._terms.items() if sum(m) <= d}
        return a == b

    # arithmetic
    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError(f"expected TruncatedSeries, got {type(other).__name__}")
        if other._vars != self._vars:
            raise VariableMismatch(f"{self._vars} vs {other._vars}")
        if other._degree != self._degree:
            raise TruncationMismatch(f"D={self._degree} vs D={other._degree}")

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self._vars, self._degree)

    def _new(self, terms, degree=None):
        return TruncatedSeries(self._vars, terms, self._degree if degree is None else degree)

    def add(self, other):
        other = self._coerce(other)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return self._new(out)

    def neg(self):
        return self._new({m: -c for m, c in self._terms.items()})

    def sub(self, other):
        return self.add(self._coerce(other).neg())

    def scale(self, c):
        c = as_fraction(c)
        return self._new({m: c * v for m, v in self._terms.items()})

    def mul(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        return self._new(_mul_terms(self._terms, other._terms, self._degree))

    __add__ = add
    __sub__ = sub
    __neg__ = neg
    __mul__ = mul

    def __radd__(self, other):
        return self.add(other)

    def __rsub__(self, other):
        return self._coerce(other).sub(self)

    def __rmul__(self, other):
        return self.mul(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("use rational_power for non-natural exponents")
        result = TruncatedSeries.constant(1, self._vars, self._degree)
        base = self
        while n:
            if n & 1:
                result = result.mul(base)
            n >>= 1
            if n:
                base = base.mul(base)
        return result

    def times_monomial(self, mono, coeff=1):
        mono = tuple(mono)
        c = as_fraction(coeff)
        return self._new({tuple(a + b for a, b in zip(m, mono)): c * v
                          for m, v in self._terms.items()})

    def divide_monomial(self, mono):
        """Exact quotient by a monomial; the precision drops by its degree."""
        mono = tuple(mono)
        d = sum(mono)
        if d > self._degree:
            raise NotDivisible(f"monomial degree {d} exceeds truncation {self._degree}")
        out = {}
        for m, c in self._terms.items():
            q = tuple(a - b for a, b in zip(m, mono))
            if min(q) < 0:
                raise NotDivisible(f"term {_mono_str(self._vars, m)} not divisible")
            out[q] = c
        return self._new(out, self._degree - d)

    def truncate(self, degree: int):
        if degree > self._degree:
            raise TruncationMismatch(f"cannot raise precision {self._degree} -> {degree}")
        return self._new(self._terms, degree)

    def derivative(self, var: str):
        i = self._index(var)
        out = {}
        for m, c in self._terms.items():
            if m[i]:
                q = list(m)
                q[i] -= 1
                out[tuple(q)] = c * m[i]
        # the derivative of an unknown degree D+1 term is unknown at degree D
        return self._new(out, max(self._degree - 1, 0))

    def homogeneous(self) -> list:
        parts = [dict() for _ in range(self._degree + 1)]
        for m, c in self._terms.items():
            parts[sum(m)][m] = c
        return parts

    def invert_unit(self):
        """Multiplicative inverse of a unit series."""
        c = self.constant_term
        if c == 0:
            raise NotAUnit("constant term is zero")
        return self.scale(1 / c)._power_one(Fraction(-1)).scale(1 / c)

    def rational_power(self, e):
        """(1 + m) ** e for a series with constant term exactly 1."""
        if self.constant_term != 1:
            raise ConstantNotOne(f"constant term is {self.constant_term}")
        return self._power_one(as_fraction(e))

    def unit_power(self, e):
        """u ** e for any unit u whose constant has a rational e-th power."""
        e = as_fraction(e)
        c = self.constant_term
        if c == 0:
            raise NotAUnit("constant term is zero")
        return self.scale(1 / c)._power_one(e).scale(exact_power(c, e))

    def _power_one(self, e: Fraction):
        # Euler-operator recurrence: d f_d = sum_j (e j - (d - j)) u_j f_{d-j}
        u = self.homogeneous()
        f = [dict() for _ in range(self._degree + 1)]
        f[0] = {(0,) * len(self._vars): Fraction(1)}
        for d in range(1, self._degree + 1):
            acc = {}
            for j in range(1, d + 1):
                if not u[j] or not f[d - j]:
                    continue
                w = e * j - (d - j)
                if w == 0:
                    continue
                for m, c in _mul_terms(u[j], f[d - j], d).items():
                    acc[m] = acc.get(m, 0) + w * c
            f[d] = {m: c / d for m, c in acc.items() if c}
        out = {}
        for part in f:
            out.update(part)
        return self._new(out)

    def substitute(self, mapping: Mapping, shifted: Iterable[str] = (),
                   variables: Iterable[str] | None = None):
        """Compose with ``var -> image`` for each mapped variable.

        Unmapped variables map to the same-named variable of the target ring.
        An image with a nonzero constant term is only allowed for variables
        listed in ``shifted``; the caller vouches that the series is a genuine
        polynomial in them, so the translation loses nothing.
        """
        shifted = set(shifted)
        images = dict(mapping)
        sample = next(iter(images.values()), None)
        target_vars = tuple(variables) if variables is not None else (
            sample.variables if sample is not None else self._vars)
        degrees = {img.degree for img in images.values()}
        if len(degrees) > 1:
            raise TruncationMismatch(f"image truncations differ: {sorted(degrees)}")
        img_degree = degrees.pop() if degrees else self._degree
        for v in self._vars:
            if v not in images:
                images[v] = TruncatedSeries.variable(v, target_vars, img_degree)
        for v, img in images.items():
            if v not in self._vars:
                raise VariableMismatch(f"{v} is not a variable of the series")
            if img.variables != target_vars:
                raise VariableMismatch(f"image of {v} over {img.variables}")
            if img.constant_term != 0 and v not in shifted:
                raise DivergentSubstitution(f"image of {v} has constant term {img.constant_term}")
        degree = min(img_degree, self._degree)
        powers = {v: [{(0,) * len(target_vars): Fraction(1)}] for v in self._vars}
        out = {}
        for mono, c in self._terms.items():
            prod = {(0,) * len(target_vars): c}
            for v, k in zip(self._vars, mono):
                if not k:
                    continue
                cache = powers[v]
                while len(cache) <= k:
                    cache.append(_mul_terms(cache[-1], images[v]._terms, degree))
                prod = _mul_terms(prod, cache[k], degree)
                if not prod:
                    break
            for m, v in prod.items():
                out[m] = out.get(m, 0) + v
        return TruncatedSeries(target_vars, out, degree)

    def revert(self, var: str):
        """Compositional inverse of a series in the single variable ``var``.

        Requires zero constant term and nonzero linear coefficient; returns r
        with self(r(t)) = t up to the truncation.
        """
        i = self._index(var)
        if any(k for m in self._terms for j, k in enumerate(m) if j != i):
            raise VariableMismatch(f"revert needs a series in {var} alone")
        lin = tuple(1 if j == i else 0 for j in range(len(self._vars)))
        a1 = self.coefficient(lin)
        if self.constant_term != 0 or a1 == 0:
            raise NotAUnit("series is not a coordinate change in one variable")
        t = TruncatedSeries.variable(var, self._vars, self._degree)
        r = t.scale(1 / a1)
        for _ in range(self._degree):
            err = t - self.substitute({var: r})
            if err.is_zero():
                break
            r = r + err.scale(1 / a1)
        return r

    # printing
    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for m in self.support():
            c = self._terms[m]
            body = _mono_str(self._vars, m)
            if not body:
                txt = str(c)
            elif c == 1:
                txt = body
            elif c == -1:
                txt = "-" + body
            else:
                txt = f"{c}*{body}"
            out.append(txt)
        s = " + ".join(out).replace("+ -", "- ")
        return s

    def __repr__(self):
        return f"TruncatedSeries({self}, vars={self._vars}, D={self._degree})"


def _mul_terms(a: Mapping, b: Mapping, degree: int) -> dict:
    if len(a) > len(b):
        a, b = b, a
    bl = sorted(((sum(m), m, c) for m, c in b.items()), key=lambda t: t[0])
    out = {}
    for ma, ca in a.items():
        da = sum(ma)
        room = degree - da
        if room < 0:
            continue
        for db, mb, cb in bl:
            if db > room:
                break
            m = tuple(x + y for x, y in zip(ma, mb))
            out[m] = out.get(m, 0) + ca * cb
    return {m: c for m, c in out.items() if c}


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.add(b)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a.mul(b)


def invert_unit(u: TruncatedSeries) -> TruncatedSeries:
    return u.invert_unit()


def rational_power(u: TruncatedSeries, e) -> TruncatedSeries:
    return u.rational_power(e)


def substitute(s: TruncatedSeries, mapping: Mapping, shifted: Iterable[str] = ()) -> TruncatedSeries:
    return s.substitute(mapping, shifted)
