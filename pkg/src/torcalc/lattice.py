"""Integer lattices in Z^n (n <= 3): bases, membership, ranks and quotients."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod
from typing import Iterable, Sequence

from sympy import factorint

from .errors import MixedDimensions, NotASubgroup

Vector = tuple


def _dimension(vectors: Sequence[Sequence[int]], expected: int | None = None) -> int | None:
    dims = {len(v) for v in vectors}
    if expected is not None:
        dims.add(expected)
    if len(dims) > 1:
        raise MixedDimensions(f"dimensions {sorted(dims)}")
    return dims.pop() if dims else None


def hermite_rows(vectors: Iterable[Sequence[int]]) -> list:
    """Row-style Hermite normal form of the span of ``vectors``.

    Rows are returned top to bottom with strictly increasing pivot columns,
    positive pivots, and entries above each pivot reduced into [0, pivot).
    """
    rows = [list(map(int, v)) for v in vectors]
    _dimension(rows)
    rows = [r for r in rows if any(r)]
    if not rows:
        return []
    n = len(rows[0])
    basis = []
    col = 0
    while rows and col < n:
        live = [r for r in rows if r[col]]
        rest = [r for r in rows if not r[col]]
        if not live:
            col += 1
            continue
        # Euclid on column entries until a single row keeps a nonzero entry
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[col]))
            pivot = live[0]
            nxt = [pivot]
            for r in live[1:]:
                q = r[col] // pivot[col]
                r = [a - q * b for a, b in zip(r, pivot)]
                (nxt if r[col] else rest).append(r)
            live = nxt
        pivot = live[0]
        if pivot[col] < 0:
            pivot = [-a for a in pivot]
        basis.append(pivot)
        rows = [r for r in rest if any(r)]
        col += 1
    # reduce above-pivot entries
    for i, row in enumerate(basis):
        pc = _pivot_col(row)
        for j in range(i):
            q = basis[j][pc] // row[pc]
            if q:
                basis[j] = [a - q * b for a, b in zip(basis[j], row)]
    return [tuple(r) for r in basis]


def _pivot_col(row) -> int:
    return next(i for i, a in enumerate(row) if a)


def canonical_basis(gens: Iterable[Sequence[int]]) -> list:
    """Triangular basis of the subgroup generated by ``gens`` ([] for zero)."""
    return hermite_rows(gens)


@dataclass(frozen=True)
class SubLattice:
    """A finitely generated subgroup of Z^n.

    Equality compares the canonical bases, so two generating sets of the same
    subgroup give equal lattices.
    """

    generators: tuple
    dimension: int | None = None
    basis: tuple = field(init=False, compare=False, repr=False)

    def __init__(self, generators: Iterable[Sequence[int]] = (), dimension: int | None = None):
        gens = tuple(tuple(int(a) for a in g) for g in generators)
        dim = _dimension(gens, dimension)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "dimension", dim)
        object.__setattr__(self, "basis", tuple(hermite_rows(gens)))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __eq__(self, other):
        if not isinstance(other, SubLattice):
            return NotImplemented
        return self.basis == other.basis and (
            self.dimension == other.dimension or not self.basis)

    def __hash__(self):
        return hash(self.basis)

    def coordinates(self, v: Sequence[int]) -> tuple | None:
        """Integer coordinates of v in the canonical basis, or None if v is outside."""
        v = [int(a) for a in v]
        _dimension([v], self.dimension)
        coords = []
        for row in self.basis:
            pc = _pivot_col(row)
            q, r = divmod(v[pc], row[pc])
            if r:
                return None
            coords.append(q)
            v = [a - q * b for a, b in zip(v, row)]
        return tuple(coords) if not any(v) else None

    def contains(self, v: Sequence[int]) -> bool:
        return self.coordinates(v) is not None

    def __contains__(self, v):
        return self.contains(v)

    def join(self, *others) -> "SubLattice":
        gens = list(self.generators)
        for o in others:
            gens.extend(o.generators if isinstance(o, SubLattice) else [o])
        return SubLattice(gens, self.dimension)


def contains(L: SubLattice, v: Sequence[int]) -> bool:
    return L.contains(v)


def rank_of_monomials(ms: Iterable[Sequence[int]]) -> int:
    """Rank of the integer matrix whose rows are the given exponent vectors."""
    return len(hermite_rows(list(ms)))


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    a = [list(map(int, r)) for r in matrix if any(r)]
    if not a:
        return []
    m, n = len(a), len(a[0])
    diag = []
    t = 0
    while t < min(m, n):
        entries = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not entries:
            break
        _, pi, pj = min(entries)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            p = a[t][t]
            changed = False
            for i in range(t + 1, m):
                q = a[i][t] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    a[t], a[i] = a[i], a[t]
                    changed = True
                    break
            if changed:
                continue
            for j in range(t + 1, n):
                q = a[t][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    for row in a:
                        row[t], row[j] = row[j], row[t]
                    changed = True
                    break
            if changed:
                continue
            # pivot now clears its row and column; enforce divisibility
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % p), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def omega(n: int) -> int:
    """Number of prime factors of n counted with multiplicity."""
    return sum(factorint(n).values()) if n > 1 else 0


@dataclass(frozen=True)
class QuotientReport:
    """Structure of H/A: elementary divisors, order and length."""

    finite: bool
    elementary_divisors: tuple = ()
    order: int | None = None
    length: int | None = None

    def measure(self, kind: str) -> int:
        if not self.finite:
            raise ValueError("infinite quotient has no finite measure")
        if kind == "order":
            return self.order
        if kind == "length":
            return self.length
        raise ValueError(f"unknown measure {kind!r}")


def quotient(H: SubLattice, A: SubLattice) -> QuotientReport:
    """Elementary divisors of A inside H, via the coordinate matrix in a basis of H."""
    if H.dimension is not None and A.dimension is not None and H.dimension != A.dimension:
        raise MixedDimensions(f"H in Z^{H.dimension}, A in Z^{A.dimension}")
    coords = []
    for g in A.generators:
        c = H.coordinates(g)
        if c is None:
            raise NotASubgroup(f"{g} is not in H")
        coords.append(c)
    if A.rank < H.rank:
        return QuotientReport(finite=False)
    divisors = tuple(d for d in smith_diagonal(coords) if d != 1)
    order = prod(divisors)
    return QuotientReport(True, divisors, order, sum(omega(d) for d in divisors))
