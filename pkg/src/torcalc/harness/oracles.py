"""Independent checks used by the property suite.

``oracle_quotient`` counts H/A by walking cosets inside a fundamental
parallelepiped of A, using only rational linear algebra (no Hermite or Smith
forms).  ``check_chart`` verifies a transform by composing series: the old
components pulled back along the chart must equal the target map applied to
the new components pushed through the coordinate change.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import floor

from ..blowup import TARGET_VARS, TransformResult, bform_tau, match_bform, monomials
from ..errors import BoxTooSmall, Indeterminate, MalformedInput, MixedDimensions, NoMatch, NotASubgroup, NotABForm
from ..forms import Expansion, LocalForm, classify_toroidal, is_prepared
from ..forms.model import VARS
from ..forms.pairs import det3
from ..series import DEFAULT_DEGREE
from ..tau import tau

DEFAULT_BOX = 100_000


def _row_reduce(rows):
    """Reduced echelon form over Q; returns (rows, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots, r = [], 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        lead = m[r][c]
        m[r] = [x / lead for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def _det(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * rows[0][j] * _det(minor)
    return total


def _solve(basis, v):
    """Coefficients c with sum c_i basis_i = v, basis square and invertible."""
    n = len(basis)
    aug = [[Fraction(basis[j][i]) for j in range(n)] + [Fraction(v[i])] for i in range(n)]
    red, _ = _row_reduce(aug)
    return [red[i][n] for i in range(n)]


def oracle_quotient(H, A, box: int = DEFAULT_BOX):
    """Order of H/A by coset enumeration; None when the quotient is infinite.

    ``box`` bounds the volume of the fundamental parallelepiped that is
    walked; larger quotients raise BoxTooSmall.
    """
    H = [tuple(int(x) for x in h) for h in H if any(h)]
    A = [tuple(int(x) for x in a) for a in A if any(a)]
    dims = {len(v) for v in H + A}
    if len(dims) > 1:
        raise MixedDimensions(f"vectors of lengths {sorted(dims)}")
    if not H:
        if A:
            raise NotASubgroup("A is nonzero but H is zero")
        return 1
    _, pivots = _row_reduce(H)
    r = len(pivots)
    rank_a = len(_row_reduce(A)[1]) if A else 0
    if rank_a < r:
        # A might still fail to sit in H; check that on the span first
        _, piv_all = _row_reduce(H + A) if A else (None, pivots)
        if len(piv_all) > r:
            raise NotASubgroup("A is not contained in the span of H")
        return None
    # project onto pivot coordinates: injective on the rational span of H
    _, piv_all = _row_reduce(H + A)
    if len(piv_all) > r:
        raise NotASubgroup("A is not contained in the span of H")
    Hp = [tuple(h[c] for c in pivots) for h in H]
    Ap = [tuple(a[c] for c in pivots) for a in A]
    best = None
    for sub in combinations(Ap, r):
        d = abs(_det([list(s) for s in sub]))
        if d and (best is None or d < best[0]):
            best = (d, sub)
    vol, basis = best
    if vol > box:
        raise BoxTooSmall(f"fundamental region of volume {vol} exceeds the box {box}")

    def reduce(v):
        c = _solve(basis, v)
        fl = [floor(x) for x in c]
        return tuple(int(v[i] - sum(fl[j] * basis[j][i] for j in range(r))) for i in range(r))

    def closure(gens):
        seen = {tuple([0] * r)}
        frontier = list(seen)
        while frontier:
            nxt = []
            for e in frontier:
                for g in gens:
                    s = reduce(tuple(a + b for a, b in zip(e, g)))
                    if s not in seen:
                        seen.add(s)
                        nxt.append(s)
            frontier = nxt
        return seen

    ch, ca = closure(Hp), closure(Ap)
    if not ca <= ch:
        raise NotASubgroup("A is not contained in H")
    return len(ch) // len(ca)


# chart verification

@dataclass
class ChartCheck:
    identities: dict = field(default_factory=dict)
    jacobian: Fraction | None = None
    reclassified: str = ""
    tau_raw: object = None
    tau_structured: object = None
    problems: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def to_json(self) -> dict:
        return {"identities": self.identities, "jacobian": str(self.jacobian),
                "reclassified": self.reclassified, "tau_raw": str(self.tau_raw),
                "tau_structured": str(self.tau_structured), "problems": list(self.problems)}


def raw_form(f: LocalForm, degree: int = DEFAULT_DEGREE) -> LocalForm:
    """The same form with every component replaced by its truncated series."""
    return f.replace(u=Expansion.raw(f.u.value(degree)), v=Expansion.raw(f.v.value(degree)),
                     w=Expansion.raw(f.w.value(degree)), provenance="raw")


def _pulled_back(before, after, source_map, target_map, coordinates, degree, out):
    shifted = tuple(v for v in VARS if source_map[v].constant_term != 0)
    if shifted:
        # a translation moves dropped high-degree terms into low degrees
        for e in before.components():
            if any(sum(p) >= degree for p in monomials(e)):
                raise Indeterminate("a translated form must be a polynomial below the truncation degree")
    new = {n: c.value(degree).substitute(coordinates) for n, c in zip(TARGET_VARS, after.components())}
    for name, comp in zip(TARGET_VARS, before.components()):
        lhs = comp.value(degree).substitute(source_map, shifted=shifted)
        rhs = target_map[name].substitute(new, variables=VARS)
        ok = lhs.equal_mod(rhs, degree)
        out.identities[name] = ok
        if not ok:
            out.problems.append(f"{name}: pulled back component differs from the new form")
    lin = [[c.coefficient(tuple(1 if i == j else 0 for i in range(3))) for j in range(3)]
           for c in (coordinates[v] for v in VARS)]
    out.jacobian = Fraction(det3(*lin))
    if out.jacobian == 0:
        out.problems.append("coordinate change has a singular linear part")


def _reclassify(after, tau_structured, degree, measure, out, bform=False):
    raw = raw_form(after, degree)
    out.tau_structured = tau_structured
    if bform:
        try:
            bf = match_bform(raw)
        except NotABForm:
            out.problems.append("raw output is not a B-form")
            return
        out.reclassified = f"bform {bf.kind}"
        out.tau_raw = bform_tau(bf, measure, raw)
    else:
        try:
            tor = classify_toroidal(raw)
            out.reclassified = f"toroidal {tor.case}"
        except NoMatch:
            try:
                out.reclassified = f"prepared {is_prepared(raw).case}"
            except (NoMatch, MalformedInput) as exc:
                out.problems.append(f"raw output is not prepared: {exc}")
                return
        out.tau_raw = tau(raw, measure)[0]
    if out.tau_raw != out.tau_structured:
        out.problems.append(f"tau differs: raw {out.tau_raw}, structured {out.tau_structured}")


def _bounded(after, degree):
    # inexact coefficients are truncated series already; exact ones must fit
    for e in after.components():
        if e.exact and any(sum(p) > degree for p in monomials(e)):
            raise Indeterminate("the output has terms beyond the truncation degree")


def check_chart(res: TransformResult, degree: int = DEFAULT_DEGREE, measure: str = "length") -> ChartCheck:
    """Verify a transform against direct substitution and reclassification.

    Raises Indeterminate when the truncation is too small to decide.
    """
    _bounded(res.after, degree)
    out = ChartCheck()
    ch = res.chart
    _pulled_back(res.before, res.after, ch.source_map, ch.target_map, ch.coordinates, degree, out)
    _reclassify(res.after, res.tau_after, degree, measure, out, bform=res.outcome == "bform")
    return out


def check_rewrite(rw, degree: int = DEFAULT_DEGREE, measure: str = "length") -> ChartCheck:
    """The same checks for a recipe rewrite (see harness.recipes)."""
    _bounded(rw.after, degree)
    out = ChartCheck()
    _pulled_back(rw.before, rw.after, rw.source_map, rw.target_map, rw.coordinates, degree, out)
    _reclassify(rw.after, rw.tau_after, degree, measure, out)
    return out
