"""The tau invariant of a prepared local form, with a certificate.

tau is the size of H/A, where H is generated by the exponents of u, v and the
invariant-relevant terms of w, and A by the exponents of u, v (plus the
leading exponent of w when the target is a 3-point).  Size is the number of
prime factors of the order (``length``, the default) or the order itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import total_ordering
from math import gcd

from .errors import NoMatch, NotPrepared, TorcalcError
from .forms import LocalForm, PointType, classify_pair, classify_toroidal, is_prepared
from .forms.canonical import leq, split_for_pair, split_proportional, split_z
from .forms.pairs import allowed_permutations, classify_pair_parts
from .lattice import QuotientReport, SubLattice, quotient

MEASURES = ("length", "order")


class TauDisagreement(TorcalcError):
    """Two admissible orderings of the target parameters gave different values."""


@total_ordering
@dataclass(frozen=True)
class Tau:
    """A natural number, or minus infinity (``value is None``)."""

    value: int | None
    measure: str = "length"

    @property
    def is_neg_infinity(self) -> bool:
        return self.value is None

    def _key(self):
        return -1 if self.value is None else self.value

    def __lt__(self, other):
        if not isinstance(other, Tau):
            return NotImplemented
        return self._key() < other._key()

    def __eq__(self, other):
        if not isinstance(other, Tau):
            return NotImplemented
        return self.value == other.value and self.measure == other.measure

    def __hash__(self):
        return hash((self.value, self.measure))

    def __str__(self):
        return "-inf" if self.value is None else str(self.value)

    def to_json(self):
        return "-inf" if self.value is None else self.value


NEG_INF = Tau(None)


@dataclass(frozen=True)
class TauCertificate:
    """How tau was obtained: branch, generators of H and A, and the quotient."""

    case: str
    target: str
    H: tuple = ()
    A: tuple = ()
    report: QuotientReport | None = None
    permutation: tuple = (0, 1, 2)
    reason: str = ""
    alternatives: tuple = field(default=(), compare=False)

    def to_json(self) -> dict:
        out = {"case": self.case, "target": self.target,
               "H": [list(v) for v in self.H], "A": [list(v) for v in self.A],
               "permutation": list(self.permutation), "reason": self.reason}
        if self.report is not None:
            r = self.report
            out["quotient"] = {"finite": r.finite, "elementary_divisors": list(r.elementary_divisors),
                               "order": r.order, "length": r.length}
        if self.alternatives:
            out["alternatives"] = [[list(p), v] for p, v in self.alternatives]
        return out


def _finish(case, target, H, A, measure, perm=(0, 1, 2)):
    H = tuple(tuple(h) for h in H)
    A = tuple(tuple(a) for a in A)
    report = quotient(SubLattice(H), SubLattice(A))
    if not report.finite:
        raise TorcalcError(f"infinite quotient in branch {case}; the form is not prepared")
    return Tau(report.measure(measure), measure), TauCertificate(case, target.value, H, A, report, tuple(perm))


def _neg_inf(target, reason, perm=(0, 1, 2), measure="length"):
    return Tau(None, measure), TauCertificate("toroidal", target.value, permutation=tuple(perm), reason=reason)


def _leading(items: dict):
    """Componentwise minimum of a support, if it is itself in the support."""
    if not items:
        return None
    m = tuple(min(p[i] for p in items) for i in range(3))
    return m if m in items else None


def _pair_branch(f: LocalForm, pair, measure, perm):
    """tau for a form whose (u, v) is the toroidal pair ``pair``."""
    case, wit = int(pair.case), pair.witnesses
    split = split_for_pair(pair, f.source, f.w)
    three = f.target is PointType.THREE
    if not split.low and (three or split.kind == "z" and not any(split.anchor)):
        return _neg_inf(f.target, "w is the anchor monomial alone", perm, measure)
    lead = None
    if three:
        items = f.w.graded(f.source).raw_items()
        lead = _leading(items)
        if lead is None:
            raise NotPrepared("w is not a unit times a monomial over a 3-point")
    if case == 4:
        rows = [wit["u"], wit["v"]]
        H = rows + sorted(split.low)
        A = rows + ([lead] if three else [])
        return _finish("space", f.target, H, A, measure, perm)
    if case == 2:
        rows = [(wit["a"], wit["b"]), (wit["c"], wit["d"])]
        H = rows + [p[:2] for p in sorted(split.low)]
        A = rows + ([lead[:2]] if three else [])
        return _finish("plane_monomial", f.target, H, A, measure, perm)
    if case == 3:
        rows = [(wit["k"],), (wit["t"],)]
        H = rows + [(split.index[p],) for p in sorted(split.low)]
        A = list(rows)
        if three:
            a, b = wit["a"], wit["b"]
            if lead[0] * b != lead[1] * a:
                raise NotPrepared("leading monomial of w is not a power of x^a y^b")
            A.append((lead[0] // a,))
        return _finish("plane_power", f.target, H, A, measure, perm)
    if case == 1:
        rows = [(wit["a"],), (wit["b"],)]
        H = rows + [(p[0],) for p in sorted(split.low)]
        A = rows + ([(lead[0],)] if three else [])
        return _finish("line_translate", f.target, H, A, measure, perm)
    if case == 5:
        rows = [(wit["a"],)]
        return _finish("line_free", f.target, rows + [(p[0],) for p in sorted(split.low)], rows, measure, perm)
    rows = [(wit["k"],)]
    H = rows + [(split.index[p],) for p in sorted(split.low)]
    return _finish("plane_power_free", f.target, H, rows, measure, perm)


def _line_swapped(f: LocalForm, wit, measure):
    split = split_z(f.v.graded(f.source), "z")
    low = sorted(p[0] for p in split.low)
    a = wit["a"]
    return _finish("line_swapped", f.target, [(a,)] + [(i,) for i in low], [(a,), (low[0],)], measure)


def _plane_swapped(f: LocalForm, wit, measure):
    split = split_proportional(f.v.graded(f.source), wit["a"], wit["b"])
    low = sorted(split.index[p] for p in split.low)
    k = wit["k"]
    return _finish("plane_power_swapped", f.target, [(k,)] + [(i,) for i in low], [(k,), (low[0],)], measure)


def tau(f: LocalForm, measure: str = "length"):
    """(Tau, TauCertificate) for a prepared or toroidal form."""
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}")
    try:
        tor = classify_toroidal(f)
        return Tau(None, measure), TauCertificate("toroidal", f.target.value,
                                                  permutation=tuple(tor.witnesses["permutation"]),
                                                  reason=f"toroidal form {tor.case}")
    except NoMatch:
        pass
    verdict = is_prepared(f)
    if verdict.case == "2b":
        return _line_swapped(f, verdict.witnesses, measure)
    if verdict.case == "2c":
        return _plane_swapped(f, verdict.witnesses, measure)
    results = []
    for perm in allowed_permutations(f.target):
        g = f.permuted(perm)
        try:
            pair = classify_pair_parts(g.source, g.target, g.u, g.v)
        except NoMatch:
            continue
        try:
            results.append(_pair_branch(g, pair, measure, perm))
        except NoMatch:
            continue
    if not results:
        raise NotPrepared("no ordering of the target parameters gives a toroidal pair")
    values = {r[0] for r in results}
    alternatives = tuple((r[1].permutation, r[0].to_json()) for r in results)
    value, cert = results[0]
    cert = TauCertificate(cert.case, cert.target, cert.H, cert.A, cert.report, cert.permutation,
                          cert.reason, alternatives if len(results) > 1 else ())
    if len(values) > 1:
        raise TauDisagreement(f"orderings disagree: {alternatives}")
    return value, cert


def tau_prepared_region(forms, value: int, measure: str = "length") -> dict:
    """Whether no form attaining ``value`` lies over a 2-point or 3-point target.

    A 2-point target sits on a 2-curve, so both count as offending.
    """
    offending = []
    for idx, f in enumerate(forms):
        t, _ = tau(f, measure)
        if t.value == value and f.target in (PointType.TWO, PointType.THREE):
            offending.append(idx)
    return {"tau": value, "tau_prepared": not offending, "offending": offending}
