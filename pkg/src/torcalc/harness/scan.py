"""Semicontinuity scan: tau at a 3-point against tau at nearby points."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import Indeterminate, UnsupportedCase
from ..forms import LocalForm
from ..series import DEFAULT_DEGREE
from .generate import make_rng
from .oracles import check_rewrite
from .recipes import SPECIALIZATIONS, applicable, specialize_any


@dataclass
class ScanEntry:
    setting: str
    constants: tuple
    tau_generic: object
    tau_special: object
    holds: bool
    oracle: str
    problems: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"setting": self.setting, "constants": [str(c) for c in self.constants],
                "tau_generic": str(self.tau_generic), "tau_special": str(self.tau_special),
                "holds": self.holds, "oracle": self.oracle, "problems": list(self.problems)}


@dataclass
class ScanReport:
    entries: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return all(e.holds and e.oracle != "failed" for e in self.entries)

    def to_json(self) -> dict:
        return {"holds": self.holds, "entries": [e.to_json() for e in self.entries]}


def semicontinuity_scan(f: LocalForm, recipe: str | None = None, seed=0, degree: int = DEFAULT_DEGREE,
                        measure: str = "length", verify: bool = True) -> ScanReport:
    """Specialize f to every applicable nearby point and compare tau.

    ``recipe`` restricts the scan to one specialization name (for example
    ``"independent"``) or one setting label (``"independent@z"``).  With
    ``verify`` every rewrite is also checked by direct substitution.
    """
    if recipe is not None and recipe.split("@")[0] not in SPECIALIZATIONS:
        raise UnsupportedCase(f"unknown specialization {recipe!r}; known: {', '.join(SPECIALIZATIONS)}")
    settings = [s for s in applicable(f) if recipe is None or recipe in (s.recipe, s.label)]
    if recipe is not None and not settings:
        raise UnsupportedCase(f"specialization {recipe!r} does not apply to this form")
    rng = make_rng(seed)
    report = ScanReport()
    for s in settings:
        rw = specialize_any(f, s, rng, degree, measure)
        status, problems = "skipped", []
        if verify:
            try:
                chk = check_rewrite(rw, degree, measure)
                status, problems = ("passed" if chk.ok else "failed"), chk.problems
            except Indeterminate as exc:
                status, problems = "indeterminate", [str(exc)]
        report.entries.append(ScanEntry(s.label, rw.constants, rw.tau_before, rw.tau_after,
                                        rw.holds, status, problems))
    return report
