"""Local forms: point types, canonical expansions and classifiers."""

from .canonical import WSplit, classify_w, normalize_w, split_w
from .model import (VARS, Expansion, Family, FormClass, Graded, LocalForm, PointType,
                    Term, const, series, translate_series, var)
from .pairs import (allowed_permutations, classify_monomial_form, classify_pair,
                    classify_toroidal, is_toroidal)
from .verdicts import is_good, is_prepared, is_super, is_weakly_good

__all__ = [
    "VARS", "Expansion", "Family", "FormClass", "Graded", "LocalForm", "PointType", "Term",
    "WSplit", "allowed_permutations", "classify_monomial_form", "classify_pair",
    "classify_toroidal", "classify_w", "const", "is_good", "is_prepared", "is_super",
    "is_toroidal", "is_weakly_good", "normalize_w", "series", "split_w",
    "translate_series", "var",
]
