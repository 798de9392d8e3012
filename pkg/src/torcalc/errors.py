"""Exception hierarchy shared by every torcalc module.

All library errors derive from :class:`TorcalcError`, so the command line can
map any of them to the input-error exit status in one place.
"""


class TorcalcError(Exception):
    """Base class for every error raised by the library."""


# lattice
class MixedDimensions(TorcalcError):
    """Vectors of different lengths were combined."""


class NotASubgroup(TorcalcError):
    """A generator of the would-be subgroup lies outside the ambient lattice."""


# series
class VariableMismatch(TorcalcError):
    """Series over different variable tuples were combined."""


class TruncationMismatch(TorcalcError):
    """Series truncated at different degrees were combined."""


class NotAUnit(TorcalcError):
    """A series with zero constant term was used where a unit is required."""


class ConstantNotOne(TorcalcError):
    """A fractional power was requested of a series whose constant term is not 1."""


class DivergentSubstitution(TorcalcError):
    """A substitution image has a nonzero constant term for an unshifted variable."""


class UnrepresentableConstant(TorcalcError):
    """A required root of a rational constant is not rational."""


class Indeterminate(TorcalcError):
    """The question cannot be decided within the available truncation."""


# forms
class MalformedInput(TorcalcError):
    """A local form violates the structural requirements of its declared shape."""


class NoMatch(TorcalcError):
    """A classifier found no matching case."""


class NotToroidalPair(NoMatch):
    """(u, v) does not match any toroidal pair shape."""


class NotToroidal(NoMatch):
    """The triple is not one of the toroidal morphism forms."""


class NotPrepared(NoMatch):
    """The local form is neither prepared nor toroidal."""


class NotSuper(NoMatch):
    """The parameters are not super parameters."""


class NotGood(NoMatch):
    """w is not good (or not weakly good) for the pair."""


# blowup
class UnsupportedCase(TorcalcError):
    """The chart/case combination is not part of the implemented case table."""


class ChartMismatch(TorcalcError):
    """The leading data of the form is incompatible with the requested chart."""


class ConstraintViolated(TorcalcError):
    """A curve blow-up input breaks the inequality constraints of its form."""


class NotABForm(TorcalcError):
    """The form is not one of the four non-principal curve blow-up forms."""


# harness
class BoxTooSmall(TorcalcError):
    """The enumeration box cannot certify the coset count."""


class GeneratorExhausted(TorcalcError):
    """Rejection sampling ran out of retries for the requested template."""


class ScenarioError(TorcalcError):
    """A scenario file does not parse against the schema."""


class NotDivisible(TorcalcError):
    """A series is not divisible by the requested monomial."""
