"""Exception types shared across the package."""


class SatostatsError(Exception):
    """Base class for all package errors."""


class BadReduction(SatostatsError):
    """Curve has bad reduction at the requested prime."""


class BudgetExceeded(SatostatsError):
    """Prime exceeds the configured counting budget."""


class WeilViolation(SatostatsError):
    """Euler factor coefficients violate the Weil bounds."""


class ParseError(SatostatsError):
    """Malformed input file or expression."""


class OrderError(SatostatsError):
    """Stream not sorted ascending by norm."""


class GroupMismatch(SatostatsError):
    """Character label and class point belong to different groups."""


class ResidualTooLarge(SatostatsError):
    """Numeric decomposition residual above the hard failure threshold."""


class TrivialPresent(SatostatsError):
    """Operation requires a virtual character with no trivial constituent."""


class MissingRank(SatostatsError):
    """Rank profile lacks an entry for a constituent character."""


class CMConstraintViolation(SatostatsError):
    """CM base-change rank constraint r_sym3 >= r violated."""


class EmptySeries(SatostatsError):
    """Statistic queried on an empty series."""
