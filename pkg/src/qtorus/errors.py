"""Exception and warning types shared across the package."""


class QTorusError(Exception):
    """Base class for all errors raised by qtorus."""


class PrecisionError(QTorusError):
    """The working precision cannot deliver the requested accuracy."""


class IndeterminateComparison(PrecisionError):
    """Two enclosures overlap, so their order is undecided at this precision."""


class ToleranceError(QTorusError):
    """A certified error bound exceeds the requested tolerance."""


class EmptySetError(QTorusError):
    """A diophantine set has no members in the scanned range."""


class NearPoleWarning(UserWarning):
    """1 - J is within a few error radii of zero; digits of j are unreliable."""
