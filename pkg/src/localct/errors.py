"""Exception hierarchy shared by all modules."""


class LocalCTError(Exception):
    """Base class for every error raised by this package."""


class PrecisionLoss(LocalCTError):
    """Working precision is too small to decide the requested quantity.

    ``floor`` carries the precision that was actually available.
    """

    def __init__(self, message, floor=None):
        super().__init__(message if floor is None else f"{message} (precision floor {floor})")
        self.floor = floor


class NoConvergence(LocalCTError):
    """Hensel/Newton criterion violated."""


class DivideByZero(LocalCTError, ZeroDivisionError):
    pass


class ConstructionError(LocalCTError):
    """Bad construction input (reducible modulus, non-Eisenstein polynomial...)."""


class NotGalois(LocalCTError):
    pass


class BadHint(LocalCTError):
    pass


class ComposeError(LocalCTError):
    """Composition with a series that has a constant term, or non-invertible series."""


class BadFrobeniusLift(LocalCTError):
    pass


class TooLarge(LocalCTError):
    """Enumeration budget exceeded."""


class Unstable(LocalCTError):
    """Two truncations disagree; raise the truncation."""


class InternalInconsistency(LocalCTError):
    """A closed-form value disagrees with its brute-force oracle."""


class SingularCurve(LocalCTError):
    pass


class LiftFailure(LocalCTError):
    pass


class ParseError(LocalCTError):
    def __init__(self, message, location=None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location
