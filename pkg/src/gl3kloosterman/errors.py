"""Exception hierarchy shared by all modules."""


class KloostermanError(Exception):
    """Base class for every error raised by this package."""


class NotInvertible(KloostermanError, ValueError):
    pass


class ModuliNotCoprime(KloostermanError, ValueError):
    pass


class OrderOverflow(KloostermanError, OverflowError):
    """Cyclotomic order would exceed the configured cap."""


class CapExceeded(KloostermanError, RuntimeError):
    """Naive enumeration would exceed the configured work cap."""


class InvalidArguments(KloostermanError, ValueError):
    pass


class InvalidDecomposition(KloostermanError, ValueError):
    pass


class NotPrimePower(KloostermanError, ValueError):
    pass


class CoprimalityViolated(KloostermanError, ValueError):
    pass


class InvalidDivisors(KloostermanError, ValueError):
    pass


class InvalidHRange(KloostermanError, ValueError):
    pass
