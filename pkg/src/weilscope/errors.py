"""Exception types shared across the package."""


class WeilscopeError(Exception):
    """Base class for all package errors."""


class NotPrime(WeilscopeError):
    pass


class ReducibleModulus(WeilscopeError):
    pass


class NonPrimitiveRoot(WeilscopeError):
    pass


class DegreeMismatch(WeilscopeError):
    pass


class InvalidElement(WeilscopeError):
    pass


class IndexOutOfRange(WeilscopeError):
    pass


class NotInvertible(WeilscopeError):
    pass


class ZeroScalar(WeilscopeError):
    pass


class FieldTooLarge(WeilscopeError):
    pass


class LengthMismatch(WeilscopeError):
    pass


class CharacteristicMismatch(WeilscopeError):
    pass


class NonUnit(WeilscopeError):
    pass


class NotRational(WeilscopeError):
    pass


class CacheCorrupt(WeilscopeError):
    pass


class ConfigInvalid(WeilscopeError):
    pass
