class RekException(Exception):
    """Base error. ``exit_code`` is what the CLI returns when it escapes."""

    exit_code: int = 1

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class ConfigError(RekException):
    exit_code = 2


class ProtocolError(RekException):
    exit_code = 3


class NumericalError(RekException):
    exit_code = 4


# configuration / parameters
class InvalidConfig(ConfigError):
    pass


class GridEmpty(ConfigError):
    pass


class TooFewSamples(ConfigError):
    pass


class InsufficientTrials(ConfigError):
    pass


class DatasetFormatError(ConfigError):
    pass


class IoError(ConfigError):
    pass


# wire and session
class BadMagic(ProtocolError):
    pass


class UnknownType(ProtocolError):
    pass


class LengthMismatch(ProtocolError):
    pass


class Truncated(ProtocolError):
    pass


class Timeout(ProtocolError):
    pass


class PeerError(ProtocolError):
    def __init__(self, detail: str, code: int = 0):
        super().__init__(detail)
        self.code = code


class RoleConflict(ProtocolError):
    pass


class SessionMismatch(ProtocolError):
    pass


class DimensionMismatch(ProtocolError):
    pass


class EntropyUnavailable(ProtocolError):
    pass


# arithmetic
class OutOfRange(NumericalError):
    pass


class OverflowDetected(NumericalError):
    pass


class BadKernel(NumericalError):
    pass


class NotConvergedWarning(UserWarning):
    pass
