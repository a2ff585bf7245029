"""Exception hierarchy shared by the codec, adapters, models and harness."""


class HetnetError(Exception):
    """Base class for all toolkit errors."""


# --- frame codec ---

class FrameError(HetnetError):
    """Base class for MAC frame encode/decode failures."""


class PayloadTooLarge(FrameError):
    pass


class InconsistentAddressing(FrameError):
    """Frame control addressing mode disagrees with the address value."""


class TruncatedFrame(FrameError):
    pass


class BadFcs(FrameError):
    """Computed CRC does not match the trailing frame check sequence."""


class UnsupportedFrameType(FrameError):
    """Security bit set, or a frame type outside this stack's contract."""


class DispatchMismatch(FrameError):
    """Leading payload bytes are not the configured dispatch prefix."""


# --- platform adapters ---

class AddressingUnsupported(HetnetError):
    """The platform's radio stack cannot carry this addressing mode."""


class BadChecksum(HetnetError):
    """XBee API envelope checksum verification failed."""


# --- models / calibration ---

class NonPositiveDistance(HetnetError):
    pass


class Infeasible(HetnetError):
    """Calibration constraint set has no solution in the parameter bounds."""


# --- simulator / harness ---

class InvalidScenario(HetnetError):
    pass


class IncompleteMatrix(HetnetError):
    """Metrics records do not cover the cells a findings check needs."""


class ConfigError(HetnetError):
    pass


class ProfileLoadError(HetnetError):
    pass


class ParseError(HetnetError):
    """Malformed CLI input (hex string or frame field list)."""
