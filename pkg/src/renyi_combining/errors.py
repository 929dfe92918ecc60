"""Exception hierarchy shared by all modules."""


class RenyiError(Exception):
    """Base class for library errors."""


class DomainError(RenyiError, ValueError):
    """An argument lies outside the domain of the requested function."""


class UnsupportedOrderError(RenyiError, ValueError):
    """The Renyi order is not supported for this quantity (e.g. alpha=1 for K-values)."""


class ChannelParseError(RenyiError, ValueError):
    """A channel file or shorthand could not be parsed or failed validation."""


class ConfigError(RenyiError, ValueError):
    """Inconsistent configuration (e.g. merge policy vs. requested quantity)."""
