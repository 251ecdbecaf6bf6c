"""Exception hierarchy shared by the library and the command line front end."""


class SlidingDropError(Exception):
    """Base class for all errors raised by slidedrop."""


class ConfigError(SlidingDropError, ValueError):
    """Invalid or incomplete run configuration (CLI exit code 2)."""


class PreconditionError(SlidingDropError, ValueError):
    """An operation was called outside the regime where it is defined."""


class NumericalError(SlidingDropError, RuntimeError):
    """A numerical procedure failed (CLI exit code 3)."""


class DropCollapseError(NumericalError):
    """The support length fell below the configured floor."""
