"""Exception hierarchy shared by the engine, state helpers and CLI."""


class WalkError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(WalkError, ValueError):
    """Invalid lattice, run configuration or initial-state spec."""


class GuardViolation(WalkError, RuntimeError):
    """A runtime faithfulness guard tripped (edge touch or seam crossing)."""
