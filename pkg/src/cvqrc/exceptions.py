"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent configuration (CLI exit code 2)."""


class DivergenceError(RuntimeError):
    """A simulation left its admissible range (CLI exit code 3)."""
