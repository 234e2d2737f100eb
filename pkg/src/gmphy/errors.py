"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid modulation or experiment configuration."""


class InfeasibleError(RuntimeError):
    """A requested optimization or measurement has no feasible answer."""
