class ConfigError(ValueError):
    """Invalid scenario configuration."""


class InfeasibleError(RuntimeError):
    """No mode sequence keeps every battery above its threshold."""

    def __init__(self, message: str, first_pruned_step: int | None = None):
        super().__init__(message)
        self.first_pruned_step = first_pruned_step


class EnumerationCapError(RuntimeError):
    """Exhaustive enumeration refused because the instance is too large."""
