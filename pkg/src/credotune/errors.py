class ConfigurationError(ValueError):
    """Raised when a component is configured inconsistently.

    The message names the offending field so the CLI can surface it as-is.
    """
