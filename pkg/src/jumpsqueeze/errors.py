"""Exception types shared across the package."""


class TruncationError(ValueError):
    """A requested operation would leak significant population past the
    truncated Fock basis (or already has).

    Attributes
    ----------
    min_dim : int or None
        Advisory smallest truncation dimension expected to satisfy the
        tail-mass rule, when one can be estimated.
    """

    def __init__(self, message, min_dim=None):
        self.base_message = message
        if min_dim is not None:
            message = f"{message} (advisory minimum dimension: {min_dim})"
        super().__init__(message)
        self.min_dim = min_dim


class CutoffError(ValueError):
    """A summation cutoff is too small for the requested tolerance."""


class ConfigError(ValueError):
    """Configuration or input-file contents violate the schema."""
