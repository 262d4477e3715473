"""Exception types shared across the package."""


class HyperfitError(Exception):
    """Base class for errors raised by this package."""


class SupportError(HyperfitError, KeyError):
    """A moment array was asked for an entry outside its stored support."""

    def __init__(self, alpha):
        self.alpha = tuple(alpha)
        super().__init__(f"moment array has no entry for multidegree {self.alpha}")

    def __str__(self):
        return self.args[0]


class ClosureError(HyperfitError, ValueError):
    """A basis transform produced a monomial outside the working basis."""

    def __init__(self, alpha, message=None):
        self.alpha = tuple(alpha)
        if message is None:
            message = (
                f"transformed polynomial has a nonzero coefficient on multidegree "
                f"{self.alpha}, which is outside the working basis; use a basis whose "
                f"span is closed under the transform (a union of degree sets for "
                f"orthogonal maps, a triangular set for translations)"
            )
        super().__init__(message)


class NoSolutionError(HyperfitError, RuntimeError):
    """The noise-level eigenvalue problem has no usable root."""
