"""Exception types shared across the package."""


class SqfscanError(Exception):
    """Base class for all package-specific errors."""


class BudgetExhausted(SqfscanError):
    """A bounded search ran out of budget before finding what it needed.

    Existence may still be guaranteed mathematically (e.g. Dirichlet's
    theorem); the bound is ours, not the theorem's.
    """


class NotInRf(SqfscanError):
    """A prime was required to be good with a root mod q, and is not."""

    def __init__(self, q, reason=""):
        self.q = q
        super().__init__(f"prime {q} is not usable: {reason}" if reason else f"prime {q} is not usable")


class NotGoodPrime(SqfscanError):
    """The prime is not good for the polynomial (p | 2*disc*lc)."""


class SingularSeed(SqfscanError):
    """Hensel lifting was attempted from a seed where the gradient vanishes."""


class DepthCapTooSmall(SqfscanError):
    """A lifting-exhaustion depth cap was set below its safe floor."""


class InternalSearchExhausted(SqfscanError):
    """A search that is guaranteed to succeed failed: this is a bug, not
    an input problem, and callers should not catch it."""


class UnsupportedConditional(SqfscanError):
    """The requested construction depends on the Parity Conjecture and is
    deliberately not implemented."""
