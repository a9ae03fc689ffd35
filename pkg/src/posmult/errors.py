"""Exception types raised by posmult."""

import numpy as np


class PosmultError(Exception):
    """Base class for all posmult errors."""


class NonHermitian(PosmultError, ValueError):
    pass


class NonFinite(PosmultError, ArithmeticError):
    pass


class DimensionMismatch(PosmultError, ValueError):
    pass


class NegativeWeight(PosmultError, ValueError):
    pass


class NonPsdWeight(PosmultError, ValueError):
    pass


class AtomAtOrigin(PosmultError, ValueError):
    """A Levy measure atom sits at the origin, where the integrand is singular."""


class AtomOutOfBox(PosmultError, ValueError):
    pass


class QuadratureFailure(PosmultError, RuntimeError):
    pass


class UnderResolved(PosmultError, ValueError):
    """The grid spacing is too coarse for the requested test function."""


class UnboundedSymbol(PosmultError, ValueError):
    """A multiplier was requested for a symbol with no known sup bound."""


class ConfigInvalid(PosmultError, ValueError):
    pass


def check_finite(arr, what="value"):
    arr = np.asarray(arr)
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{what} contains non-finite entries")
    return arr
