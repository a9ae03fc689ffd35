"""Scalar- and matrix-valued functions on R^n ("symbols").

A symbol wraps a vectorised callable together with the bookkeeping the
multiplier machinery needs: a sup bound when one is known, an upper bound on
the real part (for semigroup constructions), and the constructor parameters
so that it can be written back into a JSON config.
"""

from __future__ import annotations

import numbers
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionMismatch, NonFinite

__all__ = [
    "as_points",
    "ScalarSymbol",
    "MatrixSymbol",
    "gaussian",
    "cosine",
    "sine",
    "constant",
    "quadratic",
    "imag_linear",
    "bump",
    "exp_of",
]


def as_points(x, n: int) -> np.ndarray:
    """Coerce ``x`` to a float array of shape ``(..., n)``.

    For ``n == 1`` a bare scalar or a 1-d array of positions is accepted and
    gets a trailing axis.
    """
    x = np.asarray(x, dtype=float)
    if n == 1 and (x.ndim == 0 or x.shape[-1] != 1):
        x = x[..., None]
    if x.ndim == 0 or x.shape[-1] != n:
        raise DimensionMismatch(f"expected points with last axis {n}, got shape {x.shape}")
    return x


def _opt(v):
    return None if v is None else float(v)


class ScalarSymbol:
    """A function R^n -> C evaluated on arrays of points.

    ``func`` receives an array of shape ``(..., n)`` and must return values of
    shape ``(...)``.
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        n: int,
        *,
        bound: float | None = None,
        re_bound: float | None = None,
        kind: str = "expression",
        params: dict | None = None,
        label: str | None = None,
    ):
        self._func = func
        self.n = int(n)
        self.bound = _opt(bound)
        if re_bound is None and bound is not None:
            re_bound = bound
        self.re_bound = _opt(re_bound)
        self.kind = kind
        self.params = params
        self.label = label or (params or {}).get("family", kind)

    @property
    def bounded(self) -> bool:
        return self.bound is not None

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, self.n)
        out = np.asarray(self._func(pts), dtype=complex)
        out = np.broadcast_to(out, pts.shape[:-1])
        if not np.all(np.isfinite(out)):
            raise NonFinite(f"symbol {self.label!r} produced non-finite values")
        return out

    def to_config(self) -> dict | None:
        return None if self.params is None else dict(self.params)

    def __mul__(self, other):
        if isinstance(other, ScalarSymbol):
            if other.n != self.n:
                raise DimensionMismatch("symbols live on different dimensions")
            bound = None
            if self.bound is not None and other.bound is not None:
                bound = self.bound * other.bound
            params = None
            if self.params is not None and other.params is not None:
                params = {"family": "product", "factors": [self.params, other.params]}
            f, g = self._func, other._func
            return ScalarSymbol(
                lambda x: f(x) * g(x), self.n, bound=bound, kind="product", params=params,
                label=f"{self.label}*{other.label}",
            )
        if isinstance(other, numbers.Number):
            c = complex(other)
            f = self._func
            bound = None if self.bound is None else abs(c) * self.bound
            re_bound = None
            if c.imag == 0 and c.real >= 0 and self.re_bound is not None:
                re_bound = c.real * self.re_bound
            params = None
            if self.params is not None:
                params = {"family": "scaled", "c": _jsonable(c), "of": self.params}
            return ScalarSymbol(
                lambda x: c * f(x), self.n, bound=bound, re_bound=re_bound,
                kind="scaled", params=params, label=f"{c}*{self.label}",
            )
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        if not isinstance(other, numbers.Number):
            return NotImplemented
        c = complex(other)
        f = self._func
        bound = None if self.bound is None else self.bound + abs(c)
        re_bound = None if self.re_bound is None else self.re_bound + c.real
        params = None
        if self.params is not None:
            params = {"family": "shifted", "c": _jsonable(c), "of": self.params}
        return ScalarSymbol(
            lambda x: f(x) + c, self.n, bound=bound, re_bound=re_bound,
            kind="shifted", params=params, label=f"{self.label}+{c}",
        )

    __radd__ = __add__

    def __repr__(self):
        return f"ScalarSymbol({self.label!r}, n={self.n}, bound={self.bound})"


class MatrixSymbol:
    """A function R^n -> C^{m x m}; ``func`` maps ``(..., n)`` to ``(..., m, m)``.

    ``bound`` bounds the operator norm of F(x) uniformly; ``lognorm_bound``
    bounds the largest eigenvalue of the Hermitian part of F(x), which is what
    controls the norm of exp(tF(x)). ``entry_re_bounds`` holds per-entry upper
    bounds on Re F_jk (NaN where unknown).
    """

    def __init__(
        self,
        func: Callable[[np.ndarray], np.ndarray],
        n: int,
        m: int,
        *,
        bound: float | None = None,
        lognorm_bound: float | None = None,
        entry_re_bounds=None,
        kind: str = "expression",
        params: dict | None = None,
        label: str | None = None,
    ):
        self._func = func
        self.n = int(n)
        self.m = int(m)
        self.bound = _opt(bound)
        if lognorm_bound is None and bound is not None:
            lognorm_bound = bound
        self.lognorm_bound = _opt(lognorm_bound)
        if entry_re_bounds is None:
            entry_re_bounds = np.full((self.m, self.m), np.nan if bound is None else bound)
        self.entry_re_bounds = np.asarray(entry_re_bounds, dtype=float).reshape(self.m, self.m)
        self.kind = kind
        self.params = params
        self.label = label or (params or {}).get("family", kind)

    @property
    def bounded(self) -> bool:
        return self.bound is not None

    def __call__(self, x) -> np.ndarray:
        pts = as_points(x, self.n)
        out = np.asarray(self._func(pts), dtype=complex)
        out = np.broadcast_to(out, pts.shape[:-1] + (self.m, self.m))
        if not np.all(np.isfinite(out)):
            raise NonFinite(f"symbol {self.label!r} produced non-finite values")
        return out

    def entry(self, j: int, k: int) -> ScalarSymbol:
        """Scalar view of entry (j, k), zero-based."""
        f = self._func
        re_b = self.entry_re_bounds[j, k]
        return ScalarSymbol(
            lambda x: np.asarray(f(x))[..., j, k], self.n,
            bound=None if self.bound is None else self.bound,
            re_bound=None if np.isnan(re_b) else re_b,
            kind="entry", label=f"{self.label}[{j},{k}]",
        )

    def to_config(self) -> dict | None:
        return None if self.params is None else dict(self.params)

    @classmethod
    def from_scalar(cls, s: ScalarSymbol) -> "MatrixSymbol":
        f = s._func
        return cls(
            lambda x: np.asarray(f(x), dtype=complex)[..., None, None], s.n, 1,
            bound=s.bound, lognorm_bound=s.re_bound, entry_re_bounds=[[np.nan if s.re_bound is None else s.re_bound]],
            kind=s.kind, params=s.params, label=s.label,
        )

    @classmethod
    def from_entries(cls, entries: Sequence[Sequence[ScalarSymbol]], *, kind="entries", params=None):
        m = len(entries)
        if m == 0 or any(len(row) != m for row in entries):
            raise DimensionMismatch("entries must form a non-empty square array")
        n = entries[0][0].n
        if any(e.n != n for row in entries for e in row):
            raise DimensionMismatch("entries live on different dimensions")
        funcs = [[e._func for e in row] for row in entries]

        def func(x):
            shape = x.shape[:-1]
            out = np.empty(shape + (m, m), dtype=complex)
            for j in range(m):
                for k in range(m):
                    out[..., j, k] = funcs[j][k](x)
            return out

        bounds = np.array([[np.nan if e.bound is None else e.bound for e in row] for row in entries])
        re_bounds = np.array([[np.nan if e.re_bound is None else e.re_bound for e in row] for row in entries])
        bound = None if np.isnan(bounds).any() else float(np.sqrt((bounds ** 2).sum()))
        # Gershgorin on the Hermitian part (F + F^*)/2.
        lognorm = None
        if not np.isnan(np.diag(re_bounds)).any():
            off = 0.5 * (bounds + bounds.T)
            np.fill_diagonal(off, 0.0)
            if not np.isnan(off).any():
                lognorm = float(np.max(np.diag(re_bounds) + off.sum(axis=1)))
        if params is None and all(e.params is not None for row in entries for e in row):
            params = {"family": "entries", "entries": [[e.params for e in row] for row in entries]}
        return cls(
            func, n, m, bound=bound, lognorm_bound=lognorm, entry_re_bounds=re_bounds,
            kind=kind, params=params, label=f"entries{m}x{m}",
        )

    def __repr__(self):
        return f"MatrixSymbol({self.label!r}, n={self.n}, m={self.m}, bound={self.bound})"


def _jsonable(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


def _vec(v, n=None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if n is not None and v.shape != (n,):
        raise DimensionMismatch(f"expected a vector of length {n}")
    return v


# ---------------------------------------------------------------- families


def gaussian(n: int = 1, width: float = 1.0) -> ScalarSymbol:
    """exp(-|x|^2 / (2 width^2)); positive semidefinite for every width."""
    w2 = float(width) ** 2
    return ScalarSymbol(
        lambda x: np.exp(-0.5 * np.sum(x * x, axis=-1) / w2), n, bound=1.0,
        kind="builtin", params={"family": "gaussian", "n": n, "width": float(width)},
    )


def cosine(freq=1.0) -> ScalarSymbol:
    """cos(v . x)."""
    v = _vec(freq)
    return ScalarSymbol(
        lambda x: np.cos(x @ v), v.size, bound=1.0,
        kind="builtin", params={"family": "cos", "freq": v.tolist()},
    )


def sine(freq=1.0) -> ScalarSymbol:
    """sin(v . x); odd, hence never positive semidefinite unless v = 0."""
    v = _vec(freq)
    return ScalarSymbol(
        lambda x: np.sin(x @ v), v.size, bound=1.0,
        kind="builtin", params={"family": "sin", "freq": v.tolist()},
    )


def constant(value, n: int = 1) -> ScalarSymbol:
    c = complex(value)
    return ScalarSymbol(
        lambda x: np.full(x.shape[:-1], c), n, bound=abs(c), re_bound=c.real,
        kind="builtin", params={"family": "constant", "n": n, "value": _jsonable(c)},
    )


def quadratic(n: int = 1, coeff: float = -1.0) -> ScalarSymbol:
    """coeff * |x|^2. Conditionally positive semidefinite iff coeff <= 0."""
    c = float(coeff)
    return ScalarSymbol(
        lambda x: c * np.sum(x * x, axis=-1), n, re_bound=0.0 if c <= 0 else None,
        kind="builtin", params={"family": "quadratic", "n": n, "coeff": c},
    )


def imag_linear(v) -> ScalarSymbol:
    """i (v . x); conditionally positive semidefinite (the drift term)."""
    v = _vec(v)
    return ScalarSymbol(
        lambda x: 1j * (x @ v), v.size, re_bound=0.0,
        kind="builtin", params={"family": "imag-linear", "v": v.tolist()},
    )


def bump(n: int = 1, radius: float = 1.0) -> ScalarSymbol:
    """Smooth compactly supported bump exp(1 - 1/(1 - |x|^2/radius^2)), equal to 1 at 0.

    Not positive semidefinite: its inverse Fourier transform has negative lobes.
    """
    r2 = float(radius) ** 2

    def func(x):
        s2 = np.sum(x * x, axis=-1) / r2
        out = np.zeros(s2.shape)
        inside = s2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
        return out

    return ScalarSymbol(
        func, n, bound=1.0, kind="builtin",
        params={"family": "bump", "n": n, "radius": float(radius)},
    )


def exp_of(F: ScalarSymbol, t: float) -> ScalarSymbol:
    """x -> exp(t F(x)). Bounded by exp(t sup Re F) when that is known."""
    t = float(t)
    f = F._func
    bound = None if F.re_bound is None else float(np.exp(t * F.re_bound))
    params = None if F.params is None else {"family": "exp", "t": t, "of": F.params}
    return ScalarSymbol(
        lambda x: np.exp(t * np.asarray(f(x), dtype=complex)), F.n, bound=bound,
        kind="exp", params=params, label=f"exp({t}*{F.label})",
    )
