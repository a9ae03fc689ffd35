"""Generators of (conditionally) positive semidefinite symbols.

Transforms follow f^(y) = (2 pi)^(-n/2) int e^{-i y.x} f(x) dx, so the
transform of a point mass w delta_xi is (2 pi)^(-n/2) w e^{-i y.xi}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

import numpy as np
from scipy import integrate, special

from .errors import (
    AtomAtOrigin,
    DimensionMismatch,
    NegativeWeight,
    NonPsdWeight,
    QuadratureFailure,
    UnderResolved,
)
from .expm import expm
from .psd import is_psd
from .symbols import MatrixSymbol, ScalarSymbol, _jsonable

__all__ = [
    "AtomicMeasure",
    "LKParams",
    "MollifierSpec",
    "Mollifier",
    "RadialProfile",
    "bochner_scalar",
    "bochner_matrix",
    "levy_khintchine",
    "lk_matrix",
    "hadamard_exp",
    "matrix_exp",
    "mollifier",
    "basis_test_field",
    "random_bump_field",
    "random_nonnegative_measure",
    "random_psd_measure",
    "random_lk_params",
    "example_f0",
    "exp_f0_closed_form",
]


def _complex_list(a) -> list:
    return [_jsonable(z) for z in np.asarray(a, dtype=complex).ravel()]


def _complex_from(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(float(v[0]), float(v[1]))
    return complex(v)


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Finite sum of point masses sum_j w_j delta_{xi_j}.

    ``locations`` has shape (J, n); ``weights`` has shape (J,) for a scalar
    measure or (J, m, m) for a matrix-valued one.
    """

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        locs = np.array(self.locations, dtype=float)
        if locs.ndim == 1:
            locs = locs[:, None]
        if locs.ndim != 2:
            raise DimensionMismatch("locations must have shape (J, n)")
        w = np.array(self.weights, dtype=complex)
        if w.ndim not in (1, 3) or w.shape[0] != locs.shape[0]:
            raise DimensionMismatch("weights must have shape (J,) or (J, m, m)")
        if w.ndim == 3 and w.shape[1] != w.shape[2]:
            raise DimensionMismatch("matrix weights must be square")
        if not (np.all(np.isfinite(locs)) and np.all(np.isfinite(w))):
            raise ValueError("measure has non-finite atoms")
        locs.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "weights", w)

    @classmethod
    def empty(cls, n: int, m: int | None = None) -> "AtomicMeasure":
        w = np.zeros((0,) if m is None else (0, m, m))
        return cls(np.zeros((0, n)), w)

    @property
    def n(self) -> int:
        return self.locations.shape[1]

    @property
    def size(self) -> int:
        return self.locations.shape[0]

    @property
    def is_matrix(self) -> bool:
        return self.weights.ndim == 3

    @property
    def m(self) -> int | None:
        return self.weights.shape[1] if self.is_matrix else None

    def total_variation(self) -> float:
        """sum_j |w_j|; operator norms of the weights for a matrix measure."""
        if self.is_matrix:
            if self.size == 0:
                return 0.0
            return float(np.linalg.norm(self.weights, ord=2, axis=(1, 2)).sum())
        return float(np.abs(self.weights).sum())

    def check_nonnegative(self, tol: float = 1e-12) -> None:
        """Raise unless weights are >= 0 (scalar) or PSD (matrix)."""
        if self.is_matrix:
            for j, W in enumerate(self.weights):
                if not is_psd(W, tol=tol):
                    raise NonPsdWeight(f"weight {j} is not positive semidefinite")
            return
        w = self.weights
        scale = max(1.0, float(np.abs(w).max())) if self.size else 1.0
        bad = np.nonzero((w.real < -tol * scale) | (np.abs(w.imag) > tol * scale))[0]
        if bad.size:
            raise NegativeWeight(f"weight {bad[0]} = {w[bad[0]]} is not a nonnegative real")

    def to_config(self) -> dict:
        out = {"n": self.n, "locations": self.locations.tolist()}
        if self.is_matrix:
            out["weights"] = [[[_jsonable(z) for z in row] for row in W] for W in self.weights]
        else:
            out["weights"] = _complex_list(self.weights)
        return out

    @classmethod
    def from_config(cls, d: dict) -> "AtomicMeasure":
        n = int(d["n"])
        locs = np.asarray(d.get("locations", []), dtype=float).reshape(-1, n)
        raw = d.get("weights", [])
        if raw and isinstance(raw[0], list) and raw[0] and isinstance(raw[0][0], list):
            w = np.array([[[_complex_from(z) for z in row] for row in W] for W in raw])
        else:
            w = np.array([_complex_from(z) for z in raw], dtype=complex)
        return cls(locs, w)


def _phases(x: np.ndarray, locs: np.ndarray) -> np.ndarray:
    return np.exp(-1j * (x @ locs.T))


def bochner_scalar(mu: AtomicMeasure) -> ScalarSymbol:
    """F(x) = (2 pi)^(-n/2) sum_j w_j e^{-i x.xi_j} for a nonnegative scalar measure."""
    if mu.is_matrix:
        raise DimensionMismatch("bochner_scalar needs a scalar measure")
    mu.check_nonnegative()
    n = mu.n
    c = (2 * np.pi) ** (-n / 2)
    locs, w = mu.locations, mu.weights.real.copy()
    f0 = c * float(w.sum())
    return ScalarSymbol(
        lambda x: c * (_phases(x, locs) @ w), n, bound=f0,
        kind="bochner", params={"family": "bochner", "measure": mu.to_config()},
    )


def bochner_matrix(mu: AtomicMeasure) -> MatrixSymbol:
    """F(x) = (2 pi)^(-n/2) sum_j e^{-i x.xi_j} W_j for PSD matrix weights."""
    if not mu.is_matrix:
        raise DimensionMismatch("bochner_matrix needs matrix weights")
    mu.check_nonnegative(tol=1e-12)
    n, m = mu.n, mu.m
    c = (2 * np.pi) ** (-n / 2)
    locs, W = mu.locations, mu.weights
    bound = c * float(np.linalg.norm(W.sum(axis=0), ord=2)) if mu.size else 0.0
    entry = c * np.abs(W).sum(axis=0) if mu.size else np.zeros((m, m))
    return MatrixSymbol(
        lambda x: c * np.einsum("...j,jab->...ab", _phases(x, locs), W), n, m,
        bound=bound, lognorm_bound=bound, entry_re_bounds=entry,
        kind="bochner", params={"family": "bochner-matrix", "measure": mu.to_config()},
    )


@dataclass(frozen=True, eq=False)
class LKParams:
    """Levy-Khintchine data (alpha, beta, A, nu) on R^n."""

    alpha: float
    beta: np.ndarray
    A: np.ndarray
    nu: AtomicMeasure

    def __post_init__(self):
        beta = np.atleast_1d(np.array(self.beta, dtype=float))
        n = beta.size
        A = np.array(self.A, dtype=complex).reshape(n, n) if np.size(self.A) == n * n else None
        if A is None:
            raise DimensionMismatch(f"A must be {n}x{n}")
        if self.nu.is_matrix or self.nu.n != n:
            raise DimensionMismatch("nu must be a scalar measure on R^n")
        if not (np.isfinite(self.alpha) and np.all(np.isfinite(beta)) and np.all(np.isfinite(A))):
            raise ValueError("LK parameters must be finite")
        if not is_psd(A, tol=1e-12):
            raise NonPsdWeight("A must be Hermitian positive semidefinite")
        self.nu.check_nonnegative()
        if self.nu.size and np.linalg.norm(self.nu.locations, axis=1).min() <= 1e-14:
            raise AtomAtOrigin("the Levy measure may not charge the origin")
        beta.setflags(write=False)
        A.setflags(write=False)
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "A", A)

    @property
    def n(self) -> int:
        return self.beta.size

    @classmethod
    def zero(cls, n: int = 1) -> "LKParams":
        return cls(0.0, np.zeros(n), np.zeros((n, n)), AtomicMeasure.empty(n))

    def to_config(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta.tolist(),
            "A": [[_jsonable(z) for z in row] for row in self.A],
            "nu": self.nu.to_config(),
        }

    @classmethod
    def from_config(cls, d: dict) -> "LKParams":
        beta = np.atleast_1d(np.asarray(d.get("beta", [0.0]), dtype=float))
        n = beta.size
        A = np.array([[_complex_from(z) for z in row] for row in d.get("A", np.zeros((n, n)).tolist())])
        nu = AtomicMeasure.from_config(d["nu"]) if "nu" in d else AtomicMeasure.empty(n)
        return cls(float(d.get("alpha", 0.0)), beta, A, nu)


def levy_khintchine(p: LKParams) -> ScalarSymbol:
    """F(x) = alpha + i beta.x - x.Ax + sum_j w_j k(x, y_j) with the compensated kernel

        k(x, y) = [e^{i x.y} - 1 - i x.y / (1 + |y|^2)] (1 + |y|^2) / |y|^2.

    Re F <= alpha everywhere.
    """
    alpha, beta, A = p.alpha, p.beta, p.A
    y = p.nu.locations
    w = p.nu.weights.real.copy()
    y2 = np.sum(y * y, axis=1)
    scale = w * (1 + y2) / np.where(y2 > 0, y2, 1.0)
    comp = 1.0 / (1 + y2)

    def func(x):
        xa = np.einsum("...i,ij,...j->...", x, A, x).real
        out = alpha + 1j * (x @ beta) - xa
        if y.shape[0]:
            xy = x @ y.T
            out = out + (np.exp(1j * xy) - 1 - 1j * xy * comp) @ scale
        return out

    trivial = p.nu.size == 0 and not np.any(beta) and not np.any(A)
    return ScalarSymbol(
        func, p.n, bound=abs(alpha) if trivial else None, re_bound=alpha,
        kind="levy-khintchine", params={"family": "levy-khintchine", **p.to_config()},
    )


def lk_matrix(entries: Sequence[Sequence[LKParams]]) -> MatrixSymbol:
    """Entrywise Levy-Khintchine matrix symbol."""
    syms = [[levy_khintchine(p) for p in row] for row in entries]
    params = {"family": "lk-matrix", "entries": [[p.to_config() for p in row] for row in entries]}
    return MatrixSymbol.from_entries(syms, kind="levy-khintchine", params=params)


def hadamard_exp(F: MatrixSymbol, t: float) -> MatrixSymbol:
    """x -> [exp(t F_jk(x))]_jk. Bounded when every Re F_jk has a known upper bound."""
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    f = F._func
    c = F.entry_re_bounds
    bound = None
    entry_bounds = np.full(c.shape, np.nan)
    if not np.isnan(c).any():
        entry_bounds = np.exp(t * c)
        bound = float(np.sqrt((entry_bounds ** 2).sum()))
    params = None if F.params is None else {"family": "hadamard-exp", "t": t, "of": F.params}
    return MatrixSymbol(
        lambda x: np.exp(t * np.asarray(f(x), dtype=complex)), F.n, F.m,
        bound=bound, lognorm_bound=bound, entry_re_bounds=entry_bounds,
        kind="hadamard-exp", params=params, label=f"exp_H({t}*{F.label})",
    )


def matrix_exp(F: MatrixSymbol, t: float) -> MatrixSymbol:
    """x -> exp(t F(x)), the genuine matrix exponential at every point.

    ||exp(tF(x))|| <= exp(t * lognorm_bound), which becomes the sup bound.
    """
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    f = F._func
    bound = None if F.lognorm_bound is None else float(np.exp(t * F.lognorm_bound))
    params = None if F.params is None else {"family": "matrix-exp", "t": t, "of": F.params}
    return MatrixSymbol(
        lambda x: expm(t * np.asarray(f(x), dtype=complex)), F.n, F.m,
        bound=bound, lognorm_bound=bound,
        kind="matrix-exp", params=params, label=f"exp({t}*{F.label})",
    )


# --------------------------------------------------------------- mollifiers

_SPHERE = {1: 2.0, 2: 2 * np.pi, 3: 4 * np.pi}
_NORMALIZATIONS = ("unit-integral", "unit-transform-limit")


def _psi(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def _smooth_step(s):
    """C^infinity step equal to 1 for s <= 0, 0 for s >= 1, decreasing between."""
    s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
    a, b = _psi(1.0 - s), _psi(s)
    return a / (a + b)


class RadialProfile:
    """Unit-mass radial profile phi(r) on R^n, constant on [0, plateau] and zero for r >= 1.

    Between the plateau and r = 1 it falls through a C^infinity smooth step,
    so phi is C^infinity, nonincreasing in r and all its derivatives vanish at 0.
    Its transform Phi(k) = int phi(x) e^{-i k.x} dx (radial, Phi(0) = 1) is
    evaluated from Gauss-Legendre panels fixed at construction.
    """

    # Panel counts tabulated at construction; a query uses the coarsest level
    # whose panels span at most KW_MAX radians of the largest requested k.
    LEVELS = (16, 32, 64, 128, 256)
    ORDER = 16
    KW_MAX = 6.0

    def __init__(self, n: int, plateau: float):
        if n not in _SPHERE:
            raise ValueError("only dimensions 1..3 are supported")
        if not 0 < plateau < 1:
            raise ValueError("plateau must lie in (0, 1)")
        self.n = n
        self.plateau = float(plateau)
        p = self.plateau
        shoulder, err = integrate.quad(
            lambda r: float(_smooth_step((r - p) / (1 - p))) * r ** (n - 1), p, 1.0,
            epsabs=1e-14, epsrel=1e-13, limit=200,
        )
        if not np.isfinite(shoulder) or err > 1e-11:
            raise QuadratureFailure(f"normalization quadrature error {err:.2e}")
        self.c = 1.0 / (_SPHERE[n] * (p ** n / n + shoulder))
        self._rules = [self._rule(panels) for panels in self.LEVELS]

    def _rule(self, panels: int) -> tuple[float, np.ndarray, np.ndarray]:
        p = self.plateau
        x, w = np.polynomial.legendre.leggauss(self.ORDER)
        inner = max(1, round(p * panels))
        edges = np.concatenate([
            np.linspace(0.0, p, inner + 1)[:-1],
            np.linspace(p, 1.0, panels - inner + 1),
        ])
        a, b = edges[:-1, None], edges[1:, None]
        r = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
        wr = (0.5 * (b - a) * w).ravel()
        weights = _SPHERE[self.n] * wr * self(r) * r ** (self.n - 1)
        r.setflags(write=False)
        weights.setflags(write=False)
        return float(np.diff(edges).max()), r, weights

    def __call__(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return self.c * _smooth_step((r - self.plateau) / (1 - self.plateau))

    def _kernel(self, kr: np.ndarray) -> np.ndarray:
        if self.n == 1:
            return np.cos(kr)
        if self.n == 2:
            return special.j0(kr)
        return np.sinc(kr / np.pi)

    def transform(self, k) -> np.ndarray:
        """Phi(|k|) for an array of radii k."""
        k = np.abs(np.asarray(k, dtype=float))
        flat = k.ravel()
        out = np.empty(flat.shape)
        if flat.size == 0:
            return out.reshape(k.shape)
        kmax = float(flat.max())
        width, nodes, weights = self._rules[-1]
        for rule in self._rules:
            if rule[0] * kmax <= self.KW_MAX:
                width, nodes, weights = rule
                break
        step = max(1, 2 ** 22 // nodes.size)
        for s in range(0, flat.size, step):
            kr = np.multiply.outer(flat[s:s + step], nodes)
            out[s:s + step] = self._kernel(kr) @ weights
        return out.reshape(k.shape)


@lru_cache(maxsize=32)
def _profile(n: int, plateau: float) -> RadialProfile:
    return RadialProfile(n, plateau)


@dataclass(frozen=True)
class MollifierSpec:
    n: int = 1
    eps: float = 1.0
    plateau: float = 0.25
    normalization: str = "unit-integral"

    def __post_init__(self):
        if self.n not in _SPHERE:
            raise ValueError("only dimensions 1..3 are supported")
        if not 0 < self.eps <= 1:
            raise ValueError("eps must lie in (0, 1]")
        if not 0 < self.plateau < 1:
            raise ValueError("plateau must lie in (0, 1)")
        if self.normalization not in _NORMALIZATIONS:
            raise ValueError(f"normalization must be one of {_NORMALIZATIONS}")

    def to_config(self) -> dict:
        return {"n": self.n, "eps": self.eps, "plateau": self.plateau, "normalization": self.normalization}


class Mollifier(NamedTuple):
    """phi_eps, its transform and the small-eps limit of that transform."""

    phi: ScalarSymbol
    phi_hat: ScalarSymbol
    limit: float


def mollifier(spec: MollifierSpec) -> Mollifier:
    """phi_eps(x) = eps^-n phi(|x|/eps) and its transform phi(eps |xi|)^.

    With "unit-integral" phi_eps has mass 1 and its transform tends to
    (2 pi)^(-n/2) as eps -> 0. "unit-transform-limit" multiplies phi by
    (2 pi)^(n/2) so that the limit is 1.
    """
    prof = _profile(spec.n, spec.plateau)
    n, eps = spec.n, float(spec.eps)
    scale = 1.0 if spec.normalization == "unit-integral" else (2 * np.pi) ** (n / 2)
    limit = scale * (2 * np.pi) ** (-n / 2)
    amp = scale * eps ** (-n)

    def phi(x):
        return amp * prof(np.sqrt(np.sum(x * x, axis=-1)) / eps)

    def phi_hat(xi):
        return limit * prof.transform(eps * np.sqrt(np.sum(xi * xi, axis=-1)))

    cfg = spec.to_config()
    return Mollifier(
        ScalarSymbol(phi, n, bound=amp * prof.c, kind="builtin", params={"family": "mollifier", **cfg}),
        ScalarSymbol(phi_hat, n, bound=limit, kind="builtin", params={"family": "mollifier-hat", **cfg}),
        limit,
    )


MIN_SAMPLES_ACROSS = 8


def basis_test_field(eps: float, k: int, m: int, grid, plateau: float = 0.25,
                     normalization: str = "unit-integral"):
    """m-component field with phi_eps in slot k (1-based) and zeros elsewhere."""
    from .engine import GridField

    if not 1 <= k <= m:
        raise ValueError(f"k must lie in 1..{m}")
    if 2 * eps / grid.h < MIN_SAMPLES_ACROSS:
        raise UnderResolved(
            f"eps = {eps} spans {2 * eps / grid.h:.2f} samples; need {MIN_SAMPLES_ACROSS} (h = {grid.h})"
        )
    phi = mollifier(MollifierSpec(grid.n, eps, plateau, normalization)).phi
    data = np.zeros((m,) + grid.shape)
    data[k - 1] = phi(grid.points()).real
    return GridField(grid, data)


def random_bump_field(grid, m: int, rng: np.random.Generator, bumps=(1, 5),
                      radius: tuple[float, float] | None = None, plateau: float = 0.1):
    """Nonnegative field: each component is a mixture of 1..5 positively weighted bumps.

    Bump radii default to 7.5%..10% of the box so that their spectra have
    decayed to round-off level at the grid's Nyquist frequency.
    """
    from .engine import GridField

    lo, hi = radius if radius is not None else (0.075 * grid.L, 0.1 * grid.L)
    prof = _profile(grid.n, plateau)
    X = grid.points()
    data = np.zeros((m,) + grid.shape)
    for j in range(m):
        for _ in range(int(rng.integers(bumps[0], bumps[1] + 1))):
            centre = rng.uniform(-grid.L / 4, grid.L / 4, size=grid.n)
            r = rng.uniform(lo, hi)
            w = rng.uniform(0.1, 1.0)
            d = np.sqrt(np.sum((X - centre) ** 2, axis=-1)) / r
            data[j] += w * r ** (-grid.n) * prof(d)
    return GridField(grid, data)


def random_nonnegative_measure(rng: np.random.Generator, n: int, atoms=(1, 5), radius: float = 3.0,
                               lattice: float | None = None) -> AtomicMeasure:
    """Scalar measure with positive weights; ``lattice`` snaps atoms to multiples of it."""
    J = int(rng.integers(atoms[0], atoms[1] + 1))
    locs = rng.uniform(-radius, radius, size=(J, n))
    if lattice is not None:
        locs = np.round(locs / lattice) * lattice
    return AtomicMeasure(locs, rng.uniform(0.05, 1.0, size=J))


def random_psd_measure(rng: np.random.Generator, n: int, m: int, atoms=(1, 5), radius: float = 3.0,
                       lattice: float | None = None, entrywise_nonnegative: bool = False) -> AtomicMeasure:
    """Matrix measure with PSD weights W = C C^*.

    With ``entrywise_nonnegative`` C has nonnegative real entries, so W is both
    PSD and entrywise >= 0; otherwise C is complex Gaussian.
    """
    J = int(rng.integers(atoms[0], atoms[1] + 1))
    locs = rng.uniform(-radius, radius, size=(J, n))
    if lattice is not None:
        locs = np.round(locs / lattice) * lattice
    if entrywise_nonnegative:
        C = rng.uniform(0.0, 1.0, size=(J, m, m))
    else:
        C = rng.standard_normal((J, m, m)) + 1j * rng.standard_normal((J, m, m))
    W = C @ np.conj(np.swapaxes(C, 1, 2)) / m
    return AtomicMeasure(locs, W)


def random_lk_params(rng: np.random.Generator, n: int = 1, max_atoms: int = 3) -> LKParams:
    """alpha in [-1, 1], beta ~ N(0, 1), A = B B^T / n + 0.1 I and 0..max_atoms Levy atoms with |y| >= 0.1."""
    alpha = rng.uniform(-1.0, 1.0)
    beta = rng.standard_normal(n)
    B = rng.standard_normal((n, n))
    A = B @ B.T / n + 0.1 * np.eye(n)
    J = int(rng.integers(0, max_atoms + 1))
    y = rng.uniform(-2.0, 2.0, size=(J, n))
    short = np.linalg.norm(y, axis=1) < 0.1
    y[short] = 0.1 * np.sign(y[short] + 1e-300) + y[short]
    nu = AtomicMeasure(y, rng.uniform(0.05, 1.0, size=J))
    return LKParams(alpha, beta, A, nu)


# ------------------------------------------------------------ 2 x 2 family


def example_f0(a: ScalarSymbol, b: float) -> MatrixSymbol:
    """F0(x) = [[a(x), b], [b, a(x)]] for a real function a and b >= 0."""
    b = float(b)
    if b < 0:
        raise ValueError("b must be nonnegative")
    f = a._func

    def func(x):
        ax = np.asarray(f(x), dtype=complex)
        out = np.empty(ax.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = out[..., 1, 1] = ax
        out[..., 0, 1] = out[..., 1, 0] = b
        return out

    ra = np.nan if a.re_bound is None else a.re_bound
    return MatrixSymbol(
        func, a.n, 2,
        bound=None if a.bound is None else a.bound + b,
        lognorm_bound=None if a.re_bound is None else a.re_bound + b,
        entry_re_bounds=[[ra, b], [b, ra]],
        kind="example-f0", label=f"F0[{a.label}, b={b}]",
        params=None if a.params is None else {"family": "example-f0", "a": a.params, "b": b},
    )


def exp_f0_closed_form(a: ScalarSymbol, b: float, t: float) -> MatrixSymbol:
    """exp(t F0(x)) = e^{t a(x)} [[cosh tb, sinh tb], [sinh tb, cosh tb]]."""
    b, t = float(b), float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    ch, sh = math.cosh(t * b), math.sinh(t * b)
    K = np.array([[ch, sh], [sh, ch]], dtype=complex)
    f = a._func
    bound = None if a.re_bound is None else float(np.exp(t * (a.re_bound + abs(b))))
    return MatrixSymbol(
        lambda x: np.exp(t * np.asarray(f(x), dtype=complex))[..., None, None] * K, a.n, 2,
        bound=bound, lognorm_bound=bound, kind="closed-form", label=f"expF0[{a.label}, b={b}, t={t}]",
        params=None if a.params is None else {"family": "exp-f0", "a": a.params, "b": b, "t": t},
    )
