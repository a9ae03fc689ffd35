"""Translation-invariant operators on periodic grids.

The box [-L/2, L/2)^n is sampled at x_j = -L/2 + j h, h = L/N, and the
frequency grid is xi_k = 2 pi k / L, k = -N/2 .. N/2 - 1. The discrete
transform pair is the quadrature of

    f^(xi) = (2 pi)^(-n/2) int e^{-i xi.x} f(x) dx,
    g^v(x) = (2 pi)^(-n/2) int e^{ i x.xi} g(xi) dxi,

with weights h^n and (2 pi / L)^n. Since (h * dxi * N / 2 pi)^n = 1 the
discrete pair inverts exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AtomOutOfBox, DimensionMismatch, NonFinite, UnboundedSymbol
from .symbols import MatrixSymbol, ScalarSymbol

__all__ = [
    "GridSpec",
    "GridField",
    "PositivityVerdict",
    "MultiplierNormReport",
    "dft_forward",
    "dft_inverse",
    "sample_symbol",
    "apply_multiplier",
    "positivity_trial",
    "convolve_atomic",
    "kernel_and_tv",
    "l2_norm_bound",
    "lp_vector_norm",
    "white_noise_field",
]

DEFAULT_POSITIVITY_TOL = 1e-8


@dataclass(frozen=True)
class GridSpec:
    n: int
    N: int
    L: float

    def __post_init__(self):
        if not 1 <= self.n <= 3:
            raise ValueError("only dimensions 1..3 are supported")
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if not self.L > 0:
            raise ValueError("L must be positive")
        object.__setattr__(self, "L", float(self.L))

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"n,N,L"``."""
        n, N, L = text.split(",")
        return cls(int(n), int(N), float(L))

    @property
    def h(self) -> float:
        return self.L / self.N

    @property
    def dxi(self) -> float:
        return 2 * np.pi / self.L

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.n

    @property
    def cell(self) -> float:
        """Volume element h^n."""
        return self.h ** self.n

    def axis(self) -> np.ndarray:
        return -self.L / 2 + self.h * np.arange(self.N)

    def freq_axis(self) -> np.ndarray:
        return self.dxi * np.arange(-self.N // 2, self.N // 2)

    def _mesh(self, ax: np.ndarray) -> np.ndarray:
        grids = np.meshgrid(*([ax] * self.n), indexing="ij")
        return np.stack(grids, axis=-1)

    def points(self) -> np.ndarray:
        return self._mesh(self.axis())

    def freq_points(self) -> np.ndarray:
        return self._mesh(self.freq_axis())

    def fft_freq_points(self) -> np.ndarray:
        """Frequency grid in numpy FFT ordering."""
        return self._mesh(self.dxi * self.N * np.fft.fftfreq(self.N))

    def to_dict(self) -> dict:
        return {"n": self.n, "N": self.N, "L": self.L}


@dataclass(frozen=True, eq=False)
class GridField:
    """m complex components sampled on a grid; ``data`` has shape (m, N, ..., N).

    ``domain`` records whether the samples live on the spatial grid or on the
    frequency grid (output of :func:`dft_forward`).
    """

    spec: GridSpec
    data: np.ndarray
    domain: str = "space"

    def __post_init__(self):
        data = np.array(self.data, dtype=complex)
        if data.ndim == self.spec.n:
            data = data[None]
        if data.shape[1:] != self.spec.shape:
            raise DimensionMismatch(f"field shape {data.shape} does not match grid {self.spec.shape}")
        if not np.all(np.isfinite(data)):
            raise NonFinite("grid field has non-finite entries")
        if self.domain not in ("space", "frequency"):
            raise ValueError(f"unknown domain {self.domain!r}")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @property
    def m(self) -> int:
        return self.data.shape[0]

    def sup_norm(self) -> float:
        return float(np.abs(self.data).max())

    def is_nonnegative(self, tol: float = 1e-12) -> bool:
        scale = max(self.sup_norm(), np.finfo(float).tiny)
        return bool(self.data.real.min() >= -tol * scale and np.abs(self.data.imag).max() <= tol * scale)

    def __add__(self, other: "GridField") -> "GridField":
        return GridField(self.spec, self.data + other.data, self.domain)

    def __mul__(self, c) -> "GridField":
        return GridField(self.spec, complex(c) * self.data, self.domain)

    __rmul__ = __mul__

    def roll(self, shift) -> "GridField":
        """Periodic lattice translation x -> f(x - shift * h)."""
        shift = np.broadcast_to(np.asarray(shift, dtype=int), (self.spec.n,))
        return GridField(self.spec, np.roll(self.data, tuple(shift), axis=tuple(range(1, self.spec.n + 1))), self.domain)


def _spatial_axes(spec: GridSpec) -> tuple[int, ...]:
    return tuple(range(1, spec.n + 1))


def _alternating(spec: GridSpec) -> np.ndarray:
    """(-1)^(k_1 + ... + k_n) over the centred frequency indices."""
    s = np.where(np.arange(-spec.N // 2, spec.N // 2) % 2 == 0, 1.0, -1.0)
    out = s
    for _ in range(spec.n - 1):
        out = np.multiply.outer(out, s)
    return out


def dft_forward(f: GridField) -> GridField:
    """Quadrature of the forward transform at the centred frequencies."""
    if f.domain != "space":
        raise ValueError("dft_forward expects a spatial field")
    spec = f.spec
    axes = _spatial_axes(spec)
    g = np.fft.fftshift(np.fft.fftn(f.data, axes=axes), axes=axes)
    g = g * _alternating(spec) * ((2 * np.pi) ** (-spec.n / 2) * spec.cell)
    return GridField(spec, g, "frequency")


def dft_inverse(g: GridField) -> GridField:
    if g.domain != "frequency":
        raise ValueError("dft_inverse expects a frequency-domain field")
    spec = g.spec
    axes = _spatial_axes(spec)
    f = np.fft.ifftn(np.fft.ifftshift(g.data * _alternating(spec), axes=axes), axes=axes)
    f = f * ((2 * np.pi) ** (-spec.n / 2) * (spec.dxi * spec.N) ** spec.n)
    return GridField(spec, f, "space")


def _as_matrix_symbol(G) -> MatrixSymbol:
    return MatrixSymbol.from_scalar(G) if isinstance(G, ScalarSymbol) else G


def sample_symbol(G, spec: GridSpec, order: str = "fft") -> np.ndarray:
    """G on the frequency grid, shape (N, ..., N, m, m); ``order`` is "fft" or "centred"."""
    G = _as_matrix_symbol(G)
    if G.n != spec.n:
        raise DimensionMismatch(f"symbol dimension {G.n} != grid dimension {spec.n}")
    xi = spec.fft_freq_points() if order == "fft" else spec.freq_points()
    return np.asarray(G(xi))


def apply_multiplier(G, f: GridField, samples: np.ndarray | None = None) -> GridField:
    """G(-i grad) f: componentwise inverse transform of sum_k G_jk(xi) f_k^(xi).

    The transform weights and the (-1)^k phase of the centred grid cancel
    between forward and inverse, so the product is formed directly in FFT
    ordering. ``samples`` may carry a precomputed :func:`sample_symbol`.
    """
    G = _as_matrix_symbol(G)
    if not G.bounded:
        raise UnboundedSymbol(f"symbol {G.label!r} has no sup bound; refusing to build a multiplier")
    if G.m != f.m:
        raise DimensionMismatch(f"symbol is {G.m}x{G.m} but field has {f.m} components")
    if f.domain != "space":
        raise ValueError("apply_multiplier expects a spatial field")
    spec = f.spec
    if samples is None:
        samples = sample_symbol(G, spec)
    axes = _spatial_axes(spec)
    fh = np.fft.fftn(f.data, axes=axes)
    gh = np.einsum("...jk,k...->j...", samples, fh)
    out = np.fft.ifftn(gh, axes=axes)
    if not np.all(np.isfinite(out)):
        raise NonFinite("multiplier output is not finite")
    return GridField(spec, out)


@dataclass(frozen=True)
class PositivityVerdict:
    """Outcome of a grid positivity trial; values are relative to ||out||_inf."""

    passed: bool
    min_relative: float
    max_imag_relative: float
    tolerance: float
    sup_norm: float
    witness: dict | None = None

    def __bool__(self):
        return self.passed


def positivity_trial(G, f: GridField, tol: float = DEFAULT_POSITIVITY_TOL, samples=None) -> PositivityVerdict:
    """Apply G(-i grad) to a nonnegative field and check the output stays nonnegative."""
    if not f.is_nonnegative(1e-12):
        raise ValueError("positivity_trial needs a nonnegative input field")
    out = apply_multiplier(G, f, samples)
    return positivity_of(out, tol)


def positivity_of(out: GridField, tol: float = DEFAULT_POSITIVITY_TOL) -> PositivityVerdict:
    scale = out.sup_norm()
    if scale == 0.0:
        return PositivityVerdict(True, 0.0, 0.0, tol, 0.0)
    re = out.data.real
    idx = np.unravel_index(int(np.argmin(re)), re.shape)
    min_rel = float(re[idx]) / scale
    im = np.abs(out.data.imag)
    jdx = np.unravel_index(int(np.argmax(im)), im.shape)
    im_rel = float(im[jdx]) / scale
    passed = min_rel >= -tol and im_rel <= tol
    witness = None
    if not passed:
        bad = idx if min_rel < -tol else jdx
        j, grid_idx = int(bad[0]), tuple(int(i) for i in bad[1:])
        x = out.spec.axis()[list(grid_idx)]
        witness = {
            "component": j,
            "index": list(grid_idx),
            "x": [float(v) for v in np.atleast_1d(x)],
            "value": [float(out.data[bad].real), float(out.data[bad].imag)],
            "relative": min_rel if min_rel < -tol else im_rel,
        }
    return PositivityVerdict(passed, min_rel, im_rel, tol, scale, witness)


def convolve_atomic(f: GridField, mu) -> GridField:
    """(f * mu)(x) = sum_j w_j f(x - xi_j) on the periodic grid.

    Matrix-weighted measures act on vector fields: out = sum_j W_j f(x - xi_j).
    Atoms off the lattice are handled by multilinear interpolation between the
    neighbouring lattice shifts.
    """
    spec = f.spec
    locs = np.asarray(mu.locations, dtype=float)
    if locs.shape[1] != spec.n:
        raise DimensionMismatch("measure and grid dimensions differ")
    if np.any(locs < -spec.L / 2) or np.any(locs >= spec.L / 2):
        raise AtomOutOfBox("atom locations must lie in [-L/2, L/2)")
    matrix = mu.is_matrix
    if matrix and mu.m != f.m:
        raise DimensionMismatch("matrix weights do not match field components")
    axes = _spatial_axes(spec)
    out = np.zeros(f.data.shape, dtype=complex)
    corners = np.array(np.meshgrid(*([[0, 1]] * spec.n), indexing="ij")).reshape(spec.n, -1).T
    for loc, w in zip(locs, mu.weights):
        s = loc / spec.h
        k = np.floor(s)
        theta = s - k
        snap = theta > 1 - 1e-9
        k[snap] += 1
        theta[snap | (theta < 1e-9)] = 0.0
        shifted = np.zeros(f.data.shape, dtype=complex)
        for c in corners:
            weight = np.prod(np.where(c == 1, theta, 1 - theta))
            if weight == 0.0:
                continue
            shifted += weight * np.roll(f.data, tuple((k + c).astype(int)), axis=axes)
        if matrix:
            out += np.einsum("jk,k...->j...", w, shifted)
        else:
            out += w * shifted
    return GridField(spec, out)


def kernel_and_tv(G: ScalarSymbol, spec: GridSpec) -> tuple[GridField, float]:
    """Convolution kernel G^v on the grid and its total variation h^n sum |G^v|.

    Under the transform convention G(-i grad) f = (2 pi)^(-n/2) f * G^v, so the
    L^1 operator norm is (2 pi)^(-n/2) times the returned total variation.
    """
    if not G.bounded:
        raise UnboundedSymbol(f"symbol {G.label!r} has no sup bound")
    if G.n != spec.n:
        raise DimensionMismatch("symbol and grid dimensions differ")
    g = GridField(spec, np.asarray(G(spec.freq_points()))[None], "frequency")
    kernel = dft_inverse(g)
    tv = spec.cell * float(np.abs(kernel.data).sum())
    return kernel, tv


def fejer_kernel(G: ScalarSymbol, spec: GridSpec) -> GridField:
    """Inverse transform of G times the triangular taper 1 - |k|/(N/2) per axis.

    The raw grid kernel of a symbol with off-lattice atoms carries Dirichlet
    ripples of both signs. With the taper each atom contributes a Fejer kernel,
    which is nonnegative, so for a positive semidefinite G the result is >= 0 at
    every grid point; a negative sample is evidence against G, not an artefact.
    """
    if G.n != spec.n:
        raise DimensionMismatch("symbol and grid dimensions differ")
    k = np.arange(-spec.N // 2, spec.N // 2)
    tri = 1.0 - np.abs(k) / (spec.N // 2)
    taper = tri
    for _ in range(spec.n - 1):
        taper = np.multiply.outer(taper, tri)
    g = GridField(spec, (np.asarray(G(spec.freq_points())) * taper)[None], "frequency")
    return dft_inverse(g)


@dataclass(frozen=True)
class MultiplierNormReport:
    """Norm witnesses for G(-i grad).

    ``tv_estimate`` is the largest kernel total variation over the entries,
    ``l1_operator_norm`` the corresponding entrywise L^1 operator norm
    (2 pi)^(-n/2) * tv_estimate, ``sup_symbol`` the max over the frequency grid
    of ||G(xi)||_2 and ``parseval_ratio`` the largest observed ||Gf||_2/||f||_2.
    """

    tv_estimate: float
    sup_symbol: float
    parseval_ratio: float
    l1_operator_norm: float

    def to_dict(self) -> dict:
        return {
            "tv_estimate": self.tv_estimate, "sup_symbol": self.sup_symbol,
            "parseval_ratio": self.parseval_ratio, "l1_operator_norm": self.l1_operator_norm,
        }


def white_noise_field(spec: GridSpec, m: int, rng: np.random.Generator) -> GridField:
    shape = (m,) + spec.shape
    return GridField(spec, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def _l2(f: GridField) -> float:
    return float(np.sqrt(spec_sum(f, np.abs(f.data) ** 2)))


def spec_sum(f: GridField, vals: np.ndarray) -> float:
    return f.spec.cell * float(vals.sum())


def l2_norm_bound(G, spec: GridSpec, seed: int = 0, n_fields: int = 50, fields=None) -> MultiplierNormReport:
    """Sup of the symbol's operator norm versus observed L^2 amplification.

    The ratio is taken over ``n_fields`` seeded complex white-noise fields,
    plus any extra ``fields`` supplied.
    """
    G = _as_matrix_symbol(G)
    samples = sample_symbol(G, spec)
    flat = samples.reshape(-1, G.m, G.m)
    sup = float(np.linalg.norm(flat, ord=2, axis=(-2, -1)).max())
    rng = np.random.default_rng(seed)
    trial = [white_noise_field(spec, G.m, rng) for _ in range(n_fields)] + list(fields or [])
    ratio = 0.0
    for f in trial:
        ratio = max(ratio, _l2(apply_multiplier(G, f, samples)) / _l2(f))
    tv = max(kernel_and_tv(G.entry(j, k), spec)[1] for j in range(G.m) for k in range(G.m))
    return MultiplierNormReport(tv, sup, ratio, (2 * np.pi) ** (-spec.n / 2) * tv)


def lp_vector_norm(f: GridField, p: float = 1.0) -> float:
    """sum_j ||f_j||_{L^p}, each component by the grid quadrature."""
    if not 1 <= p < np.inf:
        raise ValueError("p must lie in [1, inf)")
    axes = _spatial_axes(f.spec)
    per = (f.spec.cell * (np.abs(f.data) ** p).sum(axis=axes)) ** (1.0 / p)
    return float(per.sum())
