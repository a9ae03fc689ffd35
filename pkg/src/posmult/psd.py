"""Eigenvalue tests for (conditional) positive semidefiniteness.

Matrices are tested directly; functions are tested by sampling finite point
sets x_1..x_N and examining the Gram matrix (F(x_p - x_q))_{p,q}, or the
block Gram matrix for matrix-valued F.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NonFinite, NonHermitian
from .symbols import MatrixSymbol, ScalarSymbol, as_points

__all__ = [
    "DEFAULT_TOL",
    "DEFAULT_HSYM_TOL",
    "PsdVerdict",
    "SamplingPlan",
    "hermitian_min_eig",
    "is_hermitian",
    "is_psd",
    "is_cpsd",
    "gram",
    "block_gram",
    "test_psd_function",
    "test_cpsd_function",
    "hadamard",
]

DEFAULT_TOL = 1e-9
DEFAULT_HSYM_TOL = 1e-10


@dataclass(frozen=True)
class PsdVerdict:
    """Outcome of a PSD / CPSD test.

    ``kind`` is ``"ok"`` on success, otherwise the failure class: ``"eigenvalue"``
    (a negative eigenvalue beyond ``tolerance``), ``"symmetry"`` (F(-x) != F(x)^*
    or a non-Hermitian Gram) or ``"bound"`` (|F(x)| > |F(0)|). For eigenvalue
    verdicts ``passed == (min_eigenvalue >= -tolerance)``.
    """

    passed: bool
    min_eigenvalue: float
    tolerance: float
    kind: str = "ok"
    witness_points: np.ndarray | None = None
    witness_vector: np.ndarray | None = None
    value: float | None = None
    message: str = ""

    def __bool__(self):
        return self.passed

    def witness_dict(self) -> dict | None:
        if self.passed:
            return None
        w = {"kind": self.kind, "message": self.message}
        if self.witness_points is not None:
            w["points"] = np.asarray(self.witness_points, dtype=float).tolist()
        if self.witness_vector is not None:
            v = np.asarray(self.witness_vector, dtype=complex)
            w["vector"] = [[float(z.real), float(z.imag)] for z in v.ravel()]
        if self.value is not None:
            w["value"] = float(self.value)
        return w


@dataclass(frozen=True)
class SamplingPlan:
    """Seeded ensemble of random point sets standing in for "all finite point sets".

    Trial ``i`` draws from its own child ``SeedSequence``, so any trial can be
    regenerated in isolation and the ensemble does not depend on evaluation order.
    """

    trials: int = 50
    n_min: int = 2
    n_max: int = 12
    radius: float = 10.0
    seed: int = 0
    probes: int = 64

    def __post_init__(self):
        if self.trials < 1 or self.n_min < 1 or self.n_max < self.n_min or self.radius <= 0:
            raise ValueError(f"invalid sampling plan {self}")

    def _children(self):
        return np.random.SeedSequence(self.seed).spawn(self.trials + 1)

    def point_set(self, i: int, n: int) -> np.ndarray:
        rng = np.random.default_rng(self._children()[i + 1])
        N = int(rng.integers(self.n_min, self.n_max + 1))
        return rng.uniform(-self.radius, self.radius, size=(N, n))

    def point_sets(self, n: int) -> list[np.ndarray]:
        out = []
        for child in self._children()[1:]:
            rng = np.random.default_rng(child)
            N = int(rng.integers(self.n_min, self.n_max + 1))
            out.append(rng.uniform(-self.radius, self.radius, size=(N, n)))
        return out

    def probe_points(self, n: int) -> np.ndarray:
        """Points in [-2R, 2R]^n for the symmetry and boundedness prechecks."""
        rng = np.random.default_rng(self._children()[0])
        return rng.uniform(-2 * self.radius, 2 * self.radius, size=(self.probes, n))

    def to_dict(self) -> dict:
        return {
            "trials": self.trials, "n_min": self.n_min, "n_max": self.n_max,
            "radius": self.radius, "seed": self.seed, "probes": self.probes,
        }


def _as_square(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NonFinite("matrix has non-finite entries")
    return M


def _asymmetry(M: np.ndarray) -> tuple[float, float]:
    scale = float(np.abs(M).max()) if M.size else 0.0
    return float(np.abs(M - M.conj().T).max()) if M.size else 0.0, scale


def is_hermitian(M, hsym_tol: float = DEFAULT_HSYM_TOL) -> bool:
    M = _as_square(M)
    gap, scale = _asymmetry(M)
    return gap <= hsym_tol * scale


def hermitian_min_eig(M, hsym_tol: float = DEFAULT_HSYM_TOL) -> float:
    """Smallest eigenvalue of (M + M^*)/2; M must be Hermitian up to ``hsym_tol``."""
    M = _as_square(M)
    gap, scale = _asymmetry(M)
    if gap > hsym_tol * scale:
        raise NonHermitian(f"max |M - M*| = {gap:.3e} exceeds {hsym_tol:.1e} * {scale:.3e}")
    return float(np.linalg.eigvalsh(0.5 * (M + M.conj().T))[0])


def is_psd(M, tol: float = DEFAULT_TOL, hsym_tol: float = DEFAULT_HSYM_TOL) -> PsdVerdict:
    """Test M >= 0. The eigenvalue threshold is ``tol * max(1, spectral radius)``."""
    M = _as_square(M)
    gap, scale = _asymmetry(M)
    if gap > hsym_tol * scale:
        return PsdVerdict(
            False, float("nan"), tol, kind="symmetry", value=gap,
            message=f"not Hermitian: max |M - M*| = {gap:.3e}",
        )
    w, V = np.linalg.eigh(0.5 * (M + M.conj().T))
    thr = tol * max(1.0, float(np.abs(w).max()))
    lam = float(w[0])
    if lam >= -thr:
        return PsdVerdict(True, lam, thr)
    return PsdVerdict(
        False, lam, thr, kind="eigenvalue", witness_vector=V[:, 0], value=lam,
        message=f"eigenvalue {lam:.6e} below -{thr:.3e}",
    )


def is_cpsd(M, tol: float = DEFAULT_TOL, hsym_tol: float = DEFAULT_HSYM_TOL, block: int = 1) -> PsdVerdict:
    """Test (c, M c) >= 0 for all c whose block sums vanish.

    With ``block == 1`` this is the usual sum_j c_j = 0 constraint. With
    ``block == m`` the rows are grouped as N blocks of size m and the constraint
    is sum_p c_p = 0 in C^m (conditional positivity in the sense of Mlak).
    The test works with Q M Q, Q the orthogonal projector onto the constraint
    subspace; the ``block`` spurious null modes along range(I - Q) are
    identified by their overlap with that range and dropped.
    """
    M = _as_square(M)
    gap, scale = _asymmetry(M)
    if gap > hsym_tol * scale:
        raise NonHermitian(f"max |M - M*| = {gap:.3e} exceeds {hsym_tol:.1e} * {scale:.3e}")
    D = M.shape[0]
    if D % block:
        raise DimensionMismatch(f"size {D} is not a multiple of block {block}")
    N = D // block
    # Orthonormal basis of the complement: columns (1/sqrt N) 1_N (x) e_i.
    U = np.kron(np.ones((N, 1)), np.eye(block)) / np.sqrt(N)
    Q = np.eye(D) - U @ U.T
    H = 0.5 * (M + M.conj().T)
    w, V = np.linalg.eigh(Q @ H @ Q)
    overlap = np.linalg.norm(U.T @ V, axis=0) ** 2
    drop = np.argsort(-overlap, kind="stable")[:block]
    keep = np.setdiff1d(np.arange(D), drop)
    full = np.linalg.eigvalsh(H)
    thr = tol * max(1.0, float(np.abs(full).max()))
    if keep.size == 0:
        return PsdVerdict(True, 0.0, thr)
    i = keep[np.argmin(w[keep])]
    lam = float(w[i])
    if lam >= -thr:
        return PsdVerdict(True, lam, thr)
    c = Q @ V[:, i]
    c = c / np.linalg.norm(c)
    return PsdVerdict(
        False, lam, thr, kind="eigenvalue", witness_vector=c, value=lam,
        message=f"restricted eigenvalue {lam:.6e} below -{thr:.3e}",
    )


def _differences(pts: np.ndarray) -> np.ndarray:
    return pts[:, None, :] - pts[None, :, :]


def gram(F: ScalarSymbol, pts) -> np.ndarray:
    """N x N matrix with entries F(x_p - x_q)."""
    pts = as_points(pts, F.n)
    if pts.ndim != 2:
        raise DimensionMismatch("point set must have shape (N, n)")
    return np.array(F(_differences(pts)), dtype=complex)


def block_gram(F: MatrixSymbol | ScalarSymbol, pts) -> np.ndarray:
    """mN x mN block matrix whose (p, q) block is F(x_p - x_q)."""
    if isinstance(F, ScalarSymbol):
        return gram(F, pts)
    pts = as_points(pts, F.n)
    if pts.ndim != 2:
        raise DimensionMismatch("point set must have shape (N, n)")
    N, m = pts.shape[0], F.m
    B = F(_differences(pts))  # (N, N, m, m)
    return np.ascontiguousarray(B.transpose(0, 2, 1, 3)).reshape(N * m, N * m)


def _norms(F, vals: np.ndarray) -> np.ndarray:
    if isinstance(F, MatrixSymbol):
        return np.linalg.norm(vals, ord=2, axis=(-2, -1))
    return np.abs(vals)


def _adjoint(F, vals: np.ndarray) -> np.ndarray:
    if isinstance(F, MatrixSymbol):
        return np.conj(np.swapaxes(vals, -1, -2))
    return np.conj(vals)


def _symmetry_precheck(F, X: np.ndarray, sym_tol: float) -> PsdVerdict | None:
    """Check F(-x) = F(x)^* on the probe points."""
    fx = F(X)
    fmx = F(-X)
    gap = np.abs(fmx - _adjoint(F, fx))
    if gap.ndim > 1:
        gap = gap.reshape(gap.shape[0], -1).max(axis=1)
    scale = max(1.0, float(np.abs(fx).max()))
    i = int(np.argmax(gap))
    if gap[i] > sym_tol * scale:
        return PsdVerdict(
            False, float("nan"), sym_tol * scale, kind="symmetry", witness_points=X[i:i + 1],
            value=float(gap[i]), message=f"F(-x) != F(x)^*: gap {gap[i]:.3e} at x = {X[i].tolist()}",
        )
    return None


def _bound_precheck(F, X: np.ndarray, bound_tol: float) -> PsdVerdict | None:
    """Check |F(x)| <= |F(0)| (operator norm for matrix symbols)."""
    zero = np.zeros((1, F.n))
    f0 = float(_norms(F, F(zero))[0])
    nx = _norms(F, F(X))
    slack = bound_tol * max(1.0, f0)
    i = int(np.argmax(nx))
    if nx[i] > f0 + slack:
        return PsdVerdict(
            False, float("nan"), slack, kind="bound", witness_points=X[i:i + 1], value=float(nx[i] - f0),
            message=f"|F(x)| = {nx[i]:.6e} exceeds |F(0)| = {f0:.6e} at x = {X[i].tolist()}",
        )
    return None


def test_psd_function(
    F: ScalarSymbol | MatrixSymbol,
    plan: SamplingPlan | None = None,
    tol: float = DEFAULT_TOL,
    hsym_tol: float = DEFAULT_HSYM_TOL,
    sym_tol: float = 1e-12,
    bound_tol: float = 1e-12,
) -> PsdVerdict:
    """Sampled test that F is positive semidefinite (block sense for matrix F).

    Runs the necessary conditions F(-x) = F(x)^* and |F(x)| <= |F(0)| on probe
    points, then ``is_psd`` on the (block) Gram matrix of every point set in
    ``plan``. The first failure is returned with its witness; on success the
    verdict carries the smallest eigenvalue seen.
    """
    plan = plan or SamplingPlan()
    X = plan.probe_points(F.n)
    bad = _symmetry_precheck(F, X, sym_tol)
    if bad is None:
        bad = _bound_precheck(F, X, bound_tol)
    if bad is not None:
        return bad
    lam_min, thr_min = np.inf, np.inf
    for pts in plan.point_sets(F.n):
        v = is_psd(block_gram(F, pts), tol, hsym_tol)
        if not v.passed:
            return PsdVerdict(
                False, v.min_eigenvalue, v.tolerance, kind=v.kind, witness_points=pts,
                witness_vector=v.witness_vector, value=v.value, message=v.message,
            )
        if v.min_eigenvalue < lam_min:
            lam_min, thr_min = v.min_eigenvalue, v.tolerance
    return PsdVerdict(True, float(lam_min), float(thr_min))


def test_cpsd_function(
    F: ScalarSymbol | MatrixSymbol,
    plan: SamplingPlan | None = None,
    tol: float = DEFAULT_TOL,
    hsym_tol: float = DEFAULT_HSYM_TOL,
    sym_tol: float = 1e-12,
) -> PsdVerdict:
    """Sampled test that F is conditionally positive semidefinite.

    Matrix-valued F is tested in the block sense (coefficients c_p in C^m with
    sum_p c_p = 0).
    """
    plan = plan or SamplingPlan()
    bad = _symmetry_precheck(F, plan.probe_points(F.n), sym_tol)
    if bad is not None:
        return bad
    block = F.m if isinstance(F, MatrixSymbol) else 1
    lam_min, thr_min = np.inf, np.inf
    for pts in plan.point_sets(F.n):
        M = block_gram(F, pts)
        if not is_hermitian(M, hsym_tol):
            gap, _ = _asymmetry(M)
            return PsdVerdict(
                False, float("nan"), tol, kind="symmetry", witness_points=pts, value=gap,
                message=f"Gram matrix not Hermitian: gap {gap:.3e}",
            )
        v = is_cpsd(M, tol, hsym_tol, block=block)
        if not v.passed:
            return PsdVerdict(
                False, v.min_eigenvalue, v.tolerance, kind=v.kind, witness_points=pts,
                witness_vector=v.witness_vector, value=v.value, message=v.message,
            )
        if v.min_eigenvalue < lam_min:
            lam_min, thr_min = v.min_eigenvalue, v.tolerance
    return PsdVerdict(True, float(lam_min), float(thr_min))


def hadamard(A, B) -> np.ndarray:
    """Entrywise (Schur) product."""
    A = np.asarray(A)
    B = np.asarray(B)
    if A.shape != B.shape:
        raise DimensionMismatch(f"shapes {A.shape} and {B.shape} differ")
    return A * B


# keep pytest from collecting the two sampled testers when imported into tests
test_psd_function.__test__ = False
test_cpsd_function.__test__ = False
