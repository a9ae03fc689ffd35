"""Scenario runner: composes the PSD tests, generators and grid operators into
end-to-end verifications and records every check in a JSON report.

A scenario config looks like

    {"version": 1, "scenario": "example-2-6", "seed": 7,
     "params": {"a": "neg-quadratic", "b": 1.0, "t": [0.1, 1, 10]},
     "tolerances": {"positivity": 1e-8}}

Pass/fail verdicts are property-test verdicts: they hold for the sampled
point sets, fields and grids, not for all of R^n.
"""

from __future__ import annotations

import csv
import json
import math
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import symbols as sym
from ._version import __version__
from .config import grid_from_config, lk_from_config, measure_from_config, symbol_from_config
from .engine import (
    GridField,
    GridSpec,
    apply_multiplier,
    convolve_atomic,
    dft_forward,
    dft_inverse,
    fejer_kernel,
    kernel_and_tv,
    l2_norm_bound,
    lp_vector_norm,
    positivity_of,
    sample_symbol,
    white_noise_field,
)
from .errors import ConfigInvalid, NonFinite, UnboundedSymbol, UnderResolved
from .expm import expm_series
from .psd import (
    SamplingPlan,
    hadamard,
    hermitian_min_eig,
    test_cpsd_function,
    test_psd_function,
)
from .symbols import MatrixSymbol, ScalarSymbol
from .synth import (
    LKParams,
    MollifierSpec,
    basis_test_field,
    bochner_matrix,
    bochner_scalar,
    example_f0,
    exp_f0_closed_form,
    hadamard_exp,
    levy_khintchine,
    lk_matrix,
    matrix_exp,
    mollifier,
    random_bump_field,
    random_lk_params,
    random_nonnegative_measure,
    random_psd_measure,
)

REPORT_VERSION = 1

KINDS = (
    "theorem-2-2",
    "corollary-2-3",
    "corollary-2-4",
    "corollary-2-5",
    "example-2-6",
    "bochner-suite",
    "lk-suite",
    "schur-suite",
    "norm-suite",
    "falsify",
)

DEFAULT_TOLERANCES = {
    "psd": 1e-9,
    "hsym": 1e-10,
    "symmetry": 1e-12,
    "bound": 1e-12,
    "positivity": 1e-8,
    "falsify": 1e-3,
    "falsify_gram": 1e-6,
    "oracle": 1e-8,
    "closed_form": 1e-12,
    "series": 1e-10,
    "schur": 1e-10,
    "roundtrip": 1e-12,
    "gaussian_tv": 1e-4,
    "cos_tv": 1e-6,
    "delta_tv": 1e-10,
    "parseval": 1e-8,
    "quadratic_form": 1e-10,
}

DEFAULT_GRID = GridSpec(1, 1024, 40.0)
# Fine grid for the mollifier probe: h = 1/1024 resolves every dyadic eps down to 2^-6.
PROBE_GRID = GridSpec(1, 16384, 16.0)
DYADIC_EPS = tuple(2.0 ** -k for k in range(1, 7))
PROBE_PLATEAU = 0.25


# ----------------------------------------------------------------- records


def _clean(obj):
    """Plain-JSON view: numpy scalars to Python, NaN to null, infinities to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


@dataclass
class Check:
    name: str
    passed: bool
    value: float | None
    tol: float | None
    witness: dict | None = None
    detail: dict | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "passed": bool(self.passed), "value": self.value, "tol": self.tol,
             "witness": self.witness}
        if self.detail is not None:
            d["detail"] = self.detail
        return _clean(d)


@dataclass
class Report:
    scenario: dict
    checks: list[Check]
    seed: int
    grid: dict | None
    tolerances: dict
    elapsed_ms: float = 0.0
    trial_rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "version": REPORT_VERSION,
            "tool": {"name": "posmult", "version": __version__},
            "scenario": self.scenario,
            "passed": self.passed,
            "checks": [c.to_dict() for c in sorted(self.checks, key=lambda c: c.name)],
            "seed": self.seed,
            "grid": self.grid,
            "tolerances": self.tolerances,
            "semantics": "property test: verdicts hold on the sampled point sets, fields and grid",
        }
        if timing:
            d["elapsed_ms"] = self.elapsed_ms
        return _clean(d)

    def payload(self) -> bytes:
        """Canonical bytes of the report without the timing field."""
        return json.dumps(self.to_dict(timing=False), sort_keys=True).encode()

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")

    def write_csv(self, path) -> None:
        """Per-trial minima: one row per (check, trial)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["check", "trial", "value"])
            for name, trial, value in sorted(self.trial_rows, key=lambda r: (r[0], r[1])):
                w.writerow([name, trial, repr(float(value))])


report_write = Report.write


@dataclass(frozen=True)
class Scenario:
    kind: str
    params: dict
    seed: int
    tolerances: dict

    @classmethod
    def from_config(cls, cfg: dict, seed: int | None = None, tol: float | None = None) -> "Scenario":
        kind = cfg.get("scenario", cfg.get("kind"))
        if kind not in KINDS:
            raise ConfigInvalid(f"unknown scenario {kind!r}; expected one of {list(KINDS)}")
        if seed is None:
            if "seed" not in cfg:
                raise ConfigInvalid("scenario config needs a 'seed'")
            seed = cfg["seed"]
        if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
            raise ConfigInvalid(f"seed must be a nonnegative integer, got {seed!r}")
        params = cfg.get("params", {})
        if not isinstance(params, dict):
            raise ConfigInvalid("'params' must be an object")
        tols = dict(DEFAULT_TOLERANCES)
        extra = cfg.get("tolerances", {})
        unknown = set(extra) - set(tols)
        if unknown:
            raise ConfigInvalid(f"unknown tolerance keys {sorted(unknown)}")
        tols.update({k: float(v) for k, v in extra.items()})
        if tol is not None:
            tols["psd"] = tols["positivity"] = float(tol)
        return cls(kind, params, int(seed), tols)

    def to_dict(self) -> dict:
        return _clean({"kind": self.kind, "params": self.params, "seed": self.seed})


# ----------------------------------------------------------------- context


def _key(part) -> int:
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    return int(part)


def stream(seed: int, *parts) -> np.random.Generator:
    """Independent generator for (seed, parts); parts may be strings or ints."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(_key(p) for p in parts)))


def trial_field(seed: int, key: str, trial: int, grid: GridSpec, m: int) -> GridField:
    """Regenerate the nonnegative test field used by a positivity ensemble."""
    return random_bump_field(grid, m, stream(seed, key, trial))


class _Ctx:
    def __init__(self, sc: Scenario):
        p = sc.params
        self.seed = sc.seed
        self.tol = sc.tolerances
        self.grid = grid_from_config(p["grid"]) if "grid" in p else DEFAULT_GRID
        self.probe_grid = grid_from_config(p["probe_grid"]) if "probe_grid" in p else PROBE_GRID
        plan = dict(p.get("plan", {}))
        plan.setdefault("seed", sc.seed)
        try:
            self.plan = SamplingPlan(**plan)
        except (TypeError, ValueError) as exc:
            raise ConfigInvalid(f"invalid sampling plan: {exc}") from exc
        self.rows: list = []
        self.grid_used: GridSpec | None = None

    def psd(self, F, cpsd: bool = False):
        if cpsd:
            return test_cpsd_function(F, self.plan, self.tol["psd"], self.tol["hsym"], self.tol["symmetry"])
        return test_psd_function(F, self.plan, self.tol["psd"], self.tol["hsym"], self.tol["symmetry"], self.tol["bound"])


def _tlist(p: dict, default=(0.1, 1.0, 10.0)) -> list[float]:
    ts = p.get("t", list(default))
    if isinstance(ts, (int, float)):
        ts = [ts]
    ts = [float(t) for t in ts]
    if not ts or any(not t > 0 for t in ts):
        raise ConfigInvalid("t values must be positive")
    return ts


def _tname(t: float) -> str:
    return f"t={t:g}"


def _as_matrix(G) -> MatrixSymbol:
    return MatrixSymbol.from_scalar(G) if isinstance(G, ScalarSymbol) else G


def _verdict_value(v) -> float | None:
    return v.min_eigenvalue if np.isfinite(v.min_eigenvalue) else v.value


def _error_check(name: str, tol, exc: Exception) -> Check:
    return Check(name, False, None, tol, {"kind": "error", "error": type(exc).__name__, "message": str(exc)})


def _guarded(name: str, tol, fn: Callable[[], Check]) -> Check:
    """Run a check; overflow or a missing sup bound is a failed check, not a crash."""
    try:
        return fn()
    except (NonFinite, UnboundedSymbol) as exc:
        return _error_check(name, tol, exc)


def _psd_check(ctx: _Ctx, name: str, F, cpsd: bool = False) -> Check:
    def run():
        v = ctx.psd(F, cpsd)
        return Check(name, v.passed, _verdict_value(v), v.tolerance, v.witness_dict())
    return _guarded(name, ctx.tol["psd"], run)


def _entry_psd_check(ctx: _Ctx, name: str, G, cpsd: bool = False) -> Check:
    """Every entry of G passes the (C)PSD test; the first failing entry is the witness."""
    def run():
        M = _as_matrix(G)
        worst, thr = np.inf, ctx.tol["psd"]
        for j in range(M.m):
            for k in range(M.m):
                v = ctx.psd(M.entry(j, k), cpsd)
                if not v.passed:
                    w = v.witness_dict()
                    w["entry"] = [j, k]
                    return Check(name, False, _verdict_value(v), v.tolerance, w)
                if v.min_eigenvalue < worst:
                    worst, thr = v.min_eigenvalue, v.tolerance
        return Check(name, True, worst, thr)
    return _guarded(name, ctx.tol["psd"], run)


def _positivity_checks(ctx: _Ctx, name: str, G, count: int, measure=None) -> list[Check]:
    """Apply G(-i grad) to ``count`` seeded nonnegative fields.

    With ``measure`` the outputs are also compared against the atomic
    convolution (2 pi)^(-n/2) f * mu.
    """
    grid = ctx.grid
    ctx.grid_used = grid
    tol = ctx.tol["positivity"]
    G = _as_matrix(G)
    try:
        if not G.bounded:
            raise UnboundedSymbol(f"symbol {G.label!r} has no sup bound")
        samples = sample_symbol(G, grid)
    except (NonFinite, UnboundedSymbol) as exc:
        out = [_error_check(f"{name}positivity", tol, exc)]
        if measure is not None:
            out.append(_error_check(f"{name}oracle", ctx.tol["oracle"], exc))
        return out
    worst, wit, ok = np.inf, None, True
    err_max = 0.0
    c = (2 * np.pi) ** (-grid.n / 2)
    key = f"{name}fields"
    for i in range(count):
        f = trial_field(ctx.seed, key, i, grid, G.m)
        try:
            out = apply_multiplier(G, f, samples)
        except NonFinite as exc:
            return [_error_check(f"{name}positivity", tol, exc)]
        v = positivity_of(out, tol)
        ctx.rows.append((f"{name}positivity", i, v.min_relative))
        if not v.passed and ok:
            ok = False
            wit = dict(v.witness, trial=i, stream=[ctx.seed, key, i], grid=grid.to_dict())
        worst = min(worst, v.min_relative)
        if measure is not None:
            ref = c * convolve_atomic(f, measure).data
            err_max = max(err_max, float(np.abs(out.data - ref).max()) / max(out.sup_norm(), 1e-300))
    checks = [Check(f"{name}positivity", ok, worst, tol, wit, {"fields": count})]
    if measure is not None:
        checks.append(Check(f"{name}oracle", err_max <= ctx.tol["oracle"], err_max, ctx.tol["oracle"]))
    return checks


def _probe_checks(ctx: _Ctx, name: str, G, eps_list) -> list[Check]:
    """Mollifier probe: G(-i grad) on phi_eps in slot k, and Gram tests of G_jk phi_eps^."""
    G = _as_matrix(G)
    grid = ctx.probe_grid
    tol = ctx.tol["positivity"]
    trend, skipped = {}, []
    worst, wit = np.inf, None
    pos_name, gram_name = f"{name}probe-positivity", f"{name}probe-gram"
    try:
        if not G.bounded:
            raise UnboundedSymbol(f"symbol {G.label!r} has no sup bound")
        samples = sample_symbol(G, grid)
        for eps in eps_list:
            lo = np.inf
            for k in range(1, G.m + 1):
                try:
                    f = basis_test_field(eps, k, G.m, grid, PROBE_PLATEAU)
                except UnderResolved:
                    skipped.append(eps)
                    break
                v = positivity_of(apply_multiplier(G, f, samples), tol)
                lo = min(lo, v.min_relative)
                if v.min_relative < worst:
                    worst = v.min_relative
                    wit = None if v.passed else dict(v.witness, eps=eps, k=k, grid=grid.to_dict(),
                                                     plateau=PROBE_PLATEAU)
            if np.isfinite(lo):
                trend[f"{eps:g}"] = lo
        detail = {"min_relative_by_eps": trend, "eps_skipped": sorted(set(skipped), reverse=True),
                  "falsified": bool(worst <= -ctx.tol["falsify"])}
        pos = Check(pos_name, worst >= -tol, worst, tol, wit if worst < -tol else None, detail)
    except (NonFinite, UnboundedSymbol) as exc:
        pos = _error_check(pos_name, tol, exc)

    def gram():
        lam, thr, gw = np.inf, ctx.tol["psd"], None
        by_eps = {}
        for eps in eps_list:
            hat = mollifier(MollifierSpec(G.n, eps, PROBE_PLATEAU)).phi_hat
            lo = np.inf
            for j in range(G.m):
                for k in range(G.m):
                    v = ctx.psd(G.entry(j, k) * hat)
                    val = _verdict_value(v)
                    if v.kind == "eigenvalue":
                        lo = min(lo, val)
                    elif v.passed:
                        lo = min(lo, v.min_eigenvalue)
                    if not v.passed and (gw is None or (v.kind == "eigenvalue" and val < lam)):
                        lam, thr = val, v.tolerance
                        gw = dict(v.witness_dict(), eps=eps, entry=[j, k], plateau=PROBE_PLATEAU)
                    elif v.passed and gw is None and v.min_eigenvalue < lam:
                        lam, thr = v.min_eigenvalue, v.tolerance
            by_eps[f"{eps:g}"] = lo
        return Check(gram_name, gw is None, lam, thr, gw, {"min_eigenvalue_by_eps": by_eps})

    return [pos, _guarded(gram_name, ctx.tol["psd"], gram)]


# --------------------------------------------------------------- scenarios


def _theorem_2_2(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    fields = int(p.get("fields", 20))
    eps_list = [float(e) for e in p.get("eps", DYADIC_EPS)]
    probe = bool(p.get("probe", True))
    targets = []
    if "G" in p:
        targets.append((symbol_from_config(p["G"]), None))
    elif "measure" in p:
        mu = measure_from_config(p["measure"])
        targets.append((bochner_matrix(mu) if mu.is_matrix else bochner_scalar(mu), mu))
    else:
        r = p.get("random", {})
        ms = r.get("m", 2)
        ms = [int(ms)] if isinstance(ms, (int, float)) else [int(v) for v in ms]
        count = int(r.get("count", 1))
        atoms = r.get("atoms", [1, 5])
        atoms = (atoms, atoms) if isinstance(atoms, int) else tuple(atoms)
        for i in range(count):
            rng = stream(sc.seed, "theorem-2-2/G", i)
            mu = random_psd_measure(rng, ctx.grid.n, ms[i % len(ms)], atoms, radius=float(r.get("radius", 3.0)),
                                    lattice=ctx.grid.h, entrywise_nonnegative=True)
            targets.append((bochner_matrix(mu), mu))
    checks = []
    for i, (G, mu) in enumerate(targets):
        prefix = f"G{i:02d}/" if len(targets) > 1 else ""
        checks.append(_entry_psd_check(ctx, f"{prefix}entry-psd", G))
        checks += _positivity_checks(ctx, prefix, G, fields, mu)
        if probe:
            checks += _probe_checks(ctx, prefix, G, eps_list)
    return checks


def _lk_entries(sc: Scenario, ctx: _Ctx, diagonal: bool) -> list[list[LKParams]]:
    p = sc.params
    if diagonal and "diagonal" in p:
        diag = [lk_from_config(d) for d in p["diagonal"]]
    elif not diagonal and "entries" in p:
        return [[lk_from_config(d) for d in row] for row in p["entries"]]
    else:
        m = int(p.get("m", 2))
        rng = stream(sc.seed, sc.kind, "params")
        if diagonal:
            diag = [random_lk_params(rng, ctx.grid.n) for _ in range(m)]
        else:
            return [[random_lk_params(rng, ctx.grid.n) for _ in range(m)] for _ in range(m)]
    n = diag[0].n
    return [[diag[j] if j == k else LKParams.zero(n) for k in range(len(diag))] for j in range(len(diag))]


def _corollary_2_3(sc: Scenario, ctx: _Ctx) -> list[Check]:
    fields = int(sc.params.get("fields", 10))
    F = lk_matrix(_lk_entries(sc, ctx, diagonal=False))
    checks = [_entry_psd_check(ctx, "F/entry-cpsd", F, cpsd=True)]
    for t in _tlist(sc.params):
        H = hadamard_exp(F, t)
        checks.append(_entry_psd_check(ctx, f"{_tname(t)}/entry-psd", H))
        checks += _positivity_checks(ctx, f"{_tname(t)}/", H, fields)
    return checks


def _corollary_2_4(sc: Scenario, ctx: _Ctx) -> list[Check]:
    fields = int(sc.params.get("fields", 10))
    F = lk_matrix(_lk_entries(sc, ctx, diagonal=True))
    checks = [_entry_psd_check(ctx, "F/entry-cpsd", F, cpsd=True)]
    X = ctx.plan.probe_points(F.n) / 2
    for t in _tlist(sc.params):
        E = matrix_exp(F, t)
        name = f"{_tname(t)}/diagonal-exact"

        def diag_exact(E=E, t=t, name=name):
            got = E(X)
            vals = np.exp(t * np.diagonal(F(X), axis1=-2, axis2=-1))
            want = np.zeros_like(got)
            idx = np.arange(F.m)
            want[..., idx, idx] = vals
            scale = np.maximum(np.abs(want).max(axis=(-2, -1)), 1e-300)
            err = float((np.abs(got - want).max(axis=(-2, -1)) / scale).max())
            return Check(name, err <= ctx.tol["closed_form"], err, ctx.tol["closed_form"])

        checks.append(_guarded(name, ctx.tol["closed_form"], diag_exact))
        checks.append(_psd_check(ctx, f"{_tname(t)}/block-psd", E))
        checks += _positivity_checks(ctx, f"{_tname(t)}/", E, fields)
    return checks


def _corollary_2_5(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    fields = int(p.get("fields", 10))
    if "F" in p:
        F = _as_matrix(symbol_from_config(p["F"]))
    else:
        rng = stream(sc.seed, "corollary-2-5/F")
        mu = random_psd_measure(rng, ctx.grid.n, int(p.get("m", 2)), (1, 3), radius=3.0,
                                lattice=ctx.grid.h, entrywise_nonnegative=True)
        F = bochner_matrix(mu)
    checks = [_entry_psd_check(ctx, "F/entry-psd", F)]
    X = ctx.plan.probe_points(F.n)[:3]
    for t in _tlist(p):
        E = matrix_exp(F, t)
        name = f"{_tname(t)}/series"

        def series(E=E, t=t, name=name):
            A = t * F(X)
            terms = int(60 + 3 * np.abs(A).sum(axis=-2).max())
            ref = expm_series(A, terms)
            got = E(X)
            err = float((np.abs(got - ref).max(axis=(-2, -1)) / np.abs(ref).max(axis=(-2, -1))).max())
            return Check(name, err <= ctx.tol["series"], err, ctx.tol["series"], detail={"terms": terms})

        checks.append(_guarded(name, ctx.tol["series"], series))
        checks.append(_entry_psd_check(ctx, f"{_tname(t)}/entry-psd", E))
        checks += _positivity_checks(ctx, f"{_tname(t)}/", E, fields)
    return checks


def _example_2_6(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    a = symbol_from_config(p.get("a", "neg-quadratic"))
    if not isinstance(a, ScalarSymbol):
        raise ConfigInvalid("'a' must be a scalar symbol")
    b = float(p.get("b", 1.0))
    if b < 0:
        raise ConfigInvalid("b must be nonnegative")
    fields = int(p.get("fields", 10))
    xs = int(p.get("xs", 100))
    F0 = example_f0(a, b)
    checks = [
        _psd_check(ctx, "1-a-cpsd", a, cpsd=True),
        _psd_check(ctx, "2-f0-mlak", F0, cpsd=True),
    ]
    X = stream(sc.seed, "example-2-6/x").uniform(-3.0, 3.0, size=(xs, a.n))
    for t in _tlist(p):
        tn = _tname(t)
        E = matrix_exp(F0, t)
        C = exp_f0_closed_form(a, b, t)
        name = f"3-closed-form/{tn}"

        def closed(E=E, C=C, name=name):
            got, want = E(X), C(X)
            scale = np.maximum(np.abs(want).max(axis=(-2, -1)), 1e-300)
            err = np.abs(got - want).max(axis=(-2, -1)) / scale
            i = int(np.argmax(err))
            tol = ctx.tol["closed_form"]
            wit = None if err[i] <= tol else {"x": X[i].tolist(), "deviation": float(err[i])}
            return Check(name, bool(err[i] <= tol), float(err[i]), tol, wit)

        checks.append(_guarded(name, ctx.tol["closed_form"], closed))
        checks.append(_psd_check(ctx, f"4-block-psd/{tn}", E))
        checks += _positivity_checks(ctx, f"5-grid/{tn}/", E, fields)
    checks.append(_quadratic_form_check(ctx, a, b, F0))
    return checks


def _quadratic_form_check(ctx: _Ctx, a: ScalarSymbol, b: float, F0: MatrixSymbol) -> Check:
    """sum (c_p, F0(x_p - x_q) c_q) splits into two a-forms plus b times a cross term
    built from the coefficient sums; under sum c_p = 0 the cross term vanishes."""
    name, tol = "6-quadratic-form", ctx.tol["quadratic_form"]

    def run():
        err = 0.0
        rng = stream(ctx.seed, "example-2-6/forms")
        for pts in ctx.plan.point_sets(a.n):
            N = pts.shape[0]
            c = rng.standard_normal((N, 2)) + 1j * rng.standard_normal((N, 2))
            for zero_sum in (False, True):
                if zero_sum:
                    c = c - c.mean(axis=0)
                lhs = np.vdot(c.ravel(), _block(F0, pts) @ c.ravel())
                A = np.asarray(a(pts[:, None, :] - pts[None, :, :]))
                s = c.sum(axis=0)
                cross = 0.0 if zero_sum else np.conj(s[0]) * s[1] + np.conj(s[1]) * s[0]
                rhs = np.vdot(c[:, 0], A @ c[:, 0]) + np.vdot(c[:, 1], A @ c[:, 1]) + b * cross
                scale = max(1.0, float(np.abs(A).max()) * float((np.abs(c) ** 2).sum()) + b * float(np.abs(s).sum()) ** 2)
                err = max(err, abs(lhs - rhs) / scale)
        return Check(name, err <= tol, err, tol)

    return _guarded(name, tol, run)


def _block(F: MatrixSymbol, pts: np.ndarray) -> np.ndarray:
    from .psd import block_gram
    return block_gram(F, pts)


def _bochner_suite(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    count = int(p.get("count", 100))
    dims = [int(n) for n in p.get("n", [1, 2])]
    ms = [int(m) for m in p.get("m", [2, 3])]
    worst_eig, eig_thr, eig_wit = np.inf, ctx.tol["psd"], None
    sym_gap, sym_wit = 0.0, None
    excess, bound_wit = -np.inf, None
    for i in range(count):
        rng = stream(sc.seed, "bochner-suite", i)
        n = dims[i % len(dims)]
        if i % 2:
            mu = random_psd_measure(rng, n, ms[(i // 2) % len(ms)])
            F = bochner_matrix(mu)
        else:
            mu = random_nonnegative_measure(rng, n)
            F = bochner_scalar(mu)
        X = ctx.plan.probe_points(n)
        fx, fmx = F(X), F(-X)
        adj = np.conj(np.swapaxes(fx, -1, -2)) if mu.is_matrix else np.conj(fx)
        gap = np.abs(fmx - adj).reshape(len(X), -1).max(axis=1)
        j = int(np.argmax(gap))
        if gap[j] > sym_gap:
            sym_gap = float(gap[j])
            sym_wit = {"measure": i, "x": X[j].tolist()}
        norms = np.linalg.norm(fx, ord=2, axis=(-2, -1)) if mu.is_matrix else np.abs(fx)
        at0 = F(np.zeros((1, n)))[0]
        f0 = np.linalg.norm(at0, ord=2) if mu.is_matrix else abs(at0)
        j = int(np.argmax(norms))
        if norms[j] - f0 > excess:
            excess = float(norms[j] - f0)
            bound_wit = {"measure": i, "x": X[j].tolist()}
        v = ctx.psd(F)
        ctx.rows.append(("psd", i, _verdict_value(v)))
        if not v.passed and eig_wit is None:
            eig_wit = dict(v.witness_dict(), measure=i, config=mu.to_config())
            worst_eig, eig_thr = _verdict_value(v), v.tolerance
        elif eig_wit is None and v.min_eigenvalue < worst_eig:
            worst_eig, eig_thr = v.min_eigenvalue, v.tolerance
    st, bt = ctx.tol["symmetry"], ctx.tol["bound"]
    return [
        Check("psd", eig_wit is None, worst_eig, eig_thr, eig_wit, {"measures": count}),
        Check("symmetry", sym_gap <= st, sym_gap, st, None if sym_gap <= st else sym_wit),
        Check("bound", excess <= bt, excess, bt, None if excess <= bt else bound_wit),
    ]


def _lk_suite(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    count = int(p.get("count", 10))
    fields = int(p.get("fields", 10))
    n = int(p.get("n", 1))
    ts = _tlist(p)
    Fs = []
    for i in range(count):
        params = random_lk_params(stream(sc.seed, "lk-suite", i), n)
        Fs.append((i, params, levy_khintchine(params)))
    checks = [_merge("cpsd", [(i, _psd_check(ctx, "cpsd", F, cpsd=True)) for i, _, F in Fs])]
    for t in ts:
        tn = _tname(t)
        checks.append(_merge(f"{tn}/psd", [(i, _psd_check(ctx, "", sym.exp_of(F, t))) for i, _, F in Fs]))
        pos = []
        for i, _, F in Fs:
            pos.append((i, _positivity_checks(ctx, f"{tn}/lk{i:02d}/", sym.exp_of(F, t), fields)[0]))
        checks.append(_merge(f"{tn}/positivity", pos))
    return checks


def _merge(name: str, indexed: list[tuple[int, Check]]) -> Check:
    """Fold per-member checks into one: worst value, first failure as witness."""
    ok = all(c.passed for _, c in indexed)
    vals = [c.value for _, c in indexed if c.value is not None]
    tol = indexed[0][1].tol if indexed else None
    wit = None
    for i, c in indexed:
        if not c.passed:
            wit = dict(c.witness or {}, member=i)
            break
    return Check(name, ok, min(vals) if vals else None, tol, wit, {"members": len(indexed)})


def _schur_suite(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    count = int(p.get("count", 500))
    lo, hi = (int(s) for s in p.get("sizes", [2, 20]))
    tol = ctx.tol["schur"]
    worst, wit = np.inf, None
    for i in range(count):
        rng = stream(sc.seed, "schur-suite", i)
        d = int(rng.integers(lo, hi + 1))
        C = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        D = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        # low-rank factors give singular A, B (and often a singular A o B)
        C[:, : int(rng.integers(0, d))] = 0
        D[:, : int(rng.integers(0, d))] = 0
        H = hadamard(C @ C.conj().T, D @ D.conj().T)
        rel = hermitian_min_eig(H) / np.linalg.norm(H, 2)
        ctx.rows.append(("schur", i, rel))
        if rel < worst:
            worst = rel
            wit = {"trial": i, "size": d}
    return [Check("schur", worst >= -tol, worst, tol, wit if worst < -tol else None, {"pairs": count})]


def _norm_suite(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    grid = ctx.grid
    ctx.grid_used = grid
    tol = ctx.tol
    checks = []
    rng = stream(sc.seed, "norm-suite/roundtrip")
    err = 0.0
    for _ in range(int(p.get("fields", 50))):
        f = white_noise_field(grid, 2, rng)
        err = max(err, float(np.abs(dft_inverse(dft_forward(f)).data - f.data).max()) / f.sup_norm())
    checks.append(Check("roundtrip", err <= tol["roundtrip"], err, tol["roundtrip"]))

    _, tv = kernel_and_tv(sym.gaussian(grid.n, 1.0), grid)
    want = (2 * np.pi) ** (grid.n / 2)
    checks.append(Check("gaussian-tv", abs(tv - want) <= tol["gaussian_tv"], tv, tol["gaussian_tv"],
                        detail={"expected": want}))

    c = (2 * np.pi) ** (-grid.n / 2)
    _, tv = kernel_and_tv(sym.constant(c, grid.n), grid)
    checks.append(Check("delta-tv", abs(tv - 1) <= tol["delta_tv"], tv, tol["delta_tv"]))

    # cos(xi) is the symbol of (delta_1 + delta_-1)/2 acting by convolution; its atoms
    # must sit on the lattice, so this check uses a box with 1/h integral.
    cos_grid = grid_from_config(p.get("cos_grid", [1, 1024, 32.0]))
    _, tv = kernel_and_tv(sym.cosine(1.0), cos_grid)
    op = tv * (2 * np.pi) ** (-cos_grid.n / 2)
    checks.append(Check("cos-tv", abs(op - 1) <= tol["cos_tv"], op, tol["cos_tv"],
                        detail={"grid": cos_grid.to_dict(), "kernel_tv": tv}))

    symbols = [("gaussian", sym.gaussian(grid.n, 1.0))]
    if grid.n == 1:
        symbols.append(("cos", sym.cosine(1.0)))
    mu = random_psd_measure(stream(sc.seed, "norm-suite/G"), grid.n, 2, (2, 4))
    symbols.append(("bochner2", bochner_matrix(mu)))
    for label, G in symbols:
        rep = l2_norm_bound(G, grid, seed=sc.seed, n_fields=int(p.get("fields", 50)))
        ok = rep.parseval_ratio <= rep.sup_symbol + tol["parseval"]
        checks.append(Check(f"parseval/{label}", ok, rep.parseval_ratio - rep.sup_symbol, tol["parseval"],
                            detail=rep.to_dict()))

    G = sym.gaussian(grid.n, 1.0)
    _, tv = kernel_and_tv(G, grid)
    opnorm = tv * c
    worst = -np.inf
    for i in range(10):
        f = trial_field(sc.seed, "norm-suite/contraction", i, grid, 1)
        ratio = lp_vector_norm(apply_multiplier(G, f), 1) / lp_vector_norm(f, 1)
        worst = max(worst, ratio - opnorm)
    checks.append(Check("contraction-l1", worst <= tol["parseval"], worst, tol["parseval"],
                        detail={"l1_operator_norm": opnorm}))
    return checks


def _falsify(sc: Scenario, ctx: _Ctx) -> list[Check]:
    p = sc.params
    G = symbol_from_config(p.get("G", {"family": "bump", "n": 1, "radius": 4.0}))
    eps_list = [float(e) for e in p.get("eps", DYADIC_EPS)]
    M = _as_matrix(G)
    ctx.grid_used = ctx.grid
    tol = ctx.tol["positivity"]
    lo, wit = np.inf, None
    for j in range(M.m):
        for k in range(M.m):
            re = fejer_kernel(M.entry(j, k), ctx.grid).data[0].real
            rel = float(re.min() / np.abs(re).max())
            if rel < lo:
                lo = rel
                i = int(np.argmin(re))
                wit = {"entry": [j, k], "index": [i], "x": [float(ctx.grid.axis()[i])], "value": float(re[i])}
    checks = [Check("kernel-sign", lo >= -tol, lo, tol, wit if lo < -tol else None)]
    checks += _probe_checks(ctx, "", G, eps_list)
    return checks


_RUNNERS = {
    "theorem-2-2": _theorem_2_2,
    "corollary-2-3": _corollary_2_3,
    "corollary-2-4": _corollary_2_4,
    "corollary-2-5": _corollary_2_5,
    "example-2-6": _example_2_6,
    "bochner-suite": _bochner_suite,
    "lk-suite": _lk_suite,
    "schur-suite": _schur_suite,
    "norm-suite": _norm_suite,
    "falsify": _falsify,
}


def run_scenario(sc: Scenario) -> Report:
    t0 = time.perf_counter()
    ctx = _Ctx(sc)
    checks = _RUNNERS[sc.kind](sc, ctx)
    grid = ctx.grid_used or (ctx.grid if "grid" in sc.params else None)
    extra = {}
    if sc.kind in ("theorem-2-2", "falsify"):
        extra["probe_grid"] = ctx.probe_grid.to_dict()
    rep = Report(
        scenario=dict(sc.to_dict(), plan=ctx.plan.to_dict(), **extra),
        checks=checks,
        seed=sc.seed,
        grid=None if grid is None else grid.to_dict(),
        tolerances=dict(sc.tolerances),
        trial_rows=ctx.rows,
    )
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return rep


def run(cfg: dict, seed: int | None = None, tol: float | None = None) -> Report:
    return run_scenario(Scenario.from_config(cfg, seed, tol))


def verify_theorem_2_2(cfg: dict) -> Report:
    return run(dict(cfg, scenario="theorem-2-2"))


def verify_semigroup(cfg: dict) -> Report:
    if cfg.get("scenario") not in ("corollary-2-3", "corollary-2-4", "corollary-2-5"):
        raise ConfigInvalid("verify_semigroup needs a corollary-2-3/4/5 scenario")
    return run(cfg)


def verify_example_2_6(cfg: dict) -> Report:
    return run(dict(cfg, scenario="example-2-6"))
