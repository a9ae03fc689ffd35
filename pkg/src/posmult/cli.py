"""Command line interface.

Exit codes: 0 when every check passes, 1 when a mathematical check fails
(the report carries a witness), 2 on configuration or runtime errors.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from ._version import __version__
from .config import (
    CONFIG_VERSION,
    grid_from_config,
    load_config,
    lk_from_config,
    measure_from_config,
    symbol_from_config,
    symbol_to_config,
)
from .engine import apply_multiplier, l2_norm_bound, lp_vector_norm, positivity_of
from .errors import ConfigInvalid, PosmultError
from .harness import (
    DEFAULT_GRID,
    DEFAULT_TOLERANCES,
    KINDS,
    Check,
    Report,
    _verdict_value,
    run,
    trial_field,
)
from .io import read_field, write_csv_slice, write_field
from .psd import SamplingPlan, test_cpsd_function, test_psd_function
from .synth import bochner_matrix, bochner_scalar, levy_khintchine

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="master seed (default: config value or 0)")
    common.add_argument("--grid", help="grid as n,N,L")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--csv", help="CSV side output (per-trial minima or a 1-D field slice)")
    common.add_argument("--tol", type=float, help="override the PSD and positivity tolerances")

    ap = argparse.ArgumentParser(prog="posmult", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"posmult {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    for name, what in (("test-psd", "positive"), ("test-cpsd", "conditionally positive")):
        p = sub.add_parser(name, parents=[common], help=f"sampled Gram test: is the symbol {what} semidefinite?")
        p.add_argument("--symbol", help="symbol alias (e.g. gaussian, cos, neg-quadratic)")
        p.add_argument("--trials", type=int, help="number of sampled point sets")

    sub.add_parser("synth-bochner", parents=[common], help="Bochner transform of an atomic measure")
    sub.add_parser("synth-lk", parents=[common], help="Levy-Khintchine symbol from (alpha, beta, A, nu)")

    p = sub.add_parser("apply", parents=[common], help="apply G(-i grad) to a field")
    p.add_argument("--symbol", help="symbol alias")
    p.add_argument("--input", help="MPLB field file (default: a seeded nonnegative bump field)")
    p.add_argument("--output", help="write the output field as MPLB")

    p = sub.add_parser("norms", parents=[common], help="kernel TV and L2 witnesses of a multiplier")
    p.add_argument("--symbol", help="symbol alias")
    p.add_argument("--fields", type=int, default=50)

    p = sub.add_parser("verify", parents=[common], help="run a verification scenario")
    p.add_argument("scenario", choices=KINDS)
    p.add_argument("--a", help="symbol alias for a(x) (example-2-6)")
    p.add_argument("--b", type=float, help="off-diagonal constant b (example-2-6)")
    p.add_argument("--t", help="comma separated times")
    p.add_argument("--fields", type=int, help="nonnegative fields per positivity ensemble")
    p.add_argument("--count", type=int, help="ensemble size for suites")

    p = sub.add_parser("falsify", parents=[common], help="mollifier probe against a candidate symbol")
    p.add_argument("--symbol", help="symbol alias (default: bump of radius 4)")
    p.add_argument("--eps", help="comma separated eps sweep")
    return ap


def _load(args) -> dict:
    return load_config(args.config) if args.config else {"version": CONFIG_VERSION}


def _seed(args, cfg) -> int:
    if args.seed is not None:
        return args.seed
    seed = cfg.get("seed", 0)
    if not isinstance(seed, int) or seed < 0:
        raise ConfigInvalid(f"seed must be a nonnegative integer, got {seed!r}")
    return seed


def _symbol(args, cfg, key="symbol"):
    if getattr(args, "symbol", None):
        return symbol_from_config(args.symbol)
    if key not in cfg:
        raise ConfigInvalid(f"no symbol given: pass --symbol or put '{key}' in the config")
    return symbol_from_config(cfg[key])


def _tolerances(args) -> dict:
    tols = dict(DEFAULT_TOLERANCES)
    if args.tol is not None:
        tols["psd"] = tols["positivity"] = args.tol
    return tols


def _single(command: str, echo: dict, checks: list[Check], seed: int, tols: dict, t0: float, grid=None) -> Report:
    rep = Report({"kind": command, **echo}, checks, seed, None if grid is None else grid.to_dict(), tols)
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return rep


def _psd_command(args, cfg, t0, cpsd: bool) -> Report:
    seed = _seed(args, cfg)
    F = _symbol(args, cfg)
    plan = dict(cfg.get("plan", {}), seed=seed)
    if args.trials:
        plan["trials"] = args.trials
    plan = SamplingPlan(**plan)
    tols = _tolerances(args)
    if cpsd:
        v = test_cpsd_function(F, plan, tols["psd"], tols["hsym"], tols["symmetry"])
    else:
        v = test_psd_function(F, plan, tols["psd"], tols["hsym"], tols["symmetry"], tols["bound"])
    name = "cpsd" if cpsd else "psd"
    check = Check(name, v.passed, _verdict_value(v), v.tolerance, v.witness_dict())
    echo = {"symbol": F.to_config(), "plan": plan.to_dict()}
    return _single(args.command, echo, [check], seed, tols, t0)


def _synth_command(args, cfg, t0, lk: bool) -> Report:
    seed = _seed(args, cfg)
    tols = _tolerances(args)
    plan = SamplingPlan(**dict(cfg.get("plan", {}), seed=seed))
    if lk:
        if "lk" not in cfg:
            raise ConfigInvalid("synth-lk needs an 'lk' object with alpha, beta, A, nu")
        F = levy_khintchine(lk_from_config(cfg["lk"]))
        v = test_cpsd_function(F, plan, tols["psd"], tols["hsym"], tols["symmetry"])
        name = "cpsd"
    else:
        if "measure" not in cfg:
            raise ConfigInvalid("synth-bochner needs a 'measure' object")
        mu = measure_from_config(cfg["measure"])
        F = bochner_matrix(mu) if mu.is_matrix else bochner_scalar(mu)
        v = test_psd_function(F, plan, tols["psd"], tols["hsym"], tols["symmetry"], tols["bound"])
        name = "psd"
    check = Check(name, v.passed, _verdict_value(v), v.tolerance, v.witness_dict(),
                  {"symbol": symbol_to_config(F), "sup_bound": F.bound})
    return _single(args.command, {"plan": plan.to_dict()}, [check], seed, tols, t0)


def _grid(args, cfg):
    if args.grid:
        return grid_from_config(args.grid)
    return grid_from_config(cfg["grid"]) if "grid" in cfg else DEFAULT_GRID


def _apply_command(args, cfg, t0) -> Report:
    seed = _seed(args, cfg)
    tols = _tolerances(args)
    G = _symbol(args, cfg)
    if args.input:
        f = read_field(args.input)
        grid = f.spec
    else:
        grid = _grid(args, cfg)
        m = getattr(G, "m", 1)
        f = trial_field(seed, "apply", 0, grid, m)
    out = apply_multiplier(G, f)
    if args.output:
        write_field(args.output, out)
    if args.csv:
        write_csv_slice(args.csv, out)
    checks = []
    detail = {"l1_in": lp_vector_norm(f, 1), "l1_out": lp_vector_norm(out, 1),
              "l2_in": lp_vector_norm(f, 2), "l2_out": lp_vector_norm(out, 2)}
    if f.is_nonnegative():
        v = positivity_of(out, tols["positivity"])
        checks.append(Check("positivity", v.passed, v.min_relative, v.tolerance, v.witness, detail))
    else:
        checks.append(Check("applied", True, float(np.abs(out.data).max()), None, None, detail))
    return _single("apply", {"symbol": G.to_config()}, checks, seed, tols, t0, grid)


def _norms_command(args, cfg, t0) -> Report:
    seed = _seed(args, cfg)
    tols = _tolerances(args)
    G = _symbol(args, cfg)
    grid = _grid(args, cfg)
    rep = l2_norm_bound(G, grid, seed=seed, n_fields=args.fields)
    gap = rep.parseval_ratio - rep.sup_symbol
    checks = [Check("parseval", gap <= tols["parseval"], gap, tols["parseval"], None, rep.to_dict())]
    return _single("norms", {"symbol": G.to_config()}, checks, seed, tols, t0, grid)


def _scenario_config(args, cfg, kind: str) -> dict:
    cfg = dict(cfg, scenario=kind)
    params = dict(cfg.get("params", {}))
    if args.grid:
        params["grid"] = args.grid
    for opt, key in (("a", "a"), ("b", "b"), ("fields", "fields"), ("count", "count")):
        v = getattr(args, opt, None)
        if v is not None:
            params[key] = v
    if getattr(args, "t", None):
        params["t"] = _floats(args.t)
    if getattr(args, "symbol", None):
        params["G"] = args.symbol
    if getattr(args, "eps", None):
        params["eps"] = _floats(args.eps)
    cfg["params"] = params
    cfg["seed"] = _seed(args, cfg)
    return cfg


def dispatch(args) -> Report:
    t0 = time.perf_counter()
    cfg = _load(args)
    cmd = args.command
    if cmd in ("test-psd", "test-cpsd"):
        return _psd_command(args, cfg, t0, cmd == "test-cpsd")
    if cmd in ("synth-bochner", "synth-lk"):
        return _synth_command(args, cfg, t0, cmd == "synth-lk")
    if cmd == "apply":
        return _apply_command(args, cfg, t0)
    if cmd == "norms":
        return _norms_command(args, cfg, t0)
    kind = args.scenario if cmd == "verify" else "falsify"
    return run(_scenario_config(args, cfg, kind), tol=args.tol)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = dispatch(args)
    except (PosmultError, ValueError, OSError, KeyError, TypeError) as exc:
        print(f"posmult: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        rep.write(args.out)
    else:
        print(rep.to_json())
    if args.csv and args.command not in ("apply",):
        rep.write_csv(args.csv)
    failed = [c.name for c in rep.checks if not c.passed]
    status = "PASS" if not failed else f"FAIL ({', '.join(sorted(failed))})"
    print(f"posmult {args.command}: {status} [{rep.elapsed_ms:.0f} ms]", file=sys.stderr)
    return rep.exit_code
