"""JSON configuration: symbols by family name, measures, LK params, grids."""

from __future__ import annotations

import json
from pathlib import Path

from . import symbols as sym
from . import synth
from .engine import GridSpec
from .errors import ConfigInvalid, PosmultError
from .symbols import MatrixSymbol, ScalarSymbol

CONFIG_VERSION = 1

# Shorthand names accepted wherever a symbol config is expected.
ALIASES = {
    "neg-quadratic": {"family": "quadratic", "n": 1, "coeff": -1.0},
    "pos-quadratic": {"family": "quadratic", "n": 1, "coeff": 1.0},
    "zero": {"family": "constant", "n": 1, "value": 0.0},
    "gaussian": {"family": "gaussian", "n": 1, "width": 1.0},
    "cos": {"family": "cos", "freq": [1.0]},
    "sin": {"family": "sin", "freq": [1.0]},
    "bump": {"family": "bump", "n": 1, "radius": 4.0},
    "cos-minus-one": {"family": "shifted", "c": -1.0, "of": {"family": "cos", "freq": [1.0]}},
}


def _c(v) -> complex:
    return synth._complex_from(v)


def _require(d: dict, *keys):
    missing = [k for k in keys if k not in d]
    if missing:
        raise ConfigInvalid(f"family {d.get('family')!r} is missing {missing}")


def symbol_from_config(d) -> ScalarSymbol | MatrixSymbol:
    """Rebuild a symbol from its ``{"family": ..., ...}`` description."""
    if isinstance(d, str):
        if d not in ALIASES:
            raise ConfigInvalid(f"unknown symbol alias {d!r}; known: {sorted(ALIASES)}")
        d = ALIASES[d]
    if not isinstance(d, dict) or "family" not in d:
        raise ConfigInvalid(f"symbol config needs a 'family' key, got {d!r}")
    fam = d["family"]
    try:
        if fam == "gaussian":
            return sym.gaussian(int(d.get("n", 1)), float(d.get("width", 1.0)))
        if fam == "cos":
            return sym.cosine(d.get("freq", 1.0))
        if fam == "sin":
            return sym.sine(d.get("freq", 1.0))
        if fam == "constant":
            return sym.constant(_c(d.get("value", 0.0)), int(d.get("n", 1)))
        if fam == "quadratic":
            return sym.quadratic(int(d.get("n", 1)), float(d.get("coeff", -1.0)))
        if fam == "imag-linear":
            _require(d, "v")
            return sym.imag_linear(d["v"])
        if fam == "bump":
            return sym.bump(int(d.get("n", 1)), float(d.get("radius", 1.0)))
        if fam == "exp":
            _require(d, "t", "of")
            return sym.exp_of(symbol_from_config(d["of"]), float(d["t"]))
        if fam == "product":
            _require(d, "factors")
            out = symbol_from_config(d["factors"][0])
            for f in d["factors"][1:]:
                out = out * symbol_from_config(f)
            return out
        if fam == "scaled":
            _require(d, "c", "of")
            return _c(d["c"]) * symbol_from_config(d["of"])
        if fam == "shifted":
            _require(d, "c", "of")
            return symbol_from_config(d["of"]) + _c(d["c"])
        if fam == "bochner":
            _require(d, "measure")
            return synth.bochner_scalar(synth.AtomicMeasure.from_config(d["measure"]))
        if fam == "bochner-matrix":
            _require(d, "measure")
            return synth.bochner_matrix(synth.AtomicMeasure.from_config(d["measure"]))
        if fam == "levy-khintchine":
            return synth.levy_khintchine(synth.LKParams.from_config(d))
        if fam == "lk-matrix":
            _require(d, "entries")
            return synth.lk_matrix([[synth.LKParams.from_config(p) for p in row] for row in d["entries"]])
        if fam == "entries":
            _require(d, "entries")
            return MatrixSymbol.from_entries([[symbol_from_config(e) for e in row] for row in d["entries"]])
        if fam == "hadamard-exp":
            _require(d, "t", "of")
            return synth.hadamard_exp(_as_matrix(symbol_from_config(d["of"])), float(d["t"]))
        if fam == "matrix-exp":
            _require(d, "t", "of")
            return synth.matrix_exp(_as_matrix(symbol_from_config(d["of"])), float(d["t"]))
        if fam == "example-f0":
            _require(d, "a", "b")
            return synth.example_f0(symbol_from_config(d["a"]), float(d["b"]))
        if fam == "exp-f0":
            _require(d, "a", "b", "t")
            return synth.exp_f0_closed_form(symbol_from_config(d["a"]), float(d["b"]), float(d["t"]))
        if fam in ("mollifier", "mollifier-hat"):
            spec = synth.MollifierSpec(
                int(d.get("n", 1)), float(d.get("eps", 1.0)), float(d.get("plateau", 0.25)),
                d.get("normalization", "unit-integral"),
            )
            pair = synth.mollifier(spec)
            return pair.phi if fam == "mollifier" else pair.phi_hat
    except ConfigInvalid:
        raise
    except (PosmultError, ValueError, TypeError, KeyError, IndexError) as exc:
        raise ConfigInvalid(f"invalid parameters for family {fam!r}: {exc}") from exc
    raise ConfigInvalid(f"unknown symbol family {fam!r}")


def _as_matrix(s) -> MatrixSymbol:
    return MatrixSymbol.from_scalar(s) if isinstance(s, ScalarSymbol) else s


def symbol_to_config(s) -> dict:
    cfg = s.to_config()
    if cfg is None:
        raise ConfigInvalid(f"symbol {s.label!r} was not built from a serializable family")
    return cfg


def grid_from_config(g) -> GridSpec:
    try:
        if isinstance(g, str):
            return GridSpec.parse(g)
        if isinstance(g, dict):
            return GridSpec(int(g["n"]), int(g["N"]), float(g["L"]))
        if isinstance(g, (list, tuple)):
            n, N, L = g
            return GridSpec(int(n), int(N), float(L))
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigInvalid(f"invalid grid {g!r}: {exc}") from exc
    raise ConfigInvalid(f"invalid grid {g!r}")


def measure_from_config(d) -> synth.AtomicMeasure:
    try:
        return synth.AtomicMeasure.from_config(d)
    except (PosmultError, ValueError, TypeError, KeyError) as exc:
        raise ConfigInvalid(f"invalid measure: {exc}") from exc


def lk_from_config(d) -> synth.LKParams:
    try:
        return synth.LKParams.from_config(d)
    except (PosmultError, ValueError, TypeError, KeyError) as exc:
        raise ConfigInvalid(f"invalid LK parameters: {exc}") from exc


def parse_config(text: str) -> dict:
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigInvalid(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise ConfigInvalid("config must be a JSON object")
    if "version" not in cfg:
        raise ConfigInvalid("config is missing the 'version' field")
    if cfg["version"] != CONFIG_VERSION:
        raise ConfigInvalid(f"unsupported config version {cfg['version']!r} (expected {CONFIG_VERSION})")
    return cfg


def load_config(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config {path}: {exc}") from exc
    return parse_config(text)
