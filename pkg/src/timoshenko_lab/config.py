"""Strict sectioned key/value run configuration."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field

from .errors import ParseError, ValidationError
from .initial_data import GENERATORS, Generator, InitialData

SUBCOMMANDS = (
    "roots",
    "solve-linear",
    "rates",
    "profile-error",
    "cancellation",
    "regularity-loss",
    "verify-bounds",
    "semilinear",
)
RATE_MODES = ("growth", "zero-mean", "oscillatory")
COMPONENTS = ("w0", "w1", "psi0", "psi1")


def _floats(text: str):
    return tuple(float(v) for v in text.replace(",", " ").split())


def _opt_float(text: str):
    return None if text.strip().lower() in ("auto", "none", "") else float(text)


# section -> key -> (parser, default)
SCHEMA = {
    "run": {"subcommand": (str, "rates"), "mode": (str, "growth"), "seed": (int, 0)},
    "physics": {"a": (float, 1.0)},
    "time": {"t0": (float, 100.0), "t1": (float, 10000.0), "n_times": (int, 25)},
    "grid": {
        "eps0": (float, 0.1),
        "N0": (float, 10.0),
        "density": (float, 1.0),
        "xi_max": (_opt_float, None),
    },
    "roots": {"xi_lo": (float, 1e-3), "xi_hi": (float, 1e3), "n": (int, 60)},
    "regularity": {"xis": (_floats, (10.0, 20.0, 40.0, 80.0))},
    "bounds": {"xi_lo": (float, 1e-3), "xi_hi": (float, 0.1), "t_lo": (float, 1.0), "t_hi": (float, 1e3), "n": (int, 81)},
    "semilinear": {
        "p": (float, 4.0),
        "L": (float, 200.0),
        "N": (int, 4096),
        "dt": (float, 0.01),
        "T": (float, 200.0),
        "eps": (float, 1e-2),
        "fit_t0": (float, 10.0),
    },
    "output": {"dir": (str, "timoshenko_out")},
}
GENERATOR_KEYS = {"name": str, "sigma": float, "amplitude": float, "mollifier": float}

DEFAULT_DATA = {"w1": Generator("gaussian")}
ZERO_MEAN_DATA = {"w1": Generator("dgaussian")}


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``values[section][key]`` plus the four data generators."""

    values: dict
    data: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[section][key]

    @property
    def subcommand(self) -> str:
        return self.values["run"]["subcommand"]

    @property
    def a(self) -> float:
        return self.values["physics"]["a"]

    @property
    def initial_data(self) -> InitialData:
        return InitialData(**self.data)

    def replace(self, section: str, key: str, value) -> "RunConfig":
        vals = {s: dict(kv) for s, kv in self.values.items()}
        vals[section][key] = value
        return validate(RunConfig(vals, dict(self.data)))


def default_config(subcommand: str = "rates") -> RunConfig:
    vals = {s: {k: d for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    vals["run"]["subcommand"] = subcommand
    data = dict(ZERO_MEAN_DATA if subcommand == "semilinear" else DEFAULT_DATA)
    return validate(RunConfig(vals, data))


def parse_config(text: str) -> RunConfig:
    """Parse and validate. Missing keys take the documented defaults."""
    cp = configparser.ConfigParser(interpolation=None, delimiters=("=",), comment_prefixes=("#", ";"),
                                   inline_comment_prefixes=("#",), strict=True)
    cp.optionxform = str  # keys are case sensitive
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc

    sub = cp.get("run", "subcommand", fallback="rates").strip()
    base = default_config(sub if sub in SUBCOMMANDS else "rates")
    vals = {s: dict(kv) for s, kv in base.values.items()}
    data = dict(base.data)
    explicit_data = False

    for section in cp.sections():
        if section.startswith("data."):
            comp = section[5:]
            if comp not in COMPONENTS:
                raise ParseError(f"[{section}]: unknown data component {comp!r}")
            if not explicit_data:
                data, explicit_data = {}, True
            kw = {}
            for key, raw in cp.items(section):
                if key not in GENERATOR_KEYS:
                    raise ParseError(f"[{section}] unknown key {key!r}")
                kw[key] = _convert(GENERATOR_KEYS[key], raw, section, key)
            data[comp] = kw
            continue
        if section not in SCHEMA:
            raise ParseError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ParseError(f"[{section}] unknown key {key!r}")
            vals[section][key] = _convert(SCHEMA[section][key][0], raw, section, key)

    return validate(RunConfig(vals, data))


def _convert(fn, raw: str, section: str, key: str):
    try:
        return fn(raw.strip())
    except ValueError as exc:
        raise ParseError(f"[{section}] {key} = {raw!r}: {exc}") from exc


def validate(cfg: RunConfig) -> RunConfig:
    """Check every invariant; raise :class:`ValidationError` listing all violations."""
    v = cfg.values
    bad = []
    if v["run"]["subcommand"] not in SUBCOMMANDS:
        bad.append(f"unknown subcommand {v['run']['subcommand']!r}")
    if v["run"]["mode"] not in RATE_MODES:
        bad.append(f"mode must be one of {RATE_MODES}")
    a = v["physics"]["a"]
    if not (math.isfinite(a) and a > 0.5):
        bad.append("a must exceed 1/2")
    t = v["time"]
    if not 0 < t["t0"] < t["t1"]:
        bad.append("need 0 < t0 < t1")
    if t["n_times"] < 8:
        bad.append("n_times must be at least 8")
    g = v["grid"]
    if not 0 < g["eps0"] < g["N0"]:
        bad.append("need 0 < eps0 < N0")
    if g["density"] <= 0:
        bad.append("density must be positive")
    if g["xi_max"] is not None and g["xi_max"] <= 0:
        bad.append("xi_max must be positive")
    r = v["roots"]
    if not 0 < r["xi_lo"] < r["xi_hi"] or r["n"] < 2:
        bad.append("roots sweep needs 0 < xi_lo < xi_hi and n >= 2")
    if not v["regularity"]["xis"] or min(v["regularity"]["xis"]) <= 0:
        bad.append("regularity xis must be positive")
    b = v["bounds"]
    if not (0 < b["xi_lo"] < b["xi_hi"] and 0 < b["t_lo"] < b["t_hi"] and b["n"] >= 2):
        bad.append("bounds mesh needs positive increasing ranges and n >= 2")
    s = v["semilinear"]
    if s["p"] <= 1:
        bad.append("p must exceed 1")
    for key in ("L", "dt", "T", "eps", "fit_t0"):
        if s[key] <= 0:
            bad.append(f"semilinear {key} must be positive")
    if s["N"] < 8 or s["N"] & (s["N"] - 1):
        bad.append("N must be a power of two")

    data = {}
    for comp, gen in cfg.data.items():
        if isinstance(gen, Generator):
            data[comp] = gen
            continue
        name = gen.get("name", "zero")
        if name not in GENERATORS:
            bad.append(f"data.{comp}: unknown generator {name!r}")
            continue
        try:
            data[comp] = Generator(**gen)
        except ValueError as exc:
            bad.append(f"data.{comp}: {exc}")
    if bad:
        raise ValidationError(bad)
    return RunConfig(cfg.values, {c: data.get(c, Generator("zero")) for c in COMPONENTS})


def _fmt(value) -> str:
    if value is None:
        return "auto"
    if isinstance(value, float):
        return format(value, ".17g")
    if isinstance(value, tuple):
        return ", ".join(format(x, ".17g") for x in value)
    return str(value)


def emit_config(cfg: RunConfig) -> str:
    """Canonical text form; ``parse_config(emit_config(c)) == c``."""
    lines = []
    for section, keys in SCHEMA.items():
        lines.append(f"[{section}]")
        lines += [f"{k} = {_fmt(cfg.values[section][k])}" for k in keys]
        lines.append("")
    for comp in COMPONENTS:
        g = cfg.data[comp]
        lines.append(f"[data.{comp}]")
        lines += [f"name = {g.name}", f"sigma = {_fmt(g.sigma)}",
                  f"amplitude = {_fmt(g.amplitude)}", f"mollifier = {_fmt(g.mollifier)}", ""]
    return "\n".join(lines)
