"""Run configuration: a versioned JSON schema with strict key checking.

Unknown keys are rejected everywhere so a manifest reproduces a run exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .scheme import ConfigError, SchemeConfig

SCHEMA_VERSION = 1

_DATA_TYPES = ("soliton", "gaussian", "three-gaussians", "perturbed-soliton",
               "samples-file")
_REFERENCE_TYPES = ("exact-soliton", "u-sol", "none")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration for one CLI run."""

    scheme: SchemeConfig
    snapshot_times: tuple
    initial_data: dict
    reference: dict
    error: dict
    output: dict
    scattering: dict
    asymptotics: dict
    raw: dict = field(repr=False, default_factory=dict)


def _require_keys(section: dict, allowed: set, path: str) -> None:
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) {sorted(unknown)} in {path}; allowed: {sorted(allowed)}"
        )


def _number(section, key, path, *, default=None, required=False, positive=False):
    if key not in section or section[key] is None:
        if required:
            raise ConfigError(f"{path}.{key} is required")
        return default
    val = section[key]
    if not isinstance(val, (int, float)) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key} must be a number, got {val!r}")
    if positive and val <= 0:
        raise ConfigError(f"{path}.{key} must be positive, got {val}")
    return float(val)


def _integer(section, key, path, *, default=None):
    if key not in section or section[key] is None:
        return default
    val = section[key]
    if not isinstance(val, int) or isinstance(val, bool):
        raise ConfigError(f"{path}.{key} must be an integer, got {val!r}")
    return val


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as err:
        raise ConfigError(f"config is not valid JSON: {err}")
    return parse_config(raw)


def parse_config(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    _require_keys(
        raw,
        {"schema", "scheme", "initial_data", "reference", "error", "output",
         "scattering", "asymptotics"},
        "config",
    )
    if raw.get("schema") != SCHEMA_VERSION:
        raise ConfigError(
            f"config.schema must be {SCHEMA_VERSION}, got {raw.get('schema')!r}"
        )

    scheme_raw = raw.get("scheme")
    if not isinstance(scheme_raw, dict):
        raise ConfigError("config.scheme section is required")
    _require_keys(
        scheme_raw,
        {"L", "N", "d0", "Nd", "damping", "dt", "t_final", "snapshot_times",
         "snapshot_every", "convolution"},
        "config.scheme",
    )
    L = _number(scheme_raw, "L", "config.scheme", required=True, positive=True)
    t_final = _number(scheme_raw, "t_final", "config.scheme", required=True)
    damping = scheme_raw.get("damping", True)
    if not isinstance(damping, bool):
        raise ConfigError("config.scheme.damping must be a boolean")
    convolution = scheme_raw.get("convolution", "fft")
    scheme = SchemeConfig(
        L=L,
        t_final=t_final,
        N=_integer(scheme_raw, "N", "config.scheme"),
        d0=_number(scheme_raw, "d0", "config.scheme", default=10.0),
        Nd=_integer(scheme_raw, "Nd", "config.scheme"),
        damping=damping,
        dt=_number(scheme_raw, "dt", "config.scheme", default=0.1, positive=True),
        convolution=convolution,
    )

    times = scheme_raw.get("snapshot_times")
    every = scheme_raw.get("snapshot_every")
    if times is not None and every is not None:
        raise ConfigError("give either snapshot_times or snapshot_every, not both")
    if times is not None:
        if not isinstance(times, list) or not times:
            raise ConfigError("config.scheme.snapshot_times must be a nonempty list")
        snapshot_times = tuple(float(t) for t in times)
    elif every is not None:
        step = _number(scheme_raw, "snapshot_every", "config.scheme", positive=True)
        n = int(np.floor(scheme.t_final / step + 1e-9))
        snapshot_times = tuple(np.round(np.arange(0, n + 1) * step, 12))
        if snapshot_times[-1] < scheme.t_final - 1e-9:
            snapshot_times = snapshot_times + (scheme.t_final,)
    else:
        snapshot_times = (0.0, scheme.t_final) if scheme.t_final > 0 else (0.0,)
    if any(t < 0 or t > scheme.t_final + 1e-9 for t in snapshot_times):
        raise ConfigError("snapshot times must lie in [0, t_final]")

    data = raw.get("initial_data")
    if not isinstance(data, dict):
        raise ConfigError("config.initial_data section is required")
    _require_keys(
        data,
        {"type", "amplitude", "center", "terms", "a", "b", "c", "path"},
        "config.initial_data",
    )
    dtype = data.get("type")
    if dtype not in _DATA_TYPES:
        raise ConfigError(
            f"config.initial_data.type must be one of {_DATA_TYPES}, got {dtype!r}"
        )
    if dtype in ("soliton", "perturbed-soliton"):
        _number(data, "amplitude", "config.initial_data", required=True, positive=True)
    if dtype == "gaussian" and not isinstance(data.get("terms"), list):
        raise ConfigError("gaussian initial data needs a terms list [[a, b, c], ...]")
    if dtype == "samples-file" and not data.get("path"):
        raise ConfigError("samples-file initial data needs a path")

    reference = raw.get("reference", {"type": "none"})
    _require_keys(reference, {"type"}, "config.reference")
    if reference.get("type", "none") not in _REFERENCE_TYPES:
        raise ConfigError(
            f"config.reference.type must be one of {_REFERENCE_TYPES}"
        )

    error = raw.get("error", {})
    _require_keys(error, {"interval", "zeta_interval", "points"}, "config.error")
    if error.get("interval") is not None and error.get("zeta_interval") is not None:
        raise ConfigError("give either error.interval or error.zeta_interval")
    points = error.get("points", 100_000)
    if not isinstance(points, int) or points < 2:
        raise ConfigError("config.error.points must be an integer >= 2")

    output = raw.get("output", {})
    _require_keys(output, {"snapshot_points"}, "config.output")
    sp = output.get("snapshot_points", 2001)
    if not isinstance(sp, int) or sp < 2:
        raise ConfigError("config.output.snapshot_points must be an integer >= 2")

    scattering = raw.get("scattering", {})
    _require_keys(
        scattering,
        {"k_values", "search_interval", "norming", "step", "tail_tol"},
        "config.scattering",
    )

    asymptotics = raw.get("asymptotics", {})
    _require_keys(
        asymptotics,
        {"zeta_grid", "u_sol_times", "k1", "search_interval"},
        "config.asymptotics",
    )
    k1_mode = asymptotics.get("k1")
    if k1_mode is not None and k1_mode != "conjugate-saddle":
        raise ConfigError(
            "config.asymptotics.k1 must be null or 'conjugate-saddle'"
        )

    return RunConfig(
        scheme=scheme,
        snapshot_times=snapshot_times,
        initial_data=dict(data),
        reference=dict(reference),
        error=dict(error),
        output={"snapshot_points": sp},
        scattering=dict(scattering),
        asymptotics=dict(asymptotics),
        raw=raw,
    )


def effective_config(cfg: RunConfig) -> dict:
    """Fully resolved configuration (all defaults pinned) for the manifest;
    parsing it again reproduces the run."""
    return {
        "schema": SCHEMA_VERSION,
        "scheme": {
            "L": cfg.scheme.L,
            "N": cfg.scheme.N,
            "d0": cfg.scheme.d0,
            "Nd": cfg.scheme.Nd,
            "damping": cfg.scheme.damping,
            "dt": cfg.scheme.dt,
            "t_final": cfg.scheme.t_final,
            "convolution": cfg.scheme.convolution,
            "snapshot_times": list(cfg.snapshot_times),
        },
        "initial_data": cfg.initial_data,
        "reference": cfg.reference,
        "error": {
            "interval": cfg.error.get("interval"),
            "zeta_interval": cfg.error.get("zeta_interval"),
            "points": cfg.error.get("points", 100_000),
        },
        "output": cfg.output,
        "scattering": cfg.scattering,
        "asymptotics": cfg.asymptotics,
    }
