"""Command-line driver: reproducible simulation, error-table, scattering,
and asymptotics runs.

Each invocation reads one JSON config, writes CSV tables plus a manifest
into the output directory, and renders the matching figures alongside
(disable with --no-figures).  Exit codes: 0 success, 2 configuration error,
3 blow-up (last finite snapshots are saved), 4 missing prerequisite.

Only the standard library is imported at module level so that --threads can
pin the BLAS/OpenMP pools before numpy loads.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_PREREQ = 4


class PrerequisiteError(RuntimeError):
    """The requested computation needs an input the config did not provide."""


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="badbouss",
        description="Damped Fourier solver and verification workbench for "
        "the ill-posed 'bad' Boussinesq equation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("simulate", "run the scheme and export solution snapshots"),
        ("error-table", "tabulate the L-infinity error against a reference"),
        ("scattering", "tabulate s(k), r1(k) and search for soliton zeros"),
        ("asymptotics", "tabulate A2(zeta), phase shifts, and the Sector II "
                        "soliton parameters"),
    ):
        cmd = sub.add_parser(name, help=help_)
        cmd.add_argument("--config", required=True, help="JSON run configuration")
        cmd.add_argument("--out", required=True, help="output directory")
        cmd.add_argument("--threads", type=int, default=None,
                         help="cap numpy/BLAS thread pools (1 = bitwise "
                              "reproducible runs)")
        cmd.add_argument("--seed", type=int, default=None,
                         help="seed for randomized self-tests; recorded in "
                              "the manifest, unused by the solvers")
        cmd.add_argument("--no-figures", action="store_true",
                         help="write only the CSV/JSON outputs")
    return parser


def _set_threads(n: int | None) -> None:
    if n is None:
        return
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)


def _write_csv(path: Path, header, columns) -> None:
    import numpy as np

    arr = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in arr:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def _versions() -> dict:
    import numpy
    import scipy

    import badbouss

    return {
        "badbouss": badbouss.__version__,
        "numpy": numpy.__version__,
        "scipy": scipy.__version__,
        "python": sys.version.split()[0],
    }


def _write_manifest(out_dir: Path, command: str, cfg, args, outputs, timings,
                    extra=None) -> None:
    from .config import effective_config

    manifest = {
        "schema": 1,
        "command": command,
        "effective_config": effective_config(cfg),
        "versions": _versions(),
        "threads": args.threads,
        "seed": args.seed,
        "figures": not args.no_figures,
        "outputs": sorted(outputs),
        "timings_s": {k: round(v, 4) for k, v in timings.items()},
    }
    if extra:
        manifest.update(extra)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )


def _build_data(cfg):
    from .scheme import ConfigError
    from .waves import (
        GaussianSum,
        GridSamples,
        PerturbedSoliton,
        SolitonDescriptor,
        SolitonWave,
        three_hump_terms,
    )

    spec = cfg.initial_data
    kind = spec["type"]
    if kind == "soliton":
        return SolitonWave(
            SolitonDescriptor(A=spec["amplitude"], x0=spec.get("center", 0.0))
        )
    if kind == "gaussian":
        return GaussianSum([tuple(t) for t in spec["terms"]])
    if kind == "three-gaussians":
        return GaussianSum(
            three_hump_terms(
                a=spec.get("a", 0.01), b=spec.get("b", 20.0), c=spec.get("c", 0.02)
            )
        )
    if kind == "perturbed-soliton":
        return PerturbedSoliton(spec["amplitude"])
    if kind == "samples-file":
        import numpy as np

        raw = np.genfromtxt(spec["path"], delimiter=",", names=True)
        for col in ("x", "u0", "u1"):
            if col not in (raw.dtype.names or ()):
                raise ConfigError("samples file must have columns x,u0,u1")
        return GridSamples(raw["x"], raw["u0"], raw["u1"])
    raise ConfigError(f"unhandled initial data type {kind!r}")


def _run_simulation(cfg):
    from .timestep import simulate
    from .waves import initial_state

    grid = cfg.scheme.grid()
    data = _build_data(cfg)
    init = initial_state(data, grid)
    traj = simulate(cfg.scheme, init, cfg.snapshot_times)
    return data, grid, traj


def _soliton_pipeline(cfg, data, *, need_k1: bool):
    """Scattering + asymptote chain shared by the u-sol reference and the
    asymptotics command."""
    import numpy as np

    from .asymptotics import soliton_asymptote, unit_circle_saddle
    from .scattering import PotentialSampler, find_k0, norming_constant

    if need_k1 and cfg.asymptotics.get("k1") != "conjugate-saddle":
        raise PrerequisiteError(
            "the position shift ln f needs the arc endpoint k1(zeta), "
            "which this scheme's source does not define; set "
            "asymptotics.k1 = 'conjugate-saddle' to adopt the "
            "unit-circle stationary point"
        )
    sampler = PotentialSampler.from_data(
        data, tail_tol=cfg.scattering.get("tail_tol", 1e-14)
    )
    interval = tuple(
        cfg.asymptotics.get("search_interval")
        or cfg.scattering.get("search_interval")
        or (1.0, 3.0)
    )
    root = find_k0(sampler, interval)
    if not root.found:
        return sampler, root, None, None
    norming = norming_constant(root.k0, sampler)
    asym = None
    if need_k1:
        asym = soliton_asymptote(
            sampler, root.k0, norming.value, unit_circle_saddle
        )
    return sampler, root, norming, asym


def _reference_fn(cfg, data):
    """Callable (x, t) -> reference profile, or None."""
    from .scheme import ConfigError

    kind = cfg.reference.get("type", "none")
    if kind == "none":
        return None
    if kind == "exact-soliton":
        from .waves import SolitonWave, soliton_value

        if not isinstance(data, SolitonWave):
            raise ConfigError(
                "reference 'exact-soliton' needs soliton initial data"
            )
        return lambda x, t: soliton_value(data.desc, x, t)
    if kind == "u-sol":
        _, root, _, asym = _soliton_pipeline(cfg, data, need_k1=True)
        if asym is None:
            raise PrerequisiteError(
                "reference 'u-sol' needs a soliton zero, but the data is "
                "solitonless on the search interval"
            )
        return asym.u_sol
    raise ConfigError(f"unhandled reference type {kind!r}")


def cmd_simulate(cfg, out_dir: Path, args) -> int:
    import numpy as np

    from .timestep import BlowUpError, reconstruct

    timings = {}
    t0 = time.perf_counter()
    blowup = None
    try:
        data, grid, traj = _run_simulation(cfg)
    except BlowUpError as err:
        if err.trajectory is None or len(err.trajectory) == 0:
            print(f"error: {err} (no finite snapshot recorded)", file=sys.stderr)
            return EXIT_BLOWUP
        blowup = err
        traj = err.trajectory
        grid = cfg.scheme.grid()
        data = _build_data(cfg)
    timings["simulate"] = time.perf_counter() - t0

    xs = np.linspace(-grid.L, grid.L, cfg.output["snapshot_points"])
    outputs = []
    profiles = []
    for i, (t, state) in enumerate(zip(traj.times, traj.states)):
        u = reconstruct(state, xs, grid)
        profiles.append(u)
        name = f"u_{i:04d}_t{t:g}.csv"
        _write_csv(out_dir / name, ["x", "U"], [xs, u])
        outputs.append(name)

    try:
        ref_fn = _reference_fn(cfg, data)
    except PrerequisiteError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PREREQ
    if not args.no_figures:
        from . import figures

        ref = [ref_fn(xs, t) for t in traj.times] if ref_fn else None
        figures.snapshots_figure(
            out_dir / "snapshots.png", traj.times, xs, profiles, reference=ref
        )
        outputs.append("snapshots.png")
        if cfg.scheme.damping:
            profile = cfg.scheme.profile()
            figures.damping_figure(
                out_dir / "damping.png", grid.modes, profile.values
            )
            outputs.append("damping.png")

    extra = None
    if blowup is not None:
        extra = {"blowup": {"time": blowup.time}}
    _write_manifest(out_dir, "simulate", cfg, args, outputs, timings, extra)
    if blowup is not None:
        print(
            f"blow-up at t = {blowup.time:.6g}; wrote {len(traj)} finite "
            f"snapshot(s) to {out_dir}",
            file=sys.stderr,
        )
        return EXIT_BLOWUP
    print(f"wrote {len(traj)} snapshot(s) to {out_dir}")
    return EXIT_OK


def _error_interval(cfg, grid, t):
    margin = 2.0 * grid.dx
    if cfg.error.get("zeta_interval") is not None:
        lo, hi = cfg.error["zeta_interval"]
        lo, hi = lo * t, hi * t
    elif cfg.error.get("interval") is not None:
        lo, hi = cfg.error["interval"]
    else:
        return None
    lo = max(float(lo), -grid.L)
    hi = min(float(hi), grid.L - margin)
    if hi <= lo:
        return None
    return (lo, hi)


def cmd_error_table(cfg, out_dir: Path, args) -> int:
    import numpy as np

    from .scheme import ConfigError
    from .timestep import BlowUpError
    from .waves import linf_error

    if cfg.reference.get("type", "none") == "none":
        raise ConfigError("error-table needs a reference (exact-soliton or u-sol)")

    timings = {}
    t0 = time.perf_counter()
    try:
        data, grid, traj = _run_simulation(cfg)
    except BlowUpError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BLOWUP
    timings["simulate"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    try:
        ref_fn = _reference_fn(cfg, data)
    except PrerequisiteError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PREREQ
    timings["reference"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    n_points = cfg.error.get("points", 100_000)
    times, errors = [], []
    for t, state in zip(traj.times, traj.states):
        interval = _error_interval(cfg, grid, t)
        if cfg.error.get("zeta_interval") is not None and interval is None:
            continue  # window empty at early times
        errors.append(linf_error(state, grid, ref_fn, interval, n_points))
        times.append(t)
    times = np.asarray(times)
    errors = np.asarray(errors)
    timings["errors"] = time.perf_counter() - t0

    with np.errstate(divide="ignore", invalid="ignore"):
        t_over_lnt = np.where(times > 1.0, times / np.log(times), np.nan)
    _write_csv(
        out_dir / "error_table.csv",
        ["t", "e", "t_over_lnt_e", "sqrt_t_e"],
        [times, errors, t_over_lnt * errors, np.sqrt(times) * errors],
    )
    outputs = ["error_table.csv"]
    if not args.no_figures:
        from . import figures

        figures.error_figure(out_dir / "error.png", times, errors)
        outputs.append("error.png")
    _write_manifest(out_dir, "error-table", cfg, args, outputs, timings)
    print(f"wrote error table with {len(times)} rows to {out_dir}")
    return EXIT_OK


def cmd_scattering(cfg, out_dir: Path, args) -> int:
    import numpy as np

    from .scattering import (
        PotentialSampler,
        find_k0,
        norming_constant,
        scattering_matrix,
    )

    data = _build_data(cfg)
    sampler = PotentialSampler.from_data(
        data, tail_tol=cfg.scattering.get("tail_tol", 1e-14)
    )
    step = cfg.scattering.get("step", 0.05)
    timings = {}
    outputs = []

    k_values = cfg.scattering.get("k_values") or []
    if k_values:
        t0 = time.perf_counter()
        rows = {name: [] for name in ("k_re", "k_im")}
        for i in range(3):
            for c in range(3):
                rows[f"s{i+1}{c+1}_re"] = []
                rows[f"s{i+1}{c+1}_im"] = []
        rows.update({"r1_re": [], "r1_im": [], "growth": [], "residual": [],
                     "n_masked": []})
        for pair in k_values:
            k = complex(pair[0], pair[1]) if isinstance(pair, list) else complex(pair)
            res = scattering_matrix(k, sampler, step=step,
                                    with_residual=len(k_values) <= 8)
            rows["k_re"].append(k.real)
            rows["k_im"].append(k.imag)
            for i in range(3):
                for c in range(3):
                    rows[f"s{i+1}{c+1}_re"].append(res.s[i, c].real)
                    rows[f"s{i+1}{c+1}_im"].append(res.s[i, c].imag)
            rows["r1_re"].append(res.r1.real)
            rows["r1_im"].append(res.r1.imag)
            rows["growth"].append(res.growth)
            rows["residual"].append(
                res.residual if res.residual is not None else np.nan
            )
            rows["n_masked"].append(len(res.masked))
        header = list(rows)
        _write_csv(out_dir / "scattering.csv", header, [rows[h] for h in header])
        outputs.append("scattering.csv")
        timings["k_table"] = time.perf_counter() - t0

    root = norming = None
    if cfg.scattering.get("search_interval"):
        t0 = time.perf_counter()
        interval = tuple(cfg.scattering["search_interval"])
        root = find_k0(sampler, interval)
        status_num = 1.0 if root.found else 0.0
        k0 = root.k0 if root.found else np.nan
        cols = {
            "interval_lo": [interval[0]],
            "interval_hi": [interval[1]],
            "found": [status_num],
            "k0": [k0],
        }
        if root.found:
            cols["A0"] = [0.375 * (k0 - 1 / k0) ** 2]
            cols["c0"] = [0.5 * (k0 + 1 / k0)]
        if root.found and cfg.scattering.get("norming"):
            norming = norming_constant(root.k0, sampler)
            cols["ck0_re"] = [norming.value.real]
            cols["ck0_im"] = [norming.value.imag]
            cols["ck0_spread"] = [norming.rel_spread]
        header = list(cols)
        _write_csv(out_dir / "roots.csv", header, [cols[h] for h in header])
        outputs.append("roots.csv")
        timings["root_search"] = time.perf_counter() - t0
        if not args.no_figures:
            from . import figures

            figures.scattering_figure(
                out_dir / "scattering.png", root.scan_k, root.scan_s11
            )
            outputs.append("scattering.png")

    extra = {}
    if root is not None:
        extra["root_search"] = {
            "status": root.status,
            "k0": root.k0,
        }
    _write_manifest(out_dir, "scattering", cfg, args, outputs, timings, extra)
    if root is not None and not root.found:
        print("solitonless on the search interval")
    print(f"wrote scattering outputs to {out_dir}")
    return EXIT_OK


def cmd_asymptotics(cfg, out_dir: Path, args) -> int:
    import numpy as np

    from .asymptotics import amplitude_A2_sweep, phase_shift, sector_point

    data = _build_data(cfg)
    timings = {}
    outputs = []

    t0 = time.perf_counter()
    need_k1 = bool(cfg.asymptotics.get("u_sol_times"))
    sampler, root, norming, asym = _soliton_pipeline(cfg, data, need_k1=need_k1)
    k0 = root.k0 if root.found else None
    timings["scattering"] = time.perf_counter() - t0

    if need_k1 and not root.found:
        print(
            "error: u_sol export requested but the data is solitonless on "
            "the search interval",
            file=sys.stderr,
        )
        return EXIT_PREREQ

    grid_spec = cfg.asymptotics.get("zeta_grid") or [0.2, 0.8, 0.01]
    lo, hi, step_z = grid_spec
    zetas = np.round(np.arange(lo, hi + step_z / 2, step_z), 12)
    t0 = time.perf_counter()
    A2, _ = amplitude_A2_sweep(zetas, sampler)
    shifts_left = np.array(
        [phase_shift(sector_point(z).k2, k0, moving="left") for z in zetas]
    )
    shifts_right = np.array(
        [phase_shift(sector_point(z).k4, k0, moving="right") for z in zetas]
    )
    timings["sweep"] = time.perf_counter() - t0
    A0 = 0.375 * (k0 - 1 / k0) ** 2 if k0 else np.nan
    c0 = 0.5 * (k0 + 1 / k0) if k0 else np.nan
    _write_csv(
        out_dir / "asymptotics.csv",
        ["zeta", "A2", "shift_left", "shift_right", "A0", "c0"],
        [zetas, A2, shifts_left, shifts_right,
         np.full_like(zetas, A0), np.full_like(zetas, c0)],
    )
    outputs.append("asymptotics.csv")

    params = {"solitonless": not root.found}
    if root.found:
        params.update(
            k0=root.k0,
            A0=0.375 * (root.k0 - 1 / root.k0) ** 2,
            c0=0.5 * (root.k0 + 1 / root.k0),
            c_k0=[norming.value.real, norming.value.imag],
            c_k0_spread=norming.rel_spread,
        )
    if asym is not None:
        params["x_offset"] = asym.x_offset
        params["ln_f_at_c0"] = float(asym.ln_f(asym.c0))
    (out_dir / "soliton_params.json").write_text(
        json.dumps(params, indent=2, sort_keys=True) + "\n"
    )
    outputs.append("soliton_params.json")

    for t in cfg.asymptotics.get("u_sol_times") or []:
        xs = np.linspace(1.001 * t, min(2.0 * t, cfg.scheme.L), 4001)
        name = f"u_sol_t{t:g}.csv"
        _write_csv(out_dir / name, ["x", "u_sol"], [xs, asym.u_sol(xs, t)])
        outputs.append(name)

    if not args.no_figures:
        from . import figures

        figures.asymptotics_figure(
            out_dir / "asymptotics.png", zetas, A2, shifts_left, shifts_right
        )
        outputs.append("asymptotics.png")

    _write_manifest(out_dir, "asymptotics", cfg, args, outputs, timings)
    print(f"wrote asymptotics outputs to {out_dir}")
    return EXIT_OK


_COMMANDS = {
    "simulate": cmd_simulate,
    "error-table": cmd_error_table,
    "scattering": cmd_scattering,
    "asymptotics": cmd_asymptotics,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    _set_threads(args.threads)

    from .config import load_config
    from .scheme import ConfigError

    try:
        cfg = load_config(args.config)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, out_dir, args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except PrerequisiteError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PREREQ


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
