"""Command line front end: reproducible simulation and recovery runs.

Subcommands: simulate (one forward solve), experiment (ensemble ->
pollute -> reconstruct sweep over H and delta), kernels (export the
h_k / E_kl table), fbm (dump one sampled path).  Runs are configured by
a flat key=value file plus flag overrides (flags win); a config fully
determines every output byte, with all randomness derived from one
master seed.  Numeric CSV output carries 17 significant digits.
"""

from __future__ import annotations

import argparse
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .estimator import EnsembleConfig, pollute, run_ensemble
from .fbm import HurstIndex, derive_seed, sample_fbm_path
from .forward import (
    SourceSpec,
    SpaceTimeGrid,
    final_time_coeffs,
    solve_fd,
    solve_spectral,
)
from .inverse import reconstruct_fields
from .kernels import build_kernel_table
from .spectral import SpatialGrid

__all__ = [
    "ExperimentConfig",
    "parse_config_file",
    "make_config",
    "cmd_simulate",
    "cmd_experiment",
    "cmd_kernels",
    "cmd_fbm",
    "main",
]

# Seed derivation domains under the master seed.  Path seeds inside an
# ensemble use domain 0 (see fbm.path_seed).
_NOISE_DOMAIN = 1
_KERNEL_DOMAIN = 2
_SIMULATE_DOMAIN = 3
_ENSEMBLE_DOMAIN = 4


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat run configuration; defaults follow the reference experiment."""

    h_values: tuple = (0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    deltas: tuple = (0.001,)
    m_paths: int = 1000
    n_modes: int = 9
    n_t: int = 2**13
    n_x: int = 100
    t_final: float = 1.0
    master_seed: int = 12345
    solver: str = "fd"
    preset: str = "reference"
    f_file: Optional[str] = None
    g_file: Optional[str] = None
    h_file: Optional[str] = None
    mc_paths: int = 10_000
    mc_n_steps: int = 2**13
    panels: int = 8

    def __post_init__(self):
        if not self.h_values:
            raise ValueError("H: need at least one value")
        for h in self.h_values:
            if not 0.0 < h < 1.0:
                raise ValueError(f"H: {h} outside (0, 1)")
        if not self.deltas:
            raise ValueError("delta: need at least one value")
        for d in self.deltas:
            if d < 0.0:
                raise ValueError(f"delta: {d} is negative")
        if self.m_paths < 2:
            raise ValueError("M: need at least 2 paths")
        if self.n_modes < 1:
            raise ValueError("N: need at least 1 mode")
        if self.n_t < 1:
            raise ValueError("n_t: need at least 1 step")
        if self.n_x < 2:
            raise ValueError("n_x: need at least 2 cells")
        if self.n_modes > self.n_x // 4:
            raise ValueError(
                f"N: {self.n_modes} exceeds the aliasing bound "
                f"n_x/4 = {self.n_x // 4}"
            )
        if self.t_final <= 0.0:
            raise ValueError("T: must be positive")
        if self.solver not in ("fd", "spectral"):
            raise ValueError(f"solver: unknown tag {self.solver!r}")
        if self.preset != "reference":
            raise ValueError(f"preset: unknown preset {self.preset!r}")
        if self.mc_paths < 2:
            raise ValueError("mc_paths: need at least 2")
        if self.mc_n_steps < 2:
            raise ValueError("mc_n_steps: need at least 2")
        if self.panels < 1:
            raise ValueError("panels: need at least 1")


# config-file key -> (dataclass field, parser)
def _float_list(text: str) -> tuple:
    return tuple(float(part) for part in text.split(",") if part.strip())


_KEY_SPEC = {
    "H": ("h_values", _float_list),
    "delta": ("deltas", _float_list),
    "M": ("m_paths", int),
    "N": ("n_modes", int),
    "n_t": ("n_t", int),
    "n_x": ("n_x", int),
    "T": ("t_final", float),
    "master_seed": ("master_seed", int),
    "solver": ("solver", str),
    "preset": ("preset", str),
    "f_file": ("f_file", str),
    "g_file": ("g_file", str),
    "h_file": ("h_file", str),
    "mc_paths": ("mc_paths", int),
    "mc_n_steps": ("mc_n_steps", int),
    "panels": ("panels", int),
}


def parse_config_file(path) -> dict:
    """Read key = value lines into dataclass field values."""
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _KEY_SPEC:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        field_name, parse = _KEY_SPEC[key]
        try:
            values[field_name] = parse(val)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {key}: {exc}") from exc
    return values


def make_config(config_path=None, **overrides) -> ExperimentConfig:
    """Defaults, then the config file, then flag overrides."""
    values = parse_config_file(config_path) if config_path else {}
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return ExperimentConfig(**values)


def _space_time_grid(config: ExperimentConfig) -> SpaceTimeGrid:
    return SpaceTimeGrid(
        spatial=SpatialGrid(config.n_x), n_t=config.n_t, t_final=config.t_final
    )


def _read_samples(path: str, coords: np.ndarray, key: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if data.shape[1] != 2:
        raise ValueError(f"{key}: {path} must have two columns (coord, value)")
    if data.shape[0] != coords.size or not np.allclose(
        data[:, 0], coords, rtol=1e-9, atol=1e-12
    ):
        raise ValueError(
            f"{key}: sample coordinates in {path} do not match the grid "
            f"({coords.size} nodes expected)"
        )
    return data[:, 1]


def build_sources(config: ExperimentConfig, grid: SpaceTimeGrid) -> SourceSpec:
    """Source samples from the preset, with per-component file overrides.

    The reference preset is f = sin(3x), g = exp(-(x - pi/2)^2), h = 1.
    """
    x = grid.spatial.nodes
    t = grid.times
    if config.f_file:
        f = _read_samples(config.f_file, x, "f_file")
    else:
        f = np.sin(3.0 * x)
    if config.g_file:
        g = _read_samples(config.g_file, x, "g_file")
    else:
        g = np.exp(-((x - np.pi / 2.0) ** 2))
    if config.h_file:
        h = _read_samples(config.h_file, t, "h_file")
    else:
        h = np.ones(t.size)
    if config.f_file or config.g_file or config.h_file:
        return SourceSpec(f_samples=f, g_samples=g, h_samples=h)
    # the preset g deliberately keeps small wall values; no point
    # warning about the documented default on every run
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        return SourceSpec(f_samples=f, g_samples=g, h_samples=h)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, str):
        return value
    return format(float(value), ".17g")


def _write_csv(path: Path, comments, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        for line in comments:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _combo_tag(h: float, delta: float) -> str:
    return f"H{h:g}_delta{delta:g}"


def cmd_simulate(config: ExperimentConfig, out_dir: Path) -> int:
    """One forward solve along a fresh path; dumps field and coefficients."""
    grid = _space_time_grid(config)
    source = build_sources(config, grid)
    hurst = HurstIndex(config.h_values[0])
    seed = derive_seed(config.master_seed, _SIMULATE_DOMAIN, 0)
    path = sample_fbm_path(config.n_t, grid.h_t, hurst, seed)

    out_dir.mkdir(parents=True, exist_ok=True)
    meta = [
        "fracwave simulate",
        f"H={hurst.h:g} T={config.t_final:g} n_t={config.n_t} "
        f"n_x={config.n_x} solver={config.solver}",
        f"master_seed={config.master_seed} path_seed={seed}",
    ]

    if config.solver == "fd":
        field = solve_fd(source, grid, path)
        coeffs = final_time_coeffs(field, config.n_modes)
        rows = (
            [t] + list(u_row)
            for t, u_row in zip(grid.times, field.u)
        )
        _write_csv(
            out_dir / "wavefield.csv",
            meta,
            ["t"] + [f"u{i}" for i in range(config.n_x + 1)],
            rows,
        )
    else:
        coeffs = solve_spectral(source, grid, path, config.n_modes).final

    _write_csv(
        out_dir / "final_coeffs.csv",
        meta,
        ["k", "u_k_T"],
        ([k + 1, c] for k, c in enumerate(coeffs)),
    )
    print(f"[simulate] H={hurst.h:g} solver={config.solver} -> {out_dir}")
    return 0


def _kernel_table_for(config: ExperimentConfig, hurst: HurstIndex, h_index: int):
    grid = _space_time_grid(config)
    source = build_sources(config, grid)
    kernel_seed = derive_seed(config.master_seed, _KERNEL_DOMAIN, h_index)
    table = build_kernel_table(
        source.h_samples,
        config.t_final,
        hurst,
        config.n_modes,
        panels=config.panels,
        mc_n_steps=config.mc_n_steps,
        mc_paths=config.mc_paths,
        mc_seed=kernel_seed,
    )
    return table, kernel_seed


def _write_kernel_files(table, kernel_seed: int, config, out_dir: Path) -> None:
    meta = [
        "fracwave kernels",
        f"H={table.hurst.h:g} T={table.t_final:g} N={table.n_modes} "
        f"method={table.ekl_method}",
        f"master_seed={config.master_seed} kernel_seed={kernel_seed}",
    ]
    _write_csv(
        out_dir / "hk.csv",
        meta,
        ["k", "h_k", "flagged"],
        (
            [k + 1, table.hk[k], bool(table.hk_flagged[k])]
            for k in range(table.n_modes)
        ),
    )
    _write_csv(
        out_dir / "ekl.csv",
        meta,
        [f"l{l + 1}" for l in range(table.n_modes)],
        (row for row in table.ekl),
    )
    if table.mc_std_err is not None:
        _write_csv(
            out_dir / "ekl_stderr.csv",
            meta,
            [f"l{l + 1}" for l in range(table.n_modes)],
            (row for row in table.mc_std_err),
        )


def cmd_kernels(config: ExperimentConfig, out_dir: Path) -> int:
    """Export h_k and E_kl for the first configured H."""
    hurst = HurstIndex(config.h_values[0])
    table, kernel_seed = _kernel_table_for(config, hurst, 0)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_kernel_files(table, kernel_seed, config, out_dir)
    print(
        f"[kernels] H={hurst.h:g} N={config.n_modes} "
        f"method={table.ekl_method} -> {out_dir}"
    )
    return 0


def _write_moments(noisy, meta, out_path: Path) -> None:
    n = noisy.n_modes
    with open(out_path, "w", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write("# section: mean\n")
        fh.write("k,mean,std_err\n")
        for k in range(n):
            fh.write(
                f"{k + 1},{_fmt(noisy.mean[k])},{_fmt(noisy.std_err_mean[k])}\n"
            )
        fh.write("# section: covariance\n")
        fh.write(",".join(f"l{l + 1}" for l in range(n)) + "\n")
        for row in noisy.cov:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def cmd_experiment(config: ExperimentConfig, out_dir: Path, workers: int = 1) -> int:
    """Sweep H x delta: ensemble, pollute, reconstruct, summarize.

    One ensemble and one kernel table are computed per H; every delta
    reuses them with its own noise seed.  Wall times go to a separate
    timings file so the data files stay byte-reproducible.
    """
    grid = _space_time_grid(config)
    source = build_sources(config, grid)
    out_dir.mkdir(parents=True, exist_ok=True)

    summary_rows = []
    timing_rows = []
    for ih, hval in enumerate(config.h_values):
        tic = time.perf_counter()
        hurst = HurstIndex(hval)
        table, kernel_seed = _kernel_table_for(config, hurst, ih)
        ensemble_seed = derive_seed(config.master_seed, _ENSEMBLE_DOMAIN, ih)
        ens_cfg = EnsembleConfig(
            grid=grid,
            source=source,
            hurst=hurst,
            n_paths=config.m_paths,
            n_modes=config.n_modes,
            master_seed=ensemble_seed,
            solver=config.solver,
        )
        moments = run_ensemble(ens_cfg, workers=workers)

        for idelta, dval in enumerate(config.deltas):
            noise_seed = derive_seed(
                config.master_seed, _NOISE_DOMAIN, ih, idelta
            )
            noisy = pollute(moments, dval, noise_seed)
            result = reconstruct_fields(noisy, table, grid.spatial, truth=source)

            combo = out_dir / _combo_tag(hval, dval)
            combo.mkdir(parents=True, exist_ok=True)
            meta = [
                "fracwave experiment",
                f"H={hval:g} delta={dval:g} M={config.m_paths} "
                f"N={config.n_modes} T={config.t_final:g} n_t={config.n_t} "
                f"n_x={config.n_x} solver={config.solver}",
                f"master_seed={config.master_seed} "
                f"ensemble_seed={ensemble_seed} kernel_seed={kernel_seed} "
                f"noise_seed={noise_seed}",
            ]
            _write_moments(noisy, meta, combo / "moments.csv")
            recon_meta = meta + [
                f"rel_err_f={_fmt(result.rel_err_f)} "
                f"rel_err_g2={_fmt(result.rel_err_g2)} "
                f"skipped_modes={result.skipped_modes}",
            ]
            _write_csv(
                combo / "reconstruction.csv",
                recon_meta,
                ["x", "f_true", "f_hat", "g2_true", "g2_hat"],
                zip(
                    grid.spatial.nodes,
                    source.f_samples,
                    result.f_field,
                    source.g_samples**2,
                    result.g2_field,
                ),
            )
            summary_rows.append(
                [
                    hval,
                    dval,
                    config.m_paths,
                    config.n_modes,
                    config.n_t,
                    config.n_x,
                    config.t_final,
                    config.solver,
                    config.master_seed,
                    ensemble_seed,
                    kernel_seed,
                    noise_seed,
                    result.rel_err_f,
                    result.rel_err_g2,
                ]
            )
            print(
                f"[experiment] H={hval:g} delta={dval:g} "
                f"rel_err_f={result.rel_err_f:.4g} "
                f"rel_err_g2={result.rel_err_g2:.4g}"
            )
        timing_rows.append([hval, time.perf_counter() - tic])

    _write_csv(
        out_dir / "summary.csv",
        ["fracwave experiment summary"],
        [
            "H",
            "delta",
            "M",
            "N",
            "n_t",
            "n_x",
            "T",
            "solver",
            "master_seed",
            "ensemble_seed",
            "kernel_seed",
            "noise_seed",
            "rel_err_f",
            "rel_err_g2",
        ],
        summary_rows,
    )
    _write_csv(
        out_dir / "timings.csv",
        ["fracwave experiment timings (not reproducible run to run)"],
        ["H", "wall_time_s"],
        timing_rows,
    )
    return 0


def cmd_fbm(config: ExperimentConfig, out_dir: Path) -> int:
    """Dump one sampled fBm path."""
    hurst = HurstIndex(config.h_values[0])
    dt = config.t_final / config.n_t
    path = sample_fbm_path(config.n_t, dt, hurst, config.master_seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_dir / "fbm_path.csv",
        [
            "fracwave fbm path",
            f"H={hurst.h:g} seed={config.master_seed} "
            f"n_steps={config.n_t} T={config.t_final:g}",
        ],
        ["t", "B_H"],
        zip(path.times, path.values),
    )
    print(f"[fbm] H={hurst.h:g} n_steps={config.n_t} -> {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracwave",
        description=(
            "Simulate the stochastic wave equation driven by fractional "
            "noise and reconstruct its sources from final-time moments."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key = value configuration file")
        p.add_argument("--seed", type=int, help="override the master seed")
        p.add_argument(
            "--workers", type=int, default=1, help="parallel workers over paths"
        )
        p.add_argument(
            "--out", default="fracwave_out", help="output directory"
        )

    p_sim = sub.add_parser("simulate", help="one forward solve, CSV dumps")
    add_common(p_sim)
    p_sim.add_argument("--solver", choices=["fd", "spectral"])
    p_sim.add_argument("--hurst", type=float, help="override H (single value)")

    p_exp = sub.add_parser("experiment", help="ensemble + reconstruction sweep")
    add_common(p_exp)
    p_exp.add_argument("--solver", choices=["fd", "spectral"])

    p_ker = sub.add_parser("kernels", help="export the h_k / E_kl table")
    add_common(p_ker)
    p_ker.add_argument("--hurst", type=float, help="override H (single value)")

    p_fbm = sub.add_parser("fbm", help="dump one fractional Brownian path")
    add_common(p_fbm)
    p_fbm.add_argument("--hurst", type=float, help="override H (single value)")
    p_fbm.add_argument("--n-steps", type=int, help="number of increments")
    p_fbm.add_argument("--t-final", type=float, help="path horizon T")

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if getattr(args, "solver", None) is not None:
        overrides["solver"] = args.solver
    if getattr(args, "hurst", None) is not None:
        overrides["h_values"] = (args.hurst,)
    if getattr(args, "n_steps", None) is not None:
        overrides["n_t"] = args.n_steps
    if getattr(args, "t_final", None) is not None:
        overrides["t_final"] = args.t_final

    try:
        config = make_config(args.config, **overrides)
        out_dir = Path(args.out)
        if args.command == "simulate":
            return cmd_simulate(config, out_dir)
        if args.command == "experiment":
            return cmd_experiment(config, out_dir, workers=args.workers)
        if args.command == "kernels":
            return cmd_kernels(config, out_dir)
        if args.command == "fbm":
            return cmd_fbm(config, out_dir)
        raise AssertionError(f"unhandled command {args.command}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
