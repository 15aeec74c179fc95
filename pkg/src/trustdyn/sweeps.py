"""Parameter sweeps and the CSV artifact formats.

One CSV schema per analysis mode, written with 17 significant digits,
'.' decimal separator and LF line endings so reruns with the same seed
are byte-identical; run metadata (full parameterisation, seed, file
inventory, timestamp) goes into a companion ``*.meta.json``.  Grid points
are independent and can be dispatched to a process pool; a single
collector sorts rows by axis value before writing, so worker count never
changes the output.
"""

from __future__ import annotations

import csv
import datetime
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from types import SimpleNamespace

import numpy as np

from . import replicator
from .errors import ConfigError, TrustDynError
from .finite import FiniteConfig, build_chain, chain_metrics, chain_states
from .game import CreatorStrategy, GameParams, UserStrategy
from .qlearn import QConfig, run_experiment

__all__ = [
    "SweepSpec",
    "run_sweep",
    "write_finite_csv",
    "write_trajectory_csv",
    "write_qtrace_csv",
    "write_equilibria_csv",
    "parse_finite_csv",
    "parse_trajectory_csv",
    "parse_qtrace_csv",
    "fmt",
]

MODES = ("finite", "replicator", "qlearn")
TRUST_VARIANTS = ("both", "with", "without")

_GAME_FIELDS = {f.name for f in fields(GameParams)}
_FINITE_FIELDS = {f.name for f in fields(FiniteConfig)}


def fmt(value) -> str:
    """Canonical decimal rendering: 17 significant digits, '.' separator."""
    return format(float(value), ".17g")


def _writer(handle):
    return csv.writer(handle, lineterminator="\n")


def _open_out(path: Path):
    try:
        return open(path, "w", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


@dataclass(frozen=True)
class SweepSpec:
    """Cartesian sweep over one or two parameter axes.

    Axis names must be GameParams or FiniteConfig fields; ``axis2`` may be
    None for a single-row sweep.
    """

    mode: str
    axis1: tuple  # (name, tuple of values)
    axis2: tuple | None
    trust_variants: str = "both"
    output_dir: str = "."
    seed: int = 0
    dt: float = 0.01
    t_end: float = 500.0
    record_every: int = 1
    variant: str = "five"
    episodes: int = 5000
    runs: int = 10
    pop_size: int = 100
    learn_rate: float = 0.05
    explore_rate: float = 0.05

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.trust_variants not in TRUST_VARIANTS:
            raise ConfigError(f"trust_variants must be one of {TRUST_VARIANTS}")
        for axis in (self.axis1, self.axis2):
            if axis is None:
                continue
            name, values = axis
            if name not in _GAME_FIELDS | _FINITE_FIELDS:
                raise ConfigError(f"unknown sweep parameter {name!r}")
            if len(values) == 0:
                raise ConfigError(f"axis {name!r} has no values")

    def points(self) -> list:
        """Sorted cartesian grid: (axis assignments dict, point index)."""
        name1, vals1 = self.axis1
        combos = []
        if self.axis2 is None:
            combos = [{name1: v} for v in sorted(vals1)]
        else:
            name2, vals2 = self.axis2
            combos = [
                {name1: v1, name2: v2} for v1 in sorted(vals1) for v2 in sorted(vals2)
            ]
        return combos


def _coerce_cfg_value(key: str, value):
    if key in ("Z_u", "Z_c"):
        return int(value)
    if key == "trust_enabled":
        return bool(value)
    return value


def _apply_axes(params: GameParams, cfg: FiniteConfig, assignment: dict):
    game_kw = {k: v for k, v in assignment.items() if k in _GAME_FIELDS}
    cfg_kw = {k: _coerce_cfg_value(k, v) for k, v in assignment.items() if k in _FINITE_FIELDS}
    if game_kw:
        params = params.replace(**{k: (int(v) if k in ("theta_T", "theta_D", "r") else v) for k, v in game_kw.items()})
    if cfg_kw:
        cfg = replace(cfg, **cfg_kw)
    return params, cfg


# --- per-mode point computations (module level: picklable for the pool) ---


def _finite_point(args):
    params, cfg, assignment = args
    chain = build_chain(params, cfg)
    coop, adoption = chain_metrics(chain)
    return {
        "assignment": assignment,
        "eps": params.eps,
        "v": params.v,
        "trust_enabled": cfg.trust_enabled,
        "stationary": tuple(chain.stationary),
        "coop_freq": coop,
        "adoption_level": adoption,
    }


def _replicator_point(args):
    params, spec, assignment = args
    initial = replicator.uniform_state(spec.variant)
    traj = replicator.integrate(
        initial, params, spec.variant, dt=spec.dt, t_end=spec.t_end, record_every=spec.record_every
    )
    lo, hi = replicator.trailing_alpha_range(traj)
    return {
        "assignment": assignment,
        "eps": params.eps,
        "v": params.v,
        "final": tuple(traj.states[-1]),
        "alpha_tail_min": lo,
        "alpha_tail_max": hi,
        "times": traj.times,
        "states": traj.states,
    }


def _qlearn_point(args):
    params, qcfg, assignment = args
    trace = run_experiment(params, qcfg)
    return {
        "assignment": assignment,
        "eps": params.eps,
        "v": params.v,
        "user_fractions": trace.user_fractions,
        "creator_fractions": trace.creator_fractions,
        "final_user": tuple(trace.user_fractions[-1]),
        "final_creator": tuple(trace.creator_fractions[-1]),
    }


def _dispatch(task_fn, tasks, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [task_fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(task_fn, tasks))


# --- CSV writers and parsers ----------------------------------------------


def _finite_header(n_states: int) -> list:
    return (
        ["eps", "v", "trust_enabled"]
        + [f"stationary_p{i}" for i in range(n_states)]
        + ["coop_freq", "adoption_level"]
    )


def write_finite_csv(path, rows, n_states: int, extra_axes=()):
    """Stationary-distribution sweep rows; one row per grid point."""
    with _open_out(Path(path)) as handle:
        w = _writer(handle)
        w.writerow(_finite_header(n_states) + [f"axis_{a}" for a in extra_axes])
        for row in rows:
            record = (
                [fmt(row["eps"]), fmt(row["v"]), str(int(row["trust_enabled"]))]
                + [fmt(s) for s in row["stationary"]]
                + [fmt(row["coop_freq"]), fmt(row["adoption_level"])]
                + [fmt(row["assignment"][a]) for a in extra_axes]
            )
            w.writerow(record)


def parse_finite_csv(path) -> list:
    rows = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        for rec in reader:
            stationary = tuple(
                float(rec[k]) for k in rec.keys() if k.startswith("stationary_p")
            )
            rows.append(
                {
                    "eps": float(rec["eps"]),
                    "v": float(rec["v"]),
                    "trust_enabled": bool(int(rec["trust_enabled"])),
                    "stationary": stationary,
                    "coop_freq": float(rec["coop_freq"]),
                    "adoption_level": float(rec["adoption_level"]),
                }
            )
    return rows


def write_adoption_diff_csv(path, diff_rows):
    with _open_out(Path(path)) as handle:
        w = _writer(handle)
        w.writerow(["eps", "v", "adoption_with", "adoption_without", "adoption_diff"])
        for row in diff_rows:
            w.writerow([fmt(row[k]) for k in ("eps", "v", "adoption_with", "adoption_without", "adoption_diff")])


def write_trajectory_csv(path, traj: replicator.Trajectory):
    """Orbit rows: t, x, y, z, w, dtg, alpha."""
    with _open_out(Path(path)) as handle:
        w = _writer(handle)
        w.writerow(["t", "x", "y", "z", "w", "dtg", "alpha"])
        for t, row in zip(traj.times, traj.states):
            x, y, z, wq, a = row
            dtg = 1.0 - x - y - z - wq
            w.writerow([fmt(t), fmt(x), fmt(y), fmt(z), fmt(wq), fmt(dtg), fmt(a)])


def parse_trajectory_csv(path, params: GameParams | None = None, variant: str = "five") -> replicator.Trajectory:
    times = []
    states = []
    with open(path, newline="") as handle:
        for rec in csv.DictReader(handle):
            times.append(float(rec["t"]))
            states.append([float(rec[k]) for k in ("x", "y", "z", "w", "alpha")])
    return replicator.Trajectory(np.array(times), np.array(states), params or GameParams(), variant)


_QTRACE_COLUMNS = (
    ["episode"]
    + [f"user_{s.name}" for s in UserStrategy]
    + [f"creator_{s.name}" for s in CreatorStrategy]
    + ["creator_coop_fraction"]
)


def write_qtrace_csv(path, trace):
    """Learning trace rows: episode, per-strategy shares, creator coop."""
    with _open_out(Path(path)) as handle:
        w = _writer(handle)
        w.writerow(_QTRACE_COLUMNS)
        for i in range(trace.user_fractions.shape[0]):
            row = (
                [str(i + 1)]
                + [fmt(v) for v in trace.user_fractions[i]]
                + [fmt(v) for v in trace.creator_fractions[i]]
                + [fmt(trace.creator_fractions[i][0])]
            )
            w.writerow(row)


def parse_qtrace_csv(path):
    episodes = []
    user = []
    creator = []
    with open(path, newline="") as handle:
        for rec in csv.DictReader(handle):
            episodes.append(int(rec["episode"]))
            user.append([float(rec[f"user_{s.name}"]) for s in UserStrategy])
            creator.append([float(rec[f"creator_{s.name}"]) for s in CreatorStrategy])
    return np.array(episodes), np.array(user), np.array(creator)


def _format_complex(value: complex) -> str:
    sign = "+" if value.imag >= 0 else "-"
    return f"{fmt(value.real)}{sign}{fmt(abs(value.imag))}i"


def write_equilibria_csv(path, records):
    """Catalog rows: label, coords, feasibility, spectrum, stability."""
    with _open_out(Path(path)) as handle:
        w = _writer(handle)
        w.writerow(["label", "coords", "feasible", "reason", "eigenvalues", "stability"])
        for rec in records:
            coords = ";".join(fmt(c) for c in rec.coords)
            eigs = ";".join(_format_complex(e) for e in rec.eigenvalues)
            w.writerow([rec.label, coords, str(int(rec.feasible)), rec.reason, eigs, rec.stability])


def _write_meta(path: Path, command: str, params: GameParams, seed, files, extra=None):
    meta = {
        "command": command,
        "params": {f.name: getattr(params, f.name) for f in fields(params)},
        "seed": seed,
        "files": [str(f) for f in files],
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    if extra:
        meta.update(extra)
    with _open_out(path) as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write("\n")


# --- sweep driver -----------------------------------------------------------


def run_sweep(spec: SweepSpec, base_params: GameParams, base_cfg: FiniteConfig, workers: int = 1) -> list:
    """Execute the grid and write the mode's CSV artifacts plus a meta file.

    Returns the list of created paths; on any failure every partial output
    is removed before the error propagates.
    """
    out_dir = Path(spec.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}") from exc
    created: list = []
    try:
        if spec.mode == "finite":
            files = _run_finite_sweep(spec, base_params, base_cfg, out_dir, created, workers)
        elif spec.mode == "replicator":
            files = _run_replicator_sweep(spec, base_params, base_cfg, out_dir, created, workers)
        else:
            files = _run_qlearn_sweep(spec, base_params, base_cfg, out_dir, created, workers)
        return files
    except TrustDynError:
        for path in created:
            try:
                os.unlink(path)
            except OSError:
                pass
        raise


def _axes_names(spec: SweepSpec) -> list:
    names = [spec.axis1[0]]
    if spec.axis2 is not None:
        names.append(spec.axis2[0])
    return names


def _run_finite_sweep(spec, base_params, base_cfg, out_dir, created, workers):
    variants = {"both": (True, False), "with": (True,), "without": (False,)}[spec.trust_variants]
    extra_axes = [a for a in _axes_names(spec) if a not in ("eps", "v")]
    results = {}
    files = []
    for trust in variants:
        tasks = []
        for assignment in spec.points():
            params, cfg = _apply_axes(base_params, replace(base_cfg, trust_enabled=trust), assignment)
            tasks.append((params, cfg, assignment))
        rows = _dispatch(_finite_point, tasks, workers)
        results[trust] = rows
        suffix = "with_trust" if trust else "without_trust"
        path = out_dir / f"finite_{suffix}.csv"
        created.append(path)
        n_states = len(chain_states(replace(base_cfg, trust_enabled=trust)))
        write_finite_csv(path, rows, n_states, extra_axes)
        files.append(path)
    if spec.trust_variants == "both":
        diff_rows = []
        for with_row, without_row in zip(results[True], results[False]):
            diff_rows.append(
                {
                    "eps": with_row["eps"],
                    "v": with_row["v"],
                    "adoption_with": with_row["adoption_level"],
                    "adoption_without": without_row["adoption_level"],
                    "adoption_diff": with_row["adoption_level"] - without_row["adoption_level"],
                }
            )
        diff_path = out_dir / "adoption_diff.csv"
        created.append(diff_path)
        write_adoption_diff_csv(diff_path, diff_rows)
        files.append(diff_path)
    meta_path = out_dir / "finite_sweep.meta.json"
    _write_meta(
        meta_path,
        "sweep finite",
        base_params,
        spec.seed,
        files,
        extra={
            "axes": {spec.axis1[0]: [float(v) for v in spec.axis1[1]],
                     **({spec.axis2[0]: [float(v) for v in spec.axis2[1]]} if spec.axis2 else {})},
            "trust_variants": spec.trust_variants,
            "Z_u": base_cfg.Z_u,
            "Z_c": base_cfg.Z_c,
            "beta": base_cfg.beta,
        },
    )
    created.append(meta_path)
    return files + [meta_path]


def _run_replicator_sweep(spec, base_params, base_cfg, out_dir, created, workers):
    tasks = []
    for assignment in spec.points():
        params, _ = _apply_axes(base_params, base_cfg, assignment)
        tasks.append((params, spec, assignment))
    rows = _dispatch(_replicator_point, tasks, workers)
    files = []
    axes = _axes_names(spec)
    summary_path = out_dir / "replicator_summary.csv"
    created.append(summary_path)
    with _open_out(summary_path) as handle:
        w = _writer(handle)
        w.writerow(axes + ["x", "y", "z", "w", "dtg", "alpha", "alpha_tail_min", "alpha_tail_max", "trajectory_file"])
        for i, row in enumerate(rows):
            traj_path = out_dir / f"trajectory_{i:03d}.csv"
            created.append(traj_path)
            traj = replicator.Trajectory(row["times"], row["states"], base_params, spec.variant)
            write_trajectory_csv(traj_path, traj)
            files.append(traj_path)
            x, y, z, wq, a = row["final"]
            w.writerow(
                [fmt(row["assignment"][ax]) for ax in axes]
                + [fmt(x), fmt(y), fmt(z), fmt(wq), fmt(1.0 - x - y - z - wq), fmt(a)]
                + [fmt(row["alpha_tail_min"]), fmt(row["alpha_tail_max"]), traj_path.name]
            )
    files.append(summary_path)
    meta_path = out_dir / "replicator_sweep.meta.json"
    _write_meta(
        meta_path,
        "sweep replicator",
        base_params,
        spec.seed,
        files,
        extra={"variant": spec.variant, "dt": spec.dt, "t_end": spec.t_end, "record_every": spec.record_every},
    )
    created.append(meta_path)
    return files + [meta_path]


def _run_qlearn_sweep(spec, base_params, base_cfg, out_dir, created, workers):
    tasks = []
    for index, assignment in enumerate(spec.points()):
        params, _ = _apply_axes(base_params, base_cfg, assignment)
        qcfg = QConfig(
            learn_rate=spec.learn_rate,
            explore_rate=spec.explore_rate,
            pop_size=spec.pop_size,
            episodes=spec.episodes,
            runs=spec.runs,
            seed=spec.seed + index,
        )
        tasks.append((params, qcfg, assignment))
    rows = _dispatch(_qlearn_point, tasks, workers)
    files = []
    axes = _axes_names(spec)
    summary_path = out_dir / "qlearn_summary.csv"
    created.append(summary_path)
    with _open_out(summary_path) as handle:
        w = _writer(handle)
        w.writerow(
            axes
            + [f"user_{s.name}" for s in UserStrategy]
            + [f"creator_{s.name}" for s in CreatorStrategy]
            + ["creator_coop_fraction", "trace_file"]
        )
        for i, row in enumerate(rows):
            trace_path = out_dir / f"qtrace_{i:03d}.csv"
            created.append(trace_path)
            view = SimpleNamespace(
                user_fractions=row["user_fractions"],
                creator_fractions=row["creator_fractions"],
            )
            write_qtrace_csv(trace_path, view)
            created.append(trace_path)
            files.append(trace_path)
            w.writerow(
                [fmt(row["assignment"][ax]) for ax in axes]
                + [fmt(v) for v in row["final_user"]]
                + [fmt(v) for v in row["final_creator"]]
                + [fmt(row["final_creator"][0]), trace_path.name]
            )
    files.append(summary_path)
    meta_path = out_dir / "qlearn_sweep.meta.json"
    _write_meta(
        meta_path,
        "sweep qlearn",
        base_params,
        spec.seed,
        files,
        extra={
            "episodes": spec.episodes,
            "runs": spec.runs,
            "pop_size": spec.pop_size,
            "learn_rate": spec.learn_rate,
            "explore_rate": spec.explore_rate,
            "per_point_seeds": "seed + point index",
        },
    )
    created.append(meta_path)
    return files + [meta_path]
