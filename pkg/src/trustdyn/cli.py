"""Command-line front end.

Subcommands: ``finite`` (monomorphic-chain analysis at one parameter
point), ``replicator`` (trajectory integration), ``qlearn`` (learning
experiment), ``equilibria`` (catalog report with stability cross-checks),
``sweep`` (parameter grids reproducing the figure inputs).  Game
parameters come from an optional key=value config file; every key can be
overridden by a flag of the same name.  The environment variable
TRUSTDYN_SEED overrides the configured seed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 stability-condition disagreement in ``equilibria``.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import replicator, sweeps
from .errors import ConfigError, NumericalError, TrustDynError
from .finite import FiniteConfig, build_chain, chain_metrics, risk_dominance_report
from .game import PARAM_KEYS, GameParams, UserStrategy, load_params
from .qlearn import QConfig, run_experiment
from .sweeps import SweepSpec, run_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_LEMMA = 4

_INT_PARAMS = {"theta_T", "theta_D", "r"}


def _add_param_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="key=value parameter file")
    for key in PARAM_KEYS:
        kind = int if key in _INT_PARAMS else float
        parser.add_argument(f"--{key}", type=kind, default=None, help=f"override {key}")


def _resolve_params(args) -> GameParams:
    params = load_params(args.config) if args.config else GameParams()
    overrides = {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k, None) is not None}
    try:
        return params.replace(**overrides) if overrides else params
    except TrustDynError as exc:
        raise ConfigError(str(exc)) from exc


def _resolve_seed(args) -> int:
    env = os.environ.get("TRUSTDYN_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"TRUSTDYN_SEED must be an integer, got {env!r}") from exc
    return args.seed


def _parse_axis(text: str):
    """Axis spec: 'name=v1,v2,...' or 'name=start:stop:num' (inclusive)."""
    if "=" not in text:
        raise ConfigError(f"axis spec must look like name=values, got {text!r}")
    name, _, values = text.partition("=")
    name = name.strip()
    values = values.strip()
    try:
        if ":" in values:
            start, stop, num = values.split(":")
            grid = np.linspace(float(start), float(stop), int(num))
            return (name, tuple(float(v) for v in grid))
        return (name, tuple(float(v) for v in values.split(",")))
    except ValueError as exc:
        raise ConfigError(f"bad axis values in {text!r}: {exc}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trustdyn",
        description="Evolutionary and learning dynamics of the repeated user-creator trust game",
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fin = sub.add_parser("finite", help="monomorphic-chain stationary analysis at one point")
    _add_param_flags(p_fin)
    p_fin.add_argument("--Z_u", type=int, default=100)
    p_fin.add_argument("--Z_c", type=int, default=100)
    p_fin.add_argument("--beta", type=float, default=0.1)
    p_fin.add_argument("--trust", choices=("with", "without"), default="with")
    p_fin.add_argument("--risk-report", action="store_true", help="also print the risk-dominance conditions")
    p_fin.add_argument("--out", help="write the single-row sweep-schema CSV here")
    p_fin.set_defaults(func=_cmd_finite)

    p_rep = sub.add_parser("replicator", help="integrate one replicator trajectory")
    _add_param_flags(p_rep)
    p_rep.add_argument("--flow", choices=replicator.VARIANTS, default="five", dest="variant")
    p_rep.add_argument("--dt", type=float, default=0.01)
    p_rep.add_argument("--t-end", type=float, default=500.0)
    p_rep.add_argument("--record-every", type=int, default=1)
    p_rep.add_argument("--init", help="initial state x,y,z,w,alpha (default: uniform users, alpha=0.5)")
    p_rep.add_argument("--out", default="trajectory.csv")
    p_rep.set_defaults(func=_cmd_replicator)

    p_q = sub.add_parser("qlearn", help="two-population Q-learning experiment")
    _add_param_flags(p_q)
    p_q.add_argument("--learn-rate", type=float, default=0.05)
    p_q.add_argument("--explore-rate", type=float, default=0.05)
    p_q.add_argument("--pop-size", type=int, default=100)
    p_q.add_argument("--episodes", type=int, default=5000)
    p_q.add_argument("--runs", type=int, default=10)
    p_q.add_argument("--seed", type=int, default=0)
    p_q.add_argument("--sampled-census", action="store_true",
                     help="census sampled actions instead of greedy ones")
    p_q.add_argument("--out", default="qtrace.csv")
    p_q.set_defaults(func=_cmd_qlearn)

    p_eq = sub.add_parser("equilibria", help="equilibrium catalog, stability, and lemma cross-checks")
    _add_param_flags(p_eq)
    p_eq.add_argument("--flow", choices=("five", "three", "both"), default="both", dest="variant")
    p_eq.add_argument("--grid", action="store_true",
                      help="also run the (c, v, mu-sign) grid cross-check of the stability conditions")
    p_eq.add_argument("--out", help="write the catalog CSV here")
    p_eq.set_defaults(func=_cmd_equilibria)

    p_sw = sub.add_parser("sweep", help="Cartesian parameter sweep writing CSV artifacts")
    _add_param_flags(p_sw)
    p_sw.add_argument("--mode", choices=sweeps.MODES, required=True)
    p_sw.add_argument("--axis1", required=True, help="e.g. eps=0:1:21 or v=0.1,0.5,1")
    p_sw.add_argument("--axis2", help="optional second axis")
    p_sw.add_argument("--trust", choices=sweeps.TRUST_VARIANTS, default="both")
    p_sw.add_argument("--Z_u", type=int, default=100)
    p_sw.add_argument("--Z_c", type=int, default=100)
    p_sw.add_argument("--beta", type=float, default=0.1)
    p_sw.add_argument("--flow", choices=replicator.VARIANTS, default="five", dest="variant")
    p_sw.add_argument("--dt", type=float, default=0.01)
    p_sw.add_argument("--t-end", type=float, default=500.0)
    p_sw.add_argument("--record-every", type=int, default=1)
    p_sw.add_argument("--episodes", type=int, default=5000)
    p_sw.add_argument("--runs", type=int, default=10)
    p_sw.add_argument("--pop-size", type=int, default=100)
    p_sw.add_argument("--learn-rate", type=float, default=0.05)
    p_sw.add_argument("--explore-rate", type=float, default=0.05)
    p_sw.add_argument("--seed", type=int, default=0)
    p_sw.add_argument("--workers", type=int, default=1)
    p_sw.add_argument("--out", default="sweep_out", help="output directory")
    p_sw.set_defaults(func=_cmd_sweep)
    return parser


def _cmd_finite(args) -> int:
    params = _resolve_params(args)
    cfg = FiniteConfig(Z_u=args.Z_u, Z_c=args.Z_c, beta=args.beta, trust_enabled=args.trust == "with")
    chain = build_chain(params, cfg)
    coop, adoption = chain_metrics(chain)
    print(f"states ({len(chain.states)}):")
    for state, mass in zip(chain.states, chain.stationary):
        print(f"  {state.label:<10s} {mass:.6f}")
    print(f"coop_freq      {coop:.6f}")
    print(f"adoption_level {adoption:.6f}")
    if args.risk_report:
        print("risk-dominance conditions:")
        for num, label, cond, holds in risk_dominance_report(params):
            print(f"  {num:>2d} {label:<22s} {cond:<40s} {holds}")
    if args.out:
        row = {
            "eps": params.eps,
            "v": params.v,
            "trust_enabled": cfg.trust_enabled,
            "stationary": tuple(chain.stationary),
            "coop_freq": coop,
            "adoption_level": adoption,
            "assignment": {},
        }
        sweeps.write_finite_csv(args.out, [row], len(chain.states))
        print(f"wrote {args.out}")
    return EXIT_OK


def _parse_init(text: str) -> replicator.ReplicatorState:
    try:
        parts = [float(v) for v in text.split(",")]
        if len(parts) != 5:
            raise ValueError("need exactly 5 values")
        return replicator.ReplicatorState(*parts)
    except (ValueError, TrustDynError) as exc:
        raise ConfigError(f"bad --init {text!r}: {exc}") from exc


def _cmd_replicator(args) -> int:
    params = _resolve_params(args)
    initial = _parse_init(args.init) if args.init else replicator.uniform_state(args.variant)
    traj = replicator.integrate(
        initial, params, args.variant, dt=args.dt, t_end=args.t_end, record_every=args.record_every
    )
    sweeps.write_trajectory_csv(args.out, traj)
    lo, hi = replicator.trailing_alpha_range(traj)
    x, y, z, w, a = traj.states[-1]
    print(f"final state: x={x:.6f} y={y:.6f} z={z:.6f} w={w:.6f} dtg={1-x-y-z-w:.6f} alpha={a:.6f}")
    print(f"trailing alpha range: [{lo:.6f}, {hi:.6f}]")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_qlearn(args) -> int:
    params = _resolve_params(args)
    cfg = QConfig(
        learn_rate=args.learn_rate,
        explore_rate=args.explore_rate,
        pop_size=args.pop_size,
        episodes=args.episodes,
        runs=args.runs,
        seed=_resolve_seed(args),
        sampled_census=args.sampled_census,
    )
    trace = run_experiment(params, cfg)
    sweeps.write_qtrace_csv(args.out, trace)
    final_u = trace.user_fractions[-1]
    print("final user shares: " + " ".join(f"{s.name}={final_u[s]:.3f}" for s in UserStrategy))
    print(f"final creator cooperation: {trace.creator_coop[-1]:.3f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _equilibria_for_variant(params: GameParams, variant: str):
    records = replicator.classified_catalog(params, variant)
    expectations = replicator.lemma_expectations(params, variant)
    disagreements = 0
    print(f"--- {variant}-strategy flow ---")
    for rec in records:
        line = f"{rec.label:<4s} feasible={int(rec.feasible)} stability={rec.stability or '-':<22s}"
        if rec.label in expectations:
            want = expectations[rec.label]
            got = rec.stability == replicator.STABLE
            verdict = "ok" if want == got else "DISAGREES"
            if want != got:
                disagreements += 1
            line += f" expected_stable={want} [{verdict}]"
        if rec.label in ("p9", "q6") and rec.stability == replicator.STABLE:
            line += "  <- desirable equilibrium (safe development, wide adoption)"
        if not rec.feasible:
            line += f"  ({rec.reason})"
        print(line)
    return records, disagreements


def _cmd_equilibria(args) -> int:
    params = _resolve_params(args)
    variants = ("five", "three") if args.variant == "both" else (args.variant,)
    total_disagreements = 0
    all_records = []
    for variant in variants:
        records, disagreements = _equilibria_for_variant(params, variant)
        total_disagreements += disagreements
        all_records.extend(records)
    if args.grid:
        for variant in variants:
            rows = replicator.lemma_grid_check(params, variant)
            bad = [r for r in rows if not r["agrees"]]
            total_disagreements += len(bad)
            print(f"grid cross-check ({variant}): {len(rows) - len(bad)}/{len(rows)} agree")
            for r in bad:
                print(f"  DISAGREES at c={r['c']} v={r['v']} mu={r['mu']}: "
                      f"{r['label']} classified {r['classified']}, expected stable={r['expected_stable']}")
    if args.out:
        sweeps.write_equilibria_csv(args.out, all_records)
        print(f"wrote {args.out}")
    if total_disagreements:
        print(f"{total_disagreements} stability-condition disagreement(s)")
        return EXIT_LEMMA
    return EXIT_OK


def _cmd_sweep(args) -> int:
    params = _resolve_params(args)
    cfg = FiniteConfig(Z_u=args.Z_u, Z_c=args.Z_c, beta=args.beta)
    spec = SweepSpec(
        mode=args.mode,
        axis1=_parse_axis(args.axis1),
        axis2=_parse_axis(args.axis2) if args.axis2 else None,
        trust_variants=args.trust,
        output_dir=args.out,
        seed=_resolve_seed(args),
        dt=args.dt,
        t_end=args.t_end,
        record_every=args.record_every,
        variant=args.variant,
        episodes=args.episodes,
        runs=args.runs,
        pop_size=args.pop_size,
        learn_rate=args.learn_rate,
        explore_rate=args.explore_rate,
    )
    files = run_sweep(spec, params, cfg, workers=args.workers)
    for path in files:
        print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except TrustDynError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
