"""Timing comparison of the compiled kernels against the pure-Python twins.

Run as ``python benchmarks/bench_backends.py``.  Both backends consume the
same random stream, so the outputs are asserted identical while timing.
"""

import time

import numpy as np

from trustdyn import _kernels_py as pure
from trustdyn.finite import FiniteConfig
from trustdyn.game import GameParams, build_payoff_table

try:
    from trustdyn import _kernels as compiled
except ImportError:
    compiled = None


def timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def bench(name, fn_name, args):
    pure_fn = getattr(pure, fn_name)
    ref, t_pure = timed(pure_fn, *args())
    if compiled is None:
        print(f"{name:<26s} pure {t_pure * 1e3:9.1f} ms   (compiled kernels not built)")
        return
    got, t_comp = timed(getattr(compiled, fn_name), *args())
    same = (
        ref == got
        if np.isscalar(ref)
        else all(np.array_equal(a, b) for a, b in zip(ref, got))
    )
    speedup = t_pure / t_comp if t_comp > 0 else float("inf")
    print(
        f"{name:<26s} pure {t_pure * 1e3:9.1f} ms   compiled {t_comp * 1e3:8.1f} ms"
        f"   x{speedup:6.1f}   identical={same}"
    )
    assert same, f"{name}: backend outputs differ"


def main():
    params = GameParams()
    table = build_payoff_table(params)
    cfg = FiniteConfig(Z_u=10, Z_c=10, beta=0.1)

    deltas = np.full(cfg.Z_u - 1, 0.4)
    bench(
        "invasion walks (2e5)",
        "fixation_walk_trials",
        lambda: (deltas, cfg.beta, 200_000, np.random.PCG64(1)),
    )

    u0 = np.array([10, 0, 0, 0, 0], dtype=np.int64)
    c0 = np.array([10, 0], dtype=np.int64)
    bench(
        "mutation-selection (1e6)",
        "mutation_selection_run",
        lambda: (
            table.user_payoff, table.creator_payoff, cfg.beta, 1e-3,
            1_000_000, 10, 10, u0, c0, 100, np.random.PCG64(2),
        ),
    )

    bench(
        "q-learning (1k eps x 100)",
        "qlearn_run",
        lambda: (
            table.user_payoff, table.creator_payoff, 100, 1000,
            0.05, 0.05, False, np.random.PCG64(3), None,
        ),
    )


if __name__ == "__main__":
    main()
