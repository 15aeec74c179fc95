"""End-to-end figure regeneration from real simulator CSV artifacts.

Drives the primary toolkit through its command line (the only interface
this package consumes), reruns the sweep/trajectory/learning settings the
panel figures are built from, and checks the rendered grids.
"""

import subprocess
import sys
import time

import pytest

from figscripts.render import FigureRecipe, render

SEED = "20260810"


def _trustdyn(*args):
    return subprocess.run(
        [sys.executable, "-m", "trustdyn.cli", *args],
        capture_output=True,
        text=True,
    )


def _have_primary():
    return _trustdyn("--version").returncode == 0


pytestmark = pytest.mark.skipif(not _have_primary(), reason="trustdyn CLI not installed")


def test_criterion_9_panel_layouts(tmp_path):
    t0 = time.time()
    # stationary-distribution sweep: checking-cost axis, three punishment rows
    sweep_dir = tmp_path / "sweep"
    proc = _trustdyn(
        "sweep", "--mode", "finite", "--axis1", "eps=0:1:21", "--axis2", "v=0.1,0.5,1",
        "--trust", "both", "--out", str(sweep_dir),
    )
    assert proc.returncode == 0, proc.stderr

    # three trajectories across the checking-cost columns
    traj_paths = []
    for i, eps in enumerate(("0", "0.5", "1")):
        out = tmp_path / f"traj_{i}.csv"
        proc = _trustdyn(
            "replicator", "--eps", eps, "--t-end", "500", "--record-every", "10",
            "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        traj_paths.append(str(out))

    # four learning traces across the checking-cost columns
    trace_paths = []
    for i, eps in enumerate(("0", "1", "1.5", "2")):
        out = tmp_path / f"trace_{i}.csv"
        proc = _trustdyn(
            "qlearn", "--eps", eps, "--episodes", "5000", "--runs", "10",
            "--pop-size", "100", "--seed", SEED, "--out", str(out),
        )
        assert proc.returncode == 0, proc.stderr
        trace_paths.append(str(out))

    fig2 = render(
        FigureRecipe(
            "fig2",
            str(tmp_path / "fig2.png"),
            {
                "without_csv": str(sweep_dir / "finite_without_trust.csv"),
                "with_csv": str(sweep_dir / "finite_with_trust.csv"),
                "diff_csv": str(sweep_dir / "adoption_diff.csv"),
            },
        )
    )
    assert (fig2.nrows, fig2.ncols) == (3, 3)

    fig4 = render(
        FigureRecipe(
            "fig4",
            str(tmp_path / "fig4.png"),
            {"trajectories": ",".join(traj_paths), "labels": "cost 0,cost 0.5,cost 1"},
        )
    )
    assert (fig4.nrows, fig4.ncols) == (2, 3)

    fig5 = render(
        FigureRecipe(
            "fig5",
            str(tmp_path / "fig5.png"),
            {"traces": ",".join(trace_paths), "labels": "cost 0,cost 1,cost 1.5,cost 2"},
        )
    )
    assert (fig5.nrows, fig5.ncols) == (2, 4)
    print(f"[PASS] criterion 9: fig2/fig4/fig5 regenerated as 3x3, 2x3, 2x4 ({time.time() - t0:.1f}s)")
