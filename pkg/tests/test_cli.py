"""Command line, sweep artifacts, and CSV determinism."""

import json
import os
from pathlib import Path

import numpy as np
import pytest

from trustdyn import replicator
from trustdyn.cli import EXIT_CONFIG, EXIT_LEMMA, EXIT_OK, main
from trustdyn.errors import ConfigError
from trustdyn.finite import FiniteConfig
from trustdyn.game import GameParams
from trustdyn.sweeps import (
    SweepSpec,
    parse_finite_csv,
    parse_qtrace_csv,
    parse_trajectory_csv,
    run_sweep,
)


def read_bytes(path):
    return Path(path).read_bytes()


class TestConfigHandling:
    def test_config_file_plus_override(self, tmp_path, capsys):
        cfg = tmp_path / "base.cfg"
        cfg.write_text("eps = 0.3\nv = 1.0\n")
        out = tmp_path / "row.csv"
        rc = main(["finite", "--config", str(cfg), "--eps", "0.05", "--out", str(out)])
        assert rc == EXIT_OK
        rows = parse_finite_csv(out)
        assert rows[0]["eps"] == 0.05  # flag overrides file
        assert rows[0]["v"] == 1.0

    def test_unknown_config_key_exits_2(self, tmp_path):
        cfg = tmp_path / "base.cfg"
        cfg.write_text("epsilon = 0.3\n")
        assert main(["finite", "--config", str(cfg)]) == EXIT_CONFIG

    def test_bad_axis_exits_2(self, tmp_path):
        rc = main(["sweep", "--mode", "finite", "--axis1", "nonsense=1,2",
                   "--out", str(tmp_path / "o")])
        assert rc == EXIT_CONFIG

    def test_axis_without_equals_exits_2(self, tmp_path):
        rc = main(["sweep", "--mode", "finite", "--axis1", "eps",
                   "--out", str(tmp_path / "o")])
        assert rc == EXIT_CONFIG

    def test_bad_init_exits_2(self, tmp_path):
        rc = main(["replicator", "--init", "0.5,0.5", "--out", str(tmp_path / "t.csv")])
        assert rc == EXIT_CONFIG


class TestSeedHandling:
    def test_env_seed_overrides_flag(self, tmp_path, monkeypatch):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        out3 = tmp_path / "c.csv"
        args = ["qlearn", "--pop-size", "10", "--episodes", "50", "--runs", "1"]
        monkeypatch.setenv("TRUSTDYN_SEED", "77")
        assert main(args + ["--seed", "1", "--out", str(out1)]) == EXIT_OK
        monkeypatch.delenv("TRUSTDYN_SEED")
        assert main(args + ["--seed", "77", "--out", str(out2)]) == EXIT_OK
        assert main(args + ["--seed", "1", "--out", str(out3)]) == EXIT_OK
        assert read_bytes(out1) == read_bytes(out2)
        assert read_bytes(out1) != read_bytes(out3)

    def test_bad_env_seed_exits_2(self, tmp_path, monkeypatch):
        monkeypatch.setenv("TRUSTDYN_SEED", "not-a-number")
        rc = main(["qlearn", "--pop-size", "4", "--episodes", "5", "--runs", "1",
                   "--out", str(tmp_path / "t.csv")])
        assert rc == EXIT_CONFIG


class TestSweep:
    def test_finite_sweep_artifacts(self, tmp_path):
        out = tmp_path / "fin"
        rc = main([
            "sweep", "--mode", "finite", "--axis1", "eps=0:1:3", "--axis2", "v=0.1,1",
            "--trust", "both", "--out", str(out),
        ])
        assert rc == EXIT_OK
        with_csv = out / "finite_with_trust.csv"
        without_csv = out / "finite_without_trust.csv"
        diff_csv = out / "adoption_diff.csv"
        meta = out / "finite_sweep.meta.json"
        for f in (with_csv, without_csv, diff_csv, meta):
            assert f.exists()
        rows = parse_finite_csv(with_csv)
        assert len(rows) == 6
        assert len(rows[0]["stationary"]) == 10
        assert len(parse_finite_csv(without_csv)[0]["stationary"]) == 6
        # rows sorted by axis values
        assert [r["eps"] for r in rows] == sorted(r["eps"] for r in rows)
        # meta declares exactly the files that exist
        declared = json.loads(meta.read_text())["files"]
        for f in declared:
            assert Path(f).exists()

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["sweep", "--mode", "finite", "--axis1", "eps=0.1,0.9", "--trust", "with"]
        out1, out2 = tmp_path / "r1", tmp_path / "r2"
        assert main(args + ["--out", str(out1)]) == EXIT_OK
        assert main(args + ["--out", str(out2)]) == EXIT_OK
        body1 = read_bytes(out1 / "finite_with_trust.csv")
        assert body1 == read_bytes(out2 / "finite_with_trust.csv")
        assert b"\r" not in body1  # LF endings only

    def test_worker_pool_matches_serial(self, tmp_path):
        spec = dict(mode="finite", axis1=("eps", (0.1, 0.5, 0.9)), axis2=None, trust_variants="with")
        serial = run_sweep(SweepSpec(output_dir=str(tmp_path / "s"), **spec), GameParams(), FiniteConfig(), workers=1)
        pooled = run_sweep(SweepSpec(output_dir=str(tmp_path / "p"), **spec), GameParams(), FiniteConfig(), workers=3)
        assert read_bytes(serial[0]) == read_bytes(pooled[0])

    def test_replicator_sweep_round_trip(self, tmp_path):
        out = tmp_path / "rep"
        rc = main([
            "sweep", "--mode", "replicator", "--axis1", "eps=0,1", "--t-end", "2",
            "--record-every", "10", "--out", str(out),
        ])
        assert rc == EXIT_OK
        traj = parse_trajectory_csv(out / "trajectory_000.csv")
        assert isinstance(traj, replicator.Trajectory)
        assert traj.times[-1] == pytest.approx(2.0)
        assert traj.states.shape[1] == 5

    def test_qlearn_sweep_round_trip(self, tmp_path):
        out = tmp_path / "q"
        rc = main([
            "sweep", "--mode", "qlearn", "--axis1", "eps=0,2", "--episodes", "40",
            "--runs", "2", "--pop-size", "10", "--seed", "3", "--out", str(out),
        ])
        assert rc == EXIT_OK
        episodes, user, creator = parse_qtrace_csv(out / "qtrace_000.csv")
        assert episodes[0] == 1 and episodes[-1] == 40
        assert np.allclose(user.sum(axis=1), 1.0, atol=1e-9)

    def test_single_axis_degenerate_grid(self, tmp_path):
        out = tmp_path / "single"
        rc = main(["sweep", "--mode", "finite", "--axis1", "v=0.5", "--trust", "without",
                   "--out", str(out)])
        assert rc == EXIT_OK
        assert len(parse_finite_csv(out / "finite_without_trust.csv")) == 1

    def test_partial_outputs_removed_on_failure(self, tmp_path, monkeypatch):
        # make the diff write fail after the two variant CSVs succeeded
        import trustdyn.sweeps as sweeps_mod

        def boom(*args, **kwargs):
            raise ConfigError("forced failure")

        monkeypatch.setattr(sweeps_mod, "write_adoption_diff_csv", boom)
        out = tmp_path / "fail"
        spec = SweepSpec(mode="finite", axis1=("eps", (0.1,)), axis2=None,
                         trust_variants="both", output_dir=str(out))
        with pytest.raises(ConfigError):
            run_sweep(spec, GameParams(), FiniteConfig())
        assert not (out / "finite_with_trust.csv").exists()
        assert not (out / "finite_without_trust.csv").exists()


class TestTrajectoryCommand:
    def test_writes_csv_with_schema(self, tmp_path):
        out = tmp_path / "traj.csv"
        rc = main(["replicator", "--t-end", "1", "--record-every", "10", "--out", str(out)])
        assert rc == EXIT_OK
        header = out.read_text().splitlines()[0]
        assert header == "t,x,y,z,w,dtg,alpha"

    def test_rerun_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert main(["replicator", "--t-end", "1", "--out", str(out)]) == EXIT_OK
        assert read_bytes(a) == read_bytes(b)


class TestEquilibriaCommand:
    def test_reports_and_exits_zero(self, tmp_path, capsys):
        out = tmp_path / "eq.csv"
        rc = main(["equilibria", "--v", "1.0", "--out", str(out)])
        assert rc == EXIT_OK
        text = capsys.readouterr().out
        assert "desirable equilibrium" in text  # p9 stable at c < v
        assert out.exists()
        header = out.read_text().splitlines()[0]
        assert header == "label,coords,feasible,reason,eigenvalues,stability"

    def test_lemma_disagreement_exits_4(self, monkeypatch):
        import trustdyn.cli as cli_mod

        def wrong_expectations(params, variant="five"):
            return {"p4": params.mu > 0}  # deliberately inverted

        monkeypatch.setattr(cli_mod.replicator, "lemma_expectations", wrong_expectations)
        rc = main(["equilibria", "--flow", "five"])
        assert rc == EXIT_LEMMA

    def test_grid_flag_runs_cross_check(self, capsys):
        rc = main(["equilibria", "--flow", "three", "--grid"])
        assert rc == EXIT_OK
        assert "grid cross-check (three)" in capsys.readouterr().out


class TestQlearnCommand:
    def test_qtrace_schema(self, tmp_path):
        out = tmp_path / "t.csv"
        rc = main(["qlearn", "--pop-size", "10", "--episodes", "20", "--runs", "1",
                   "--out", str(out)])
        assert rc == EXIT_OK
        header = out.read_text().splitlines()[0]
        assert header == ("episode,user_AllA,user_AllN,user_TFT,user_TUA,user_DtG,"
                          "creator_C,creator_D,creator_coop_fraction")
