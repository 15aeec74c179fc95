"""Replicator flows: right-hand sides, integration, equilibria, stability."""

import math

import numpy as np
import pytest

from trustdyn.errors import InvalidParamsError, NumericalError
from trustdyn.game import GameParams
from trustdyn import replicator as rep
from trustdyn.eigen import multiset_distance

FIG_PARAMS = GameParams()  # v=0.1, c=0.5, mu=-0.2


def _random_params(rng):
    r = int(rng.integers(1, 21))
    return GameParams(
        b_u=rng.uniform(0.5, 8), b_c=rng.uniform(0.5, 8),
        c=rng.uniform(0, 2), v=rng.uniform(0, 2),
        mu=rng.uniform(-3, 1), eps=rng.uniform(0, 2),
        p_T=rng.uniform(0, 1), p_D=rng.uniform(0, 1),
        theta_T=int(rng.integers(0, r + 1)), theta_D=int(rng.integers(0, r + 1)), r=r,
    )


class TestRhs:
    def test_monomorphic_corners_are_fixed_points(self):
        for i in range(5):
            freqs = [0.0] * 4
            if i < 4:
                freqs[i] = 1.0
            for alpha in (0.0, 1.0):
                state = rep.ReplicatorState(freqs[0], freqs[1], freqs[2], freqs[3], alpha)
                assert np.max(np.abs(rep.rhs(state, FIG_PARAMS, "five"))) == 0.0

    def test_alpha_boundary_freezes_creators(self):
        rng = np.random.default_rng(0)
        for alpha in (0.0, 1.0):
            f = rng.dirichlet(np.ones(5))
            state = rep.ReplicatorState(f[0], f[1], f[2], f[3], alpha)
            assert rep.rhs(state, FIG_PARAMS, "five")[4] == 0.0

    def test_mixed_equilibrium_coordinates_are_fixed(self):
        # x=c/v, y=(v-c)/v, alpha=mu/(mu-1) with c=0.5, v=1, mu=-0.2
        p = FIG_PARAMS.replace(v=1.0)
        state = rep.ReplicatorState(0.5, 0.5, 0.0, 0.0, 1.0 / 6.0)
        assert np.max(np.abs(rep.rhs(state, p, "five"))) < 1e-10

    def test_off_simplex_rejected(self):
        state = rep.ReplicatorState(0.5, 0.5, 0.0, 0.0, 0.5)
        object.__setattr__(state, "x", 0.6)  # push the sum past 1 + 1e-9
        with pytest.raises(InvalidParamsError):
            rep.rhs(state, FIG_PARAMS, "five")

    def test_three_variant_requires_empty_trust_coordinates(self):
        state = rep.ReplicatorState(0.2, 0.2, 0.2, 0.2, 0.5)
        with pytest.raises(InvalidParamsError):
            rep.rhs(state, FIG_PARAMS, "three")

    def test_double_entry_generic_vs_transcribed(self):
        rng = np.random.default_rng(17)
        for _ in range(1000):
            p = _random_params(rng)
            f = rng.dirichlet(np.ones(5))
            a = float(rng.uniform(0, 1))
            vec5 = (f[0], f[1], f[2], f[3], a)
            d5 = np.array(rep._rhs_five(vec5, p)) - np.array(rep._explicit_five(vec5, p))
            assert np.max(np.abs(d5)) < 1e-10
            g = rng.dirichlet(np.ones(3))
            vec3 = (g[0], g[1], a)
            d3 = np.array(rep._rhs_three(vec3, p)) - np.array(rep._explicit_three(vec3, p))
            assert np.max(np.abs(d3)) < 1e-10


class TestIntegrate:
    def test_corner_initial_state_stays_put(self):
        state = rep.ReplicatorState(1.0, 0.0, 0.0, 0.0, 1.0)
        traj = rep.integrate(state, FIG_PARAMS, "five", dt=0.01, t_end=2.0)
        assert np.allclose(traj.states, traj.states[0], rtol=0, atol=0)

    def test_face_invariance(self):
        # a frequency starting at exactly zero never becomes positive
        state = rep.ReplicatorState(0.4, 0.0, 0.3, 0.3, 0.5)
        traj = rep.integrate(state, FIG_PARAMS, "five", dt=0.01, t_end=50.0)
        assert np.all(traj.states[:, 1] == 0.0)

    def test_simplex_conservation(self):
        traj = rep.integrate(rep.uniform_state("five"), FIG_PARAMS, "five", dt=0.01, t_end=100.0)
        assert np.all(traj.states[:, :4] >= 0.0)
        assert np.all(traj.states[:, :4] <= 1.0)
        sums = traj.states[:, :4].sum(axis=1)
        assert np.all(sums <= 1.0 + 1e-9)
        assert np.all(traj.dtg >= -1e-12)

    def test_fourth_order_error_decay(self):
        # halving dt shrinks the endpoint error by ~2^4
        p = FIG_PARAMS.replace(eps=0.3)
        start = rep.uniform_state("five")
        ref = rep.integrate(start, p, "five", dt=0.0005, t_end=2.0).states[-1]
        errors = []
        for dt in (0.2, 0.1, 0.05):
            end = rep.integrate(start, p, "five", dt=dt, t_end=2.0).states[-1]
            errors.append(np.max(np.abs(end - ref)))
        assert errors[0] / errors[1] > 10
        assert errors[1] / errors[2] > 10

    def test_record_every_thins_output(self):
        traj = rep.integrate(rep.uniform_state("five"), FIG_PARAMS, "five", dt=0.01, t_end=1.0, record_every=10)
        assert len(traj.times) == 11
        assert traj.times[1] == pytest.approx(0.1)

    def test_blow_up_detected(self):
        with pytest.raises(NumericalError):
            rep.integrate(rep.uniform_state("five"), FIG_PARAMS, "five", dt=50.0, t_end=500.0)

    def test_bad_dt_rejected(self):
        with pytest.raises(InvalidParamsError):
            rep.integrate(rep.uniform_state("five"), FIG_PARAMS, "five", dt=0.0)

    def test_three_variant_keeps_trust_coordinates_zero(self):
        traj = rep.integrate(rep.uniform_state("three"), FIG_PARAMS, "three", dt=0.01, t_end=10.0)
        assert np.all(traj.states[:, 3] == 0.0)
        assert np.allclose(traj.dtg, 0.0, atol=1e-12)


class TestCatalog:
    def test_candidate_counts(self):
        assert len(rep.equilibrium_catalog(FIG_PARAMS, "five")) == 17
        assert len(rep.equilibrium_catalog(FIG_PARAMS, "three")) == 8

    def test_never_adopt_corner_always_feasible(self):
        for p in (FIG_PARAMS, FIG_PARAMS.replace(mu=0.9, v=2.0, eps=1.7)):
            rec = {r.label: r for r in rep.equilibrium_catalog(p, "five")}["p4"]
            assert rec.feasible
            assert rec.coords == (0.0, 1.0, 0.0, 0.0, 0.0)

    def test_interior_mix_feasibility(self):
        p = FIG_PARAMS.replace(v=1.0)
        rec = {r.label: r for r in rep.equilibrium_catalog(p, "five")}["p12"]
        assert rec.feasible
        assert rec.coords == pytest.approx((0.5, 0.5, 0.0, 0.0, 1.0 / 6.0))
        rec = {r.label: r for r in rep.equilibrium_catalog(FIG_PARAMS, "five")}["p12"]
        assert not rec.feasible  # c > v here

    def test_outside_candidates_never_feasible(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            p = _random_params(rng)
            cat = {r.label: r for r in rep.equilibrium_catalog(p, "five")}
            for label in ("p15", "p16", "p17"):
                assert not cat[label].feasible

    def test_feasible_points_are_numerical_fixed_points(self):
        for p in (FIG_PARAMS, FIG_PARAMS.replace(eps=0.5), FIG_PARAMS.replace(v=1.0), FIG_PARAMS.replace(mu=0.2)):
            for variant in ("five", "three"):
                for rec in rep.equilibrium_catalog(p, variant):
                    if not rec.feasible:
                        continue
                    points = rec.samples if rec.is_set else (rec.coords,)
                    for coords in points:
                        vec = rep._reduced_vector(coords, variant)
                        resid = np.max(np.abs(rep._rhs_raw(vec, p, variant)))
                        assert resid < 1e-9, (rec.label, p)

    def test_infeasible_record_has_no_state(self):
        rec = {r.label: r for r in rep.equilibrium_catalog(FIG_PARAMS, "five")}["p15"]
        with pytest.raises(InvalidParamsError):
            rec.state()


class TestStability:
    def _classified(self, params, variant="five"):
        return {r.label: r for r in rep.classified_catalog(params, variant)}

    def test_no_adoption_stable_iff_harmful_risk(self):
        assert self._classified(FIG_PARAMS)["p4"].stability == rep.STABLE
        assert self._classified(FIG_PARAMS.replace(mu=0.2))["p4"].stability == rep.UNSTABLE

    def test_safe_adoption_stable_iff_punishment_beats_cost(self):
        assert self._classified(FIG_PARAMS.replace(v=1.0))["p9"].stability == rep.STABLE
        assert self._classified(FIG_PARAMS)["p9"].stability == rep.UNSTABLE

    def test_unsafe_adoption_stable_for_beneficial_risk_and_weak_punishment(self):
        assert self._classified(FIG_PARAMS.replace(mu=0.2))["p5"].stability == rep.STABLE
        assert self._classified(FIG_PARAMS.replace(mu=0.2, v=1.0))["p5"].stability == rep.UNSTABLE

    def test_families_are_degenerate(self):
        cat = self._classified(FIG_PARAMS.replace(eps=0.5))
        assert cat["p1"].stability == rep.DEGENERATE
        assert cat["p2"].stability == rep.DEGENERATE

    def test_infeasible_records_carry_no_verdict(self):
        cat = self._classified(FIG_PARAMS)
        assert cat["p15"].stability == rep.INFEASIBLE
        assert cat["p15"].eigenvalues == ()

    def test_three_strategy_conditions(self):
        cat3 = self._classified(FIG_PARAMS, "three")
        assert cat3["q2"].stability == rep.STABLE  # mu < 0
        cat3 = self._classified(FIG_PARAMS.replace(mu=0.2), "three")
        assert cat3["q3"].stability == rep.STABLE  # mu > 0, v < c
        cat3 = self._classified(FIG_PARAMS.replace(v=1.0), "three")
        assert cat3["q6"].stability == rep.STABLE  # c < v

    def test_numeric_spectrum_matches_closed_forms(self):
        # rows p1..p12 of the closed-form eigenvalue table, evaluated with
        # principal-branch square roots, against the finite-difference
        # Jacobian spectrum (in-house solver and numpy oracle)
        for p in (FIG_PARAMS.replace(eps=0.5), FIG_PARAMS.replace(eps=0.1, v=1.0)):
            cat = {r.label: r for r in rep.equilibrium_catalog(p, "five")}
            for i in range(1, 13):
                label = f"p{i}"
                closed = rep.tabulated_eigenvalues(label, p)
                assert closed is not None
                rec = cat[label]
                points = rec.samples if rec.is_set else (rec.coords,)
                for coords in points:
                    jac = rep.numeric_jacobian(coords, p, "five")
                    from trustdyn.eigen import eigenvalues
                    mine = eigenvalues(jac)
                    oracle = np.linalg.eigvals(jac)
                    assert multiset_distance(mine, oracle) < 1e-8
                    assert multiset_distance(closed, mine) < 1e-6, label

    def test_no_closed_form_for_late_rows(self):
        assert rep.tabulated_eigenvalues("p13", FIG_PARAMS) is None
        assert rep.tabulated_eigenvalues("p17", FIG_PARAMS) is None

    def test_lemma_grid_agrees_everywhere(self):
        for variant in ("five", "three"):
            rows = rep.lemma_grid_check(FIG_PARAMS, variant,
                                        c_values=(0.1, 0.5, 0.9), v_values=(0.15, 0.55, 0.95))
            assert all(r["agrees"] for r in rows)

    def test_three_strategy_lemma_examples(self):
        rows = rep.three_strategy_lemma_check(FIG_PARAMS, c_values=(0.5,), v_values=(0.1,), mu_values=(-0.2,))
        verdicts = {r["label"]: r for r in rows}
        assert verdicts["q2"]["classified"] == rep.STABLE
        assert all(r["agrees"] for r in rows)


class TestTrajectoryHelpers:
    def test_trailing_alpha_range(self):
        times = np.linspace(0, 10, 101)
        states = np.zeros((101, 5))
        states[:, 4] = np.linspace(0, 1, 101)
        traj = rep.Trajectory(times, states, FIG_PARAMS, "five")
        lo, hi = rep.trailing_alpha_range(traj, fraction=0.2)
        assert lo == pytest.approx(0.8)
        assert hi == pytest.approx(1.0)

    def test_uniform_states(self):
        s5 = rep.uniform_state("five")
        assert s5.dtg_freq == pytest.approx(0.2)
        s3 = rep.uniform_state("three")
        assert s3.z == pytest.approx(1 / 3)
        assert s3.w == 0.0
