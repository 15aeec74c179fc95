"""Q-learning agents, the epsilon-greedy policy, and experiment runs."""

import numpy as np
import pytest

from trustdyn.errors import InvalidParamsError
from trustdyn.game import CreatorStrategy as C, GameParams, UserStrategy as U, build_payoff_table
from trustdyn.qlearn import (
    LearningTrace,
    QAgent,
    QConfig,
    action_probabilities,
    run_experiment,
    select_action,
    update_q,
)

FIG_PARAMS = GameParams()


class TestPolicy:
    def test_unique_maximiser_probabilities(self):
        agent = QAgent(np.array([0.0, 0.0, 3.0, 0.0, 0.0]), "user")
        probs = action_probabilities(agent, 0.05)
        assert probs[2] == pytest.approx(0.05 / 5 + 0.95)
        for k in (0, 1, 3, 4):
            assert probs[k] == pytest.approx(0.01)

    def test_pure_exploration_is_uniform(self):
        agent = QAgent(np.array([0.0, 0.0, 3.0, 0.0, 0.0]), "user")
        assert np.allclose(action_probabilities(agent, 1.0), 0.2)

    def test_full_tie_splits_evenly(self):
        agent = QAgent(np.zeros(2), "creator")
        assert np.allclose(action_probabilities(agent, 0.05), 0.5)

    def test_sampling_matches_distribution(self):
        agent = QAgent(np.array([0.0, 0.0, 3.0, 0.0, 0.0]), "user")
        rng = np.random.Generator(np.random.PCG64(123))
        n = 40000
        counts = np.zeros(5)
        for _ in range(n):
            counts[select_action(agent, 0.05, rng)] += 1
        freqs = counts / n
        # 4 sigma on the binomial proportion
        assert abs(freqs[2] - 0.96) < 4 * np.sqrt(0.96 * 0.04 / n)
        for k in (0, 1, 3, 4):
            assert abs(freqs[k] - 0.01) < 4 * np.sqrt(0.01 * 0.99 / n)

    def test_tie_sampling_shares_mass(self):
        agent = QAgent(np.array([2.0, 2.0]), "creator")
        rng = np.random.Generator(np.random.PCG64(42))
        picks = [select_action(agent, 0.0, rng) for _ in range(20000)]
        share = np.mean(np.array(picks) == 0)
        assert abs(share - 0.5) < 4 * np.sqrt(0.25 / 20000)


class TestUpdate:
    def test_single_step_moves_towards_reward(self):
        agent = QAgent.fresh("user")
        updated = update_q(agent, 0, 4.0, 0.05)
        assert updated.q_values[0] == pytest.approx(0.2)
        assert agent.q_values[0] == 0.0  # input untouched

    def test_reward_equal_to_value_is_fixed_point(self):
        agent = QAgent(np.array([1.5, 0.0]), "creator")
        updated = update_q(agent, 0, 1.5, 0.3)
        assert updated.q_values[0] == 1.5

    def test_full_rate_overwrites(self):
        agent = QAgent(np.array([1.5, 0.0]), "creator")
        assert update_q(agent, 0, -2.0, 1.0).q_values[0] == -2.0

    def test_non_finite_reward_rejected(self):
        with pytest.raises(InvalidParamsError):
            update_q(QAgent.fresh("user"), 0, float("nan"), 0.05)

    def test_bad_action_rejected(self):
        with pytest.raises(InvalidParamsError):
            update_q(QAgent.fresh("creator"), 5, 1.0, 0.05)


class TestAgentValidation:
    def test_role_determines_action_count(self):
        with pytest.raises(InvalidParamsError):
            QAgent(np.zeros(2), "user")
        with pytest.raises(InvalidParamsError):
            QAgent(np.zeros(5), "creator")
        with pytest.raises(InvalidParamsError):
            QAgent(np.zeros(5), "referee")

    def test_config_ranges(self):
        with pytest.raises(InvalidParamsError):
            QConfig(learn_rate=1.5)
        with pytest.raises(InvalidParamsError):
            QConfig(explore_rate=-0.1)
        with pytest.raises(InvalidParamsError):
            QConfig(episodes=0)
        QConfig(learn_rate=0.0)  # frozen values allowed


class TestExperiment:
    def test_deterministic_given_seed(self):
        cfg = QConfig(pop_size=20, episodes=200, runs=2, seed=9)
        a = run_experiment(FIG_PARAMS, cfg)
        b = run_experiment(FIG_PARAMS, cfg)
        assert np.array_equal(a.user_fractions, b.user_fractions)
        assert np.array_equal(a.creator_fractions, b.creator_fractions)

    def test_different_seeds_differ(self):
        a = run_experiment(FIG_PARAMS, QConfig(pop_size=20, episodes=200, runs=1, seed=9))
        b = run_experiment(FIG_PARAMS, QConfig(pop_size=20, episodes=200, runs=1, seed=10))
        assert not np.array_equal(a.user_fractions, b.user_fractions)

    def test_census_rows_sum_to_one(self):
        trace = run_experiment(FIG_PARAMS, QConfig(pop_size=30, episodes=300, runs=3, seed=4))
        assert np.allclose(trace.user_fractions.sum(axis=1), 1.0, rtol=0, atol=1e-9)
        assert np.allclose(trace.creator_fractions.sum(axis=1), 1.0, rtol=0, atol=1e-9)

    def test_frozen_values_give_constant_greedy_trace(self):
        cfg = QConfig(learn_rate=0.0, pop_size=20, episodes=100, runs=1, seed=2)
        trace = run_experiment(FIG_PARAMS, cfg)
        assert np.all(trace.user_fractions == trace.user_fractions[0])
        assert np.all(trace.creator_fractions == trace.creator_fractions[0])

    def test_rewards_equal_payoff_cells(self):
        # cross-module oracle: every logged reward equals the table cell of
        # the realised strategy pair
        cfg = QConfig(pop_size=8, episodes=60, runs=1, seed=3)
        log = np.full((cfg.episodes * cfg.pop_size, 4), np.nan)
        run_experiment(FIG_PARAMS, cfg, reward_log=log)
        table = build_payoff_table(FIG_PARAMS)
        assert not np.any(np.isnan(log))
        for a_u, a_c, r_u, r_c in log:
            assert r_u == table.user_payoff[int(a_u), int(a_c)]
            assert r_c == table.creator_payoff[int(a_u), int(a_c)]

    def test_sampled_census_mode(self):
        cfg = QConfig(pop_size=20, episodes=50, runs=1, seed=5, sampled_census=True)
        trace = run_experiment(FIG_PARAMS, cfg)
        assert np.allclose(trace.user_fractions.sum(axis=1), 1.0, atol=1e-9)

    def test_dominant_creator_action_takes_over_without_exploration(self):
        # with b_c=0 and v=0 the unsafe action pays 0 against every user
        # strategy while the safe one pays -c: the first safe trial sends
        # its value negative and the greedy action locks on unsafe
        p = GameParams(b_u=4, b_c=0.0, c=0.5, v=0.0, mu=-0.2, eps=0.1,
                       p_T=0.25, p_D=0.25, theta_T=1, theta_D=1, r=1)
        cfg = QConfig(explore_rate=0.0, pop_size=50, episodes=5000, runs=1, seed=6)
        trace = run_experiment(p, cfg)
        assert trace.creator_fractions[-1, C.D] == 1.0

    def test_trace_properties(self):
        trace = run_experiment(FIG_PARAMS, QConfig(pop_size=10, episodes=20, runs=1, seed=1))
        assert isinstance(trace, LearningTrace)
        assert trace.episodes[0] == 1 and trace.episodes[-1] == 20
        assert np.array_equal(trace.creator_coop, trace.creator_fractions[:, C.C])
