"""Compiled kernels against the pure-Python twins: bit-identical outputs."""

import numpy as np
import pytest

from trustdyn import _backend
from trustdyn import _kernels_py as pure

compiled = pytest.importorskip("trustdyn._kernels", reason="compiled kernels not built")

PAYOFF_U = np.array([[4.0, -0.8], [0.0, 0.0], [3.9, -0.18], [3.95, -0.18], [3.9, -0.13]])
PAYOFF_C = np.array([[3.5, 3.9], [-0.5, 0.0], [3.5, 0.39], [3.5, 0.39], [3.5, 0.39]])


def test_backend_selected():
    assert _backend.backend_name() in ("compiled", "pure")


def test_walk_trials_identical():
    deltas = np.linspace(-0.5, 1.5, 9)
    for seed in (1, 2, 3):
        a = compiled.fixation_walk_trials(deltas, 0.4, 5000, np.random.PCG64(seed))
        b = pure.fixation_walk_trials(deltas, 0.4, 5000, np.random.PCG64(seed))
        assert a == b


def test_mutation_selection_identical():
    u0 = np.array([10, 0, 0, 0, 0], dtype=np.int64)
    c0 = np.array([0, 10], dtype=np.int64)
    for seed in (5, 6):
        a = compiled.mutation_selection_run(PAYOFF_U, PAYOFF_C, 0.2, 0.01, 30000, 10, 10, u0, c0, 10, np.random.PCG64(seed))
        b = pure.mutation_selection_run(PAYOFF_U, PAYOFF_C, 0.2, 0.01, 30000, 10, 10, u0, c0, 10, np.random.PCG64(seed))
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])


def test_mutation_selection_leaves_inputs_untouched():
    u0 = np.array([10, 0, 0, 0, 0], dtype=np.int64)
    c0 = np.array([0, 10], dtype=np.int64)
    compiled.mutation_selection_run(PAYOFF_U, PAYOFF_C, 0.2, 0.5, 5000, 10, 10, u0, c0, 10, np.random.PCG64(1))
    assert u0.tolist() == [10, 0, 0, 0, 0]
    assert c0.tolist() == [0, 10]


def test_qlearn_identical_including_logs():
    for seed, sampled in ((7, False), (8, True)):
        log_a = np.zeros((40 * 12, 4))
        log_b = np.zeros((40 * 12, 4))
        a = compiled.qlearn_run(PAYOFF_U, PAYOFF_C, 12, 40, 0.05, 0.05, sampled, np.random.PCG64(seed), log_a)
        b = pure.qlearn_run(PAYOFF_U, PAYOFF_C, 12, 40, 0.05, 0.05, sampled, np.random.PCG64(seed), log_b)
        assert np.array_equal(a[0], b[0])
        assert np.array_equal(a[1], b[1])
        assert np.array_equal(log_a, log_b)
