"""Stochastic evolutionary dynamics in two finite populations.

Users and creators each form a well-mixed population updating by pairwise
Fermi imitation.  In the small-mutation limit at most two strategies
coexist per population, so the long-run behaviour reduces to a Markov
chain over monomorphic (user strategy, creator strategy) states whose
transitions are single-mutant fixation probabilities.  This module builds
that chain, its stationary distribution and aggregate cooperation and
adoption metrics, evaluates the printed risk-dominance conditions, and
provides an agent-based Monte-Carlo simulation as an independent check on
the analytic chain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InvalidParamsError, NumericalError
from .game import (
    CreatorStrategy,
    GameParams,
    PayoffTable,
    UserStrategy,
    build_payoff_table,
    per_state_metrics,
)

__all__ = [
    "FiniteConfig",
    "MonomorphicState",
    "MonomorphicChain",
    "fermi_probability",
    "fixation_probability",
    "build_chain",
    "chain_metrics",
    "risk_dominance_report",
    "monte_carlo_run",
    "invasion_fixation_frequency",
]

_TRUST_USERS = tuple(UserStrategy)
_NO_TRUST_USERS = (UserStrategy.AllA, UserStrategy.AllN, UserStrategy.TFT)


@dataclass(frozen=True)
class FiniteConfig:
    """Population sizes, selection strength and the strategy-set switch."""

    Z_u: int = 100
    Z_c: int = 100
    beta: float = 0.1
    trust_enabled: bool = True

    def __post_init__(self):
        if self.Z_u < 2 or self.Z_c < 2:
            raise InvalidParamsError(f"population sizes must be >= 2, got {self.Z_u}, {self.Z_c}")
        if self.beta < 0.0:
            raise InvalidParamsError(f"beta must be >= 0, got {self.beta}")

    @property
    def user_strategies(self) -> tuple:
        return _TRUST_USERS if self.trust_enabled else _NO_TRUST_USERS


@dataclass(frozen=True)
class MonomorphicState:
    """Both populations fixed on one strategy each."""

    user: UserStrategy
    creator: CreatorStrategy

    @property
    def label(self) -> str:
        return f"({self.user.name},{self.creator.name})"


@dataclass(frozen=True)
class MonomorphicChain:
    """Small-mutation-limit Markov chain over monomorphic states.

    ``fixation[i, j]`` is the fixation probability of a single j-mutant in
    state i for neighbour states (zero elsewhere); ``Lambda`` is the row-
    stochastic transition matrix; ``stationary`` its left fixed vector.
    """

    states: tuple
    fixation: np.ndarray
    Lambda: np.ndarray
    stationary: np.ndarray
    params: GameParams
    cfg: FiniteConfig


def fermi_probability(f_a: float, f_b: float, beta: float) -> float:
    """Probability that an agent with payoff ``f_a`` copies one with payoff
    ``f_b``: the logistic 1/(1 + exp(-beta (f_b - f_a))), saturated to 0/1
    once the exponent magnitude passes 700."""
    if beta < 0.0:
        raise InvalidParamsError(f"beta must be >= 0, got {beta}")
    x = beta * (f_b - f_a)
    if x > 700.0:
        return 1.0
    if x < -700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


def _mutant_fitness_gaps(resident, mutant, opponent, table: PayoffTable, z: int) -> np.ndarray:
    """Mutant-minus-resident fitness at every mutant count k = 1..Z-1.

    Fitness uses the well-mixed frequency form at mixture k/Z while the
    other population sits in its monomorphic strategy.  Because users only
    interact with creators (and vice versa), the gap is constant in k.
    """
    if isinstance(mutant, UserStrategy):
        alpha = 1.0 if opponent == CreatorStrategy.C else 0.0
        up = table.user_payoff
        f_mut = alpha * up[mutant, 0] + (1.0 - alpha) * up[mutant, 1]
        f_res = alpha * up[resident, 0] + (1.0 - alpha) * up[resident, 1]
    else:
        cp = table.creator_payoff
        f_mut = cp[opponent, mutant]
        f_res = cp[opponent, resident]
    return np.full(z - 1, f_mut - f_res)


def fixation_probability(resident, mutant, opponent, params: GameParams, cfg: FiniteConfig) -> float:
    """Probability that a single mutant takes over a resident population.

    ``resident`` and ``mutant`` belong to the same population; ``opponent``
    is the monomorphic strategy of the other population.  Under the Fermi
    rule the backward/forward step ratio is exp(-beta * gap), so the
    fixation probability is accumulated in log space: with cumulative gap
    sums S_i, rho = 1 / sum_i exp(-beta * S_i), i = 0..Z-1.
    """
    if type(resident) is not type(mutant):
        raise InvalidParamsError("resident and mutant must come from the same population")
    z = cfg.Z_u if isinstance(mutant, UserStrategy) else cfg.Z_c
    if z < 2:
        raise InvalidParamsError(f"degenerate population of size {z}")
    if resident == mutant:
        raise InvalidParamsError("resident and mutant must differ")
    if cfg.beta == 0.0:
        return 1.0 / z
    table = build_payoff_table(params)
    gaps = _mutant_fitness_gaps(resident, mutant, opponent, table, z)
    exponents = -cfg.beta * np.concatenate(([0.0], np.cumsum(gaps)))
    m = exponents.max()
    if m < 700.0:
        total = np.exp(exponents).sum()
        return 1.0 / total
    # log-sum-exp shift for exponents that would overflow
    log_total = m + math.log(np.exp(exponents - m).sum())
    return math.exp(-log_total)


def fixation_probability_naive(resident, mutant, opponent, params: GameParams, cfg: FiniteConfig) -> float:
    """Direct product-sum evaluation of the fixation probability from the
    one-step probabilities T+/T-.  Overflow-prone for strong selection;
    kept as the reference the stable log form is tested against."""
    z = cfg.Z_u if isinstance(mutant, UserStrategy) else cfg.Z_c
    if cfg.beta == 0.0:
        return 1.0 / z
    table = build_payoff_table(params)
    gaps = _mutant_fitness_gaps(resident, mutant, opponent, table, z)
    total = 1.0
    prod = 1.0
    for k in range(1, z):
        lazy = (z - k) / z * k / z
        t_plus = lazy * fermi_probability(0.0, gaps[k - 1], cfg.beta)
        t_minus = lazy * fermi_probability(gaps[k - 1], 0.0, cfg.beta)
        prod *= t_minus / t_plus
        total += prod
    return 1.0 / total


def chain_states(cfg: FiniteConfig) -> tuple:
    """Monomorphic states in fixed order: index = 2*user_index + creator."""
    return tuple(
        MonomorphicState(u, c) for u in cfg.user_strategies for c in CreatorStrategy
    )


def build_chain(params: GameParams, cfg: FiniteConfig) -> MonomorphicChain:
    """Assemble the monomorphic-state transition matrix and its stationary
    distribution.

    Neighbour states differ in exactly one population's strategy; the
    transition probability is the mutant's fixation probability divided by
    2(n - 1), where n is the strategy count of the mutating population and
    the factor 2 reflects the uniformly chosen population.
    """
    states = chain_states(cfg)
    n = len(states)
    n_user = len(cfg.user_strategies)
    fixation = np.zeros((n, n))
    lam = np.zeros((n, n))
    for i, si in enumerate(states):
        for j, sj in enumerate(states):
            if i == j:
                continue
            if si.creator == sj.creator and si.user != sj.user:
                rho = fixation_probability(si.user, sj.user, si.creator, params, cfg)
                fixation[i, j] = rho
                lam[i, j] = rho / (2.0 * (n_user - 1))
            elif si.user == sj.user and si.creator != sj.creator:
                rho = fixation_probability(si.creator, sj.creator, si.user, params, cfg)
                fixation[i, j] = rho
                lam[i, j] = rho / 2.0
    np.fill_diagonal(lam, 1.0 - lam.sum(axis=1))
    stationary = _stationary_distribution(lam)
    for arr in (fixation, lam, stationary):
        arr.flags.writeable = False
    return MonomorphicChain(states, fixation, lam, stationary, params, cfg)


def _stationary_distribution(lam: np.ndarray) -> np.ndarray:
    """Left eigenvector of the transition matrix for eigenvalue 1, with a
    power-iteration fallback; fails loudly if neither route converges."""
    vals, vecs = np.linalg.eig(lam.T)
    idx = int(np.argmin(np.abs(vals - 1.0)))
    if abs(vals[idx] - 1.0) < 1e-9:
        pi = np.real(vecs[:, idx])
        pi = np.where(np.abs(pi) < 1e-15, 0.0, pi)
        if pi.sum() < 0:
            pi = -pi
        if np.all(pi >= -1e-12):
            pi = np.clip(pi, 0.0, None)
            pi = pi / pi.sum()
            if np.max(np.abs(pi @ lam - pi)) < 1e-10:
                return pi
    # fallback: power iteration to 1e-14
    pi = np.full(lam.shape[0], 1.0 / lam.shape[0])
    for _ in range(200000):
        nxt = pi @ lam
        if np.max(np.abs(nxt - pi)) < 1e-14:
            pi = nxt
            break
        pi = nxt
    else:
        raise NumericalError("stationary distribution did not converge (non-ergodic chain?)")
    if np.any(pi < -1e-12) or abs(pi.sum() - 1.0) > 1e-9:
        raise NumericalError("stationary solve produced an invalid distribution")
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def chain_metrics(chain: MonomorphicChain, params: GameParams | None = None):
    """Aggregate the stationary distribution into the creator-cooperation
    frequency and the expected user adoption level."""
    params = params or chain.params
    coop = 0.0
    adoption = 0.0
    for state, mass in zip(chain.states, chain.stationary):
        rate, flag = per_state_metrics(state.user, state.creator, params)
        coop += mass * flag
        adoption += mass * rate
    return coop, adoption


_RISK_ROWS = (
    (1, "(AllA,C)->(AllA,D)", "c > v"),
    (2, "(AllN,C)->(AllN,D)", "c > 0"),
    (3, "(TFT,C)->(TFT,D)", "b_c(1-r) + r c > v"),
    (4, "(TUA,C)->(TUA,D)", "b_c(1-r) + r c > v"),
    (5, "(DtG,C)->(DtG,D)", "b_c(1-r) + r c > v"),
    (6, "(AllA,C)->(AllN,C)", "b_u > 0"),
    (7, "(AllA,C)->(TFT,C)", "eps > 0"),
    (8, "(TFT,C)->(TUA,C)", "eps[r - (r - theta_T) p_T] < theta_T c"),
    (9, "(AllA,D)->(AllN,D)", "mu b_u > 0"),
    (10, "(AllA,D)->(TFT,D)", "r eps > mu b_u (1 - r)"),
    (11, "(TFT,D)->(DtG,D)", "eps[r - (r - theta_D) p_D] < theta_D c"),
)


def risk_dominance_report(params: GameParams) -> list:
    """Evaluate the eleven printed risk-dominance conditions.

    Returns (row number, transition label, condition text, holds) tuples;
    the comparisons are strict, exactly as printed.
    """
    p = params
    values = {
        1: p.c > p.v,
        2: p.c > 0,
        3: p.b_c * (1 - p.r) + p.r * p.c > p.v,
        4: p.b_c * (1 - p.r) + p.r * p.c > p.v,
        5: p.b_c * (1 - p.r) + p.r * p.c > p.v,
        6: p.b_u > 0,
        7: p.eps > 0,
        8: p.eps * (p.r - (p.r - p.theta_T) * p.p_T) < p.theta_T * p.c,
        9: p.mu * p.b_u > 0,
        10: p.r * p.eps > p.mu * p.b_u * (1 - p.r),
        11: p.eps * (p.r - (p.r - p.theta_D) * p.p_D) < p.theta_D * p.c,
    }
    return [(num, label, cond, bool(values[num])) for num, label, cond in _RISK_ROWS]


def invasion_fixation_frequency(
    resident, mutant, opponent, params: GameParams, cfg: FiniteConfig, trials: int, seed: int
) -> float:
    """Monte-Carlo estimate of the fixation probability: simulate ``trials``
    single-mutant invasions of the imitation process and return the fixed
    fraction.  Serves as the stochastic oracle for ``fixation_probability``."""
    z = cfg.Z_u if isinstance(mutant, UserStrategy) else cfg.Z_c
    table = build_payoff_table(params)
    gaps = _mutant_fitness_gaps(resident, mutant, opponent, table, z)
    fixed = _backend.fixation_walk_trials(gaps, cfg.beta, trials, np.random.PCG64(seed))
    return fixed / trials


def monte_carlo_run(
    params: GameParams,
    cfg: FiniteConfig,
    mutation_rate: float,
    steps: int,
    seed: int,
    init_state: MonomorphicState | None = None,
    record_every: int = 1,
):
    """Simulate the imitation-plus-mutation process agent by agent.

    Starts from a monomorphic state (``(AllA, C)`` by default) and returns
    (user counts, creator counts) series of shape (steps // record_every,
    n_strategies), deterministic for a given seed.
    """
    if not 0.0 <= mutation_rate <= 1.0:
        raise InvalidParamsError(f"mutation_rate={mutation_rate} outside [0, 1]")
    users = cfg.user_strategies
    table = build_payoff_table(params)
    user_pay = table.user_payoff[list(users), :]
    creator_pay = table.creator_payoff[list(users), :]
    state = init_state or MonomorphicState(users[0], CreatorStrategy.C)
    ucounts = np.zeros(len(users), dtype=np.int64)
    ucounts[users.index(state.user)] = cfg.Z_u
    ccounts = np.zeros(2, dtype=np.int64)
    ccounts[state.creator] = cfg.Z_c
    return _backend.mutation_selection_run(
        user_pay,
        creator_pay,
        cfg.beta,
        mutation_rate,
        steps,
        cfg.Z_u,
        cfg.Z_c,
        ucounts,
        ccounts,
        record_every,
        np.random.PCG64(seed),
    )
