"""Two co-adapting populations of stateless Q-learning agents.

Every user keeps one action value per strategy (five of them), every
creator keeps two (safe/unsafe).  Each episode draws a uniform random
perfect matching between the populations; both sides pick actions
epsilon-greedily, receive the per-round-average payoff of the realised
cell as reward, and nudge the chosen entry by the learning rate.  Traces
record the per-episode share of each strategy (greedy census by default)
averaged over independent runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InvalidParamsError
from .game import CreatorStrategy, GameParams, UserStrategy, build_payoff_table

__all__ = ["QConfig", "QAgent", "LearningTrace", "select_action", "update_q", "run_experiment"]


@dataclass(frozen=True)
class QConfig:
    learn_rate: float = 0.05
    explore_rate: float = 0.05
    pop_size: int = 100
    episodes: int = 5000
    runs: int = 10
    seed: int = 0
    sampled_census: bool = False  # census sampled actions instead of greedy ones

    def __post_init__(self):
        # learn_rate 0 is allowed: it freezes the action values, useful as a
        # no-learning control
        if not 0.0 <= self.learn_rate <= 1.0:
            raise InvalidParamsError(f"learn_rate={self.learn_rate} outside [0, 1]")
        if not 0.0 <= self.explore_rate <= 1.0:
            raise InvalidParamsError(f"explore_rate={self.explore_rate} outside [0, 1]")
        if self.pop_size < 1:
            raise InvalidParamsError("pop_size must be >= 1")
        if self.episodes < 1:
            raise InvalidParamsError("episodes must be >= 1")
        if self.runs < 1:
            raise InvalidParamsError("runs must be >= 1")


@dataclass
class QAgent:
    """Action values of one agent; length 5 for users, 2 for creators."""

    q_values: np.ndarray
    role: str  # "user" | "creator"

    def __post_init__(self):
        self.q_values = np.asarray(self.q_values, dtype=float)
        expected = 5 if self.role == "user" else 2
        if self.role not in ("user", "creator"):
            raise InvalidParamsError(f"role must be user or creator, got {self.role!r}")
        if self.q_values.shape != (expected,):
            raise InvalidParamsError(
                f"{self.role} agent needs {expected} action values, got shape {self.q_values.shape}"
            )
        if not np.all(np.isfinite(self.q_values)):
            raise InvalidParamsError("action values must be finite")

    @classmethod
    def fresh(cls, role: str) -> "QAgent":
        return cls(np.zeros(5 if role == "user" else 2), role)


def action_probabilities(agent: QAgent, explore_rate: float) -> np.ndarray:
    """Exact epsilon-greedy distribution: explore_rate/|A| baseline plus the
    greedy mass shared equally by the argmax set."""
    q = agent.q_values
    n = len(q)
    probs = np.full(n, explore_rate / n)
    best = q == q.max()
    probs[best] += (1.0 - explore_rate) / best.sum()
    return probs


def select_action(agent: QAgent, explore_rate: float, rng: np.random.Generator) -> int:
    """Draw one action from the epsilon-greedy policy.

    Consumes two uniforms: the explore/exploit coin and the index pick
    (uniform over all actions when exploring, uniform over the exact
    argmax set otherwise), mirroring the kernel implementations.
    """
    q = agent.q_values
    n = len(q)
    u1 = rng.random()
    u2 = rng.random()
    if u1 < explore_rate:
        return min(int(u2 * n), n - 1)
    ties = np.flatnonzero(q == q.max())
    return int(ties[min(int(u2 * len(ties)), len(ties) - 1)])


def update_q(agent: QAgent, action: int, reward: float, learn_rate: float) -> QAgent:
    """Nudge the chosen action value toward the reward: Q += lr (r - Q).
    Returns a new agent; the input is left untouched."""
    if not np.isfinite(reward):
        raise InvalidParamsError(f"reward must be finite, got {reward!r}")
    if not 0 <= action < len(agent.q_values):
        raise InvalidParamsError(f"action {action} out of range")
    q = agent.q_values.copy()
    q[action] += learn_rate * (reward - q[action])
    return QAgent(q, agent.role)


@dataclass(frozen=True)
class LearningTrace:
    """Per-episode strategy shares averaged over runs.

    user_fractions: (episodes, 5); creator_fractions: (episodes, 2);
    rows of each sum to 1.
    """

    user_fractions: np.ndarray
    creator_fractions: np.ndarray
    params: GameParams
    cfg: QConfig

    @property
    def creator_coop(self) -> np.ndarray:
        return self.creator_fractions[:, CreatorStrategy.C]

    @property
    def episodes(self) -> np.ndarray:
        return np.arange(1, self.user_fractions.shape[0] + 1)


def run_experiment(params: GameParams, cfg: QConfig, reward_log: np.ndarray | None = None) -> LearningTrace:
    """Run ``cfg.runs`` independent learning experiments and average them.

    Run k uses the PCG64 stream seeded with ``cfg.seed + k``, making the
    trace fully deterministic.  ``reward_log`` (episodes*pop_size, 4), if
    given, captures (user action, creator action, user reward, creator
    reward) per pair of the first run.
    """
    table = build_payoff_table(params)
    user_sum = np.zeros((cfg.episodes, len(UserStrategy)))
    creator_sum = np.zeros((cfg.episodes, len(CreatorStrategy)))
    for run in range(cfg.runs):
        uf, cf = _backend.qlearn_run(
            table.user_payoff,
            table.creator_payoff,
            cfg.pop_size,
            cfg.episodes,
            cfg.learn_rate,
            cfg.explore_rate,
            cfg.sampled_census,
            np.random.PCG64(cfg.seed + run),
            reward_log if run == 0 else None,
        )
        user_sum += uf
        creator_sum += cf
    return LearningTrace(user_sum / cfg.runs, creator_sum / cfg.runs, params, cfg)
