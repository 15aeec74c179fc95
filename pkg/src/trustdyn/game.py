"""Repeated user-creator monitoring game: parameters, payoffs, fitnesses.

A user and an AI-product creator interact for ``r`` rounds.  The creator
either builds safely (C), paying a development cost, or cuts corners (D)
and risks an institutional fine.  The user decides when to adopt the
product and how often to pay for checking the creator's behaviour; trust
is exactly a reduced checking frequency.  All payoff entries here are
per-round averages over the ``r`` rounds.  Every other module (the
finite-population chain, the replicator flow, the learning agents)
consumes the tables and closed forms defined in this module.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from enum import IntEnum
from pathlib import Path

import numpy as np

from .errors import ConfigError, InvalidParamsError, UnsupportedPairError

__all__ = [
    "UserStrategy",
    "CreatorStrategy",
    "GameParams",
    "PayoffTable",
    "PopulationMix",
    "build_payoff_table",
    "user_fitness",
    "creator_fitness",
    "fitness_difference_closed_form",
    "per_state_metrics",
    "load_params",
    "PARAM_KEYS",
]


class UserStrategy(IntEnum):
    """User strategies, index order fixed for all arrays and CSV columns."""

    AllA = 0  # always adopt, never check
    AllN = 1  # never adopt
    TFT = 2   # adopt first, check every round, mirror the last observation
    TUA = 3   # TFT until theta_T cooperations, then trust and check w.p. p_T
    DtG = 4   # TFT until theta_D defections, then distrust and check w.p. p_D


class CreatorStrategy(IntEnum):
    C = 0  # safe, compliant product
    D = 1  # unsafe, non-compliant product


def _is_int(value) -> bool:
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


@dataclass(frozen=True)
class GameParams:
    """All model constants.

    b_u : user's benefit from adopting a safe product
    b_c : creator's benefit when the product is adopted
    c   : creator's extra cost of building safely (>= 0)
    v   : institutional fine for an unsafe product that gets adopted (>= 0)
    mu  : risk multiplier on the user's benefit under an unsafe product (<= 1)
    eps : cost of one check (>= 0)
    p_T : checking probability of a trusting TUA user, in [0, 1]
    p_D : checking probability of a distrusting DtG user, in [0, 1]
    theta_T, theta_D : integer streak thresholds, in [0, r]
    r   : number of rounds, integer >= 1
    """

    b_u: float = 4.0
    b_c: float = 4.0
    c: float = 0.5
    v: float = 0.1
    mu: float = -0.2
    eps: float = 0.1
    p_T: float = 0.25
    p_D: float = 0.25
    theta_T: int = 3
    theta_D: int = 3
    r: int = 10

    def __post_init__(self):
        if not _is_int(self.r) or self.r < 1:
            raise InvalidParamsError(f"r must be an integer >= 1, got {self.r!r}")
        for name in ("theta_T", "theta_D"):
            val = getattr(self, name)
            if not _is_int(val):
                raise InvalidParamsError(f"{name} must be an integer, got {val!r}")
            if not 0 <= val <= self.r:
                raise InvalidParamsError(f"{name}={val} outside [0, r={self.r}]")
        for name in ("p_T", "p_D"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise InvalidParamsError(f"{name}={val} outside [0, 1]")
        if self.mu > 1.0:
            raise InvalidParamsError(f"mu={self.mu} exceeds 1")
        for name in ("eps", "c", "v"):
            val = getattr(self, name)
            if val < 0.0:
                raise InvalidParamsError(f"{name}={val} must be >= 0")

    @property
    def trust_check_cost(self) -> float:
        """Per-round average checking spend of a TUA user facing safety:
        theta_T full-rate rounds then p_T-rate rounds, averaged over r."""
        return (self.theta_T * self.eps + (self.r - self.theta_T) * self.p_T * self.eps) / self.r

    @property
    def distrust_check_cost(self) -> float:
        """Per-round average checking spend of a DtG user facing defection."""
        return (self.theta_D * self.eps + (self.r - self.theta_D) * self.p_D * self.eps) / self.r

    def replace(self, **kwargs) -> "GameParams":
        vals = {f.name: getattr(self, f.name) for f in fields(self)}
        vals.update(kwargs)
        return GameParams(**vals)


@dataclass(frozen=True)
class PayoffTable:
    """Per-round-average payoffs for every (user strategy, creator strategy)
    cell; ``user_payoff`` and ``creator_payoff`` are read-only 5x2 arrays."""

    user_payoff: np.ndarray
    creator_payoff: np.ndarray
    params: GameParams


def build_payoff_table(params: GameParams) -> PayoffTable:
    """Fill the ten payoff cells for each side of the game.

    Against a safe creator every adopting user earns b_u minus their average
    checking spend.  Against an unsafe creator a conditional user only adopts
    in the first round, hence the mu*b_u/r scaling; AllA keeps adopting and
    earns mu*b_u.  A safe creator nets b_c - c against any adopter and -c
    against a non-adopter (development cost is sunk); an unsafe creator nets
    b_c - v per adopted round, averaged to (b_c - v)/r against conditional
    users.
    """
    if not isinstance(params, GameParams):
        raise InvalidParamsError(f"expected GameParams, got {type(params).__name__}")
    b_u, b_c, c, v, mu, eps, r = (
        params.b_u, params.b_c, params.c, params.v, params.mu, params.eps, params.r,
    )
    m_t = params.trust_check_cost
    m_d = params.distrust_check_cost

    up = np.zeros((5, 2))
    cp = np.zeros((5, 2))

    up[UserStrategy.AllA, CreatorStrategy.C] = b_u
    up[UserStrategy.AllA, CreatorStrategy.D] = mu * b_u
    up[UserStrategy.AllN, :] = 0.0
    up[UserStrategy.TFT, CreatorStrategy.C] = b_u - eps
    up[UserStrategy.TFT, CreatorStrategy.D] = mu * b_u / r - eps
    up[UserStrategy.TUA, CreatorStrategy.C] = b_u - m_t
    up[UserStrategy.TUA, CreatorStrategy.D] = mu * b_u / r - eps
    up[UserStrategy.DtG, CreatorStrategy.C] = b_u - eps
    up[UserStrategy.DtG, CreatorStrategy.D] = mu * b_u / r - m_d

    cp[UserStrategy.AllA, CreatorStrategy.C] = b_c - c
    cp[UserStrategy.AllA, CreatorStrategy.D] = b_c - v
    cp[UserStrategy.AllN, CreatorStrategy.C] = -c
    cp[UserStrategy.AllN, CreatorStrategy.D] = 0.0
    for s in (UserStrategy.TFT, UserStrategy.TUA, UserStrategy.DtG):
        cp[s, CreatorStrategy.C] = b_c - c
        cp[s, CreatorStrategy.D] = (b_c - v) / r

    up.flags.writeable = False
    cp.flags.writeable = False
    return PayoffTable(user_payoff=up, creator_payoff=cp, params=params)


@dataclass(frozen=True)
class PopulationMix:
    """Population state: the five user-strategy frequencies (AllA, AllN,
    TFT, TUA, DtG) and the fraction of safe creators."""

    user_freqs: np.ndarray
    creator_coop_freq: float

    def __post_init__(self):
        freqs = np.asarray(self.user_freqs, dtype=float)
        if freqs.shape != (5,):
            raise InvalidParamsError(f"user_freqs must have 5 entries, got shape {freqs.shape}")
        if np.any(freqs < 0.0) or np.any(freqs > 1.0):
            raise InvalidParamsError(f"user frequencies outside [0, 1]: {freqs}")
        if abs(freqs.sum() - 1.0) > 1e-12:
            raise InvalidParamsError(f"user frequencies sum to {freqs.sum()!r}, not 1")
        if not 0.0 <= self.creator_coop_freq <= 1.0:
            raise InvalidParamsError(f"creator_coop_freq={self.creator_coop_freq} outside [0, 1]")
        freqs.flags.writeable = False
        object.__setattr__(self, "user_freqs", freqs)

    @classmethod
    def from_partial(cls, x: float, y: float, z: float, w: float, alpha: float) -> "PopulationMix":
        """Build a mix from the first four user frequencies; the fifth (DtG)
        is the remainder 1 - x - y - z - w."""
        return cls(np.array([x, y, z, w, 1.0 - x - y - z - w]), alpha)

    @classmethod
    def pure(cls, user: UserStrategy, creator: CreatorStrategy) -> "PopulationMix":
        freqs = np.zeros(5)
        freqs[user] = 1.0
        return cls(freqs, 1.0 if creator == CreatorStrategy.C else 0.0)


def user_fitness(mix: PopulationMix, table: PayoffTable) -> np.ndarray:
    """Average payoff of each user strategy against the creator population:
    alpha-weighted blend of the safe and unsafe payoff columns."""
    alpha = mix.creator_coop_freq
    up = table.user_payoff
    return alpha * up[:, CreatorStrategy.C] + (1.0 - alpha) * up[:, CreatorStrategy.D]


def creator_fitness(mix: PopulationMix, table: PayoffTable) -> np.ndarray:
    """Average payoff of C and D creators against the user population."""
    return mix.user_freqs @ table.creator_payoff


def _delta_user(a: UserStrategy, b: UserStrategy, alpha: float, p: GameParams) -> float:
    """Transcribed closed forms for user fitness differences f_a - f_b."""
    b_u, mu, eps, r = p.b_u, p.mu, p.eps, p.r
    m_t = p.trust_check_cost
    m_d = p.distrust_check_cost
    A, N, T, U, G = UserStrategy
    forms = {
        (A, N): lambda: alpha * b_u + (1 - alpha) * mu * b_u,
        (A, T): lambda: alpha * eps + (1 - alpha) * (mu * b_u - mu * b_u / r + eps),
        (A, U): lambda: alpha * m_t + (1 - alpha) * (mu * b_u - mu * b_u / r + eps),
        (A, G): lambda: alpha * eps + (1 - alpha) * (mu * b_u - mu * b_u / r + m_d),
        (N, T): lambda: -alpha * (b_u - eps) - (1 - alpha) * (mu * b_u / r - eps),
        (N, U): lambda: -alpha * (b_u - m_t) - (1 - alpha) * (mu * b_u / r - eps),
        (N, G): lambda: -alpha * (b_u - eps) - (1 - alpha) * (mu * b_u / r - m_d),
        # The TFT-TUA difference only acts through the safe-creator column,
        # where the strategies' checking spends differ by m_t - eps.
        (T, U): lambda: alpha * (m_t - eps),
        (T, G): lambda: (1 - alpha) * (-eps + m_d),
        (U, G): lambda: alpha * (eps - m_t) + (1 - alpha) * (m_d - eps),
    }
    if (a, b) in forms:
        return forms[(a, b)]()
    return -forms[(b, a)]()


def _delta_creator(mix: PopulationMix, p: GameParams) -> float:
    """Closed form for f_C - f_D given the user mix."""
    x, y = mix.user_freqs[UserStrategy.AllA], mix.user_freqs[UserStrategy.AllN]
    return (p.b_c * (1 - y) - p.c) - (x * (p.b_c - p.v) + (1 - x - y) * (p.b_c - p.v) / p.r)


def fitness_difference_closed_form(pair, mix: PopulationMix, params: GameParams) -> float:
    """Evaluate the transcribed fitness-difference closed form for a pair of
    strategies from the same population.

    Matches the difference of the corresponding ``user_fitness`` /
    ``creator_fitness`` entries to high precision; the agreement of the two
    routes is a core test invariant.
    """
    a, b = pair
    if isinstance(a, UserStrategy) and isinstance(b, UserStrategy):
        if a == b:
            return 0.0
        return _delta_user(a, b, mix.creator_coop_freq, params)
    if isinstance(a, CreatorStrategy) and isinstance(b, CreatorStrategy):
        if a == b:
            return 0.0
        d = _delta_creator(mix, params)
        return d if (a, b) == (CreatorStrategy.C, CreatorStrategy.D) else -d
    raise UnsupportedPairError(f"cannot compare {a!r} and {b!r}: different populations")


def per_state_metrics(u: UserStrategy, cr: CreatorStrategy, params: GameParams):
    """Adoption rate and cooperation flag of a monomorphic pairing.

    Conditional users facing an unsafe creator adopt only in the first of
    the r rounds, consistent with the mu*b_u/r payoff scaling.
    """
    coop = 1 if cr == CreatorStrategy.C else 0
    if u == UserStrategy.AllA:
        adoption = 1.0
    elif u == UserStrategy.AllN:
        adoption = 0.0
    else:
        adoption = 1.0 if cr == CreatorStrategy.C else 1.0 / params.r
    return adoption, coop


PARAM_KEYS = ("b_u", "b_c", "c", "v", "mu", "eps", "p_T", "p_D", "theta_T", "theta_D", "r")
_INT_KEYS = {"theta_T", "theta_D", "r"}


def load_params(path) -> GameParams:
    """Read GameParams from a plain-text file of ``key = value`` lines.

    Recognised keys are exactly b_u, b_c, c, v, mu, eps, p_T, p_D, theta_T,
    theta_D and r; '#' starts a comment; missing keys keep their defaults.
    """
    values = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in PARAM_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown parameter {key!r}")
        if key in values:
            raise ConfigError(f"{path}:{lineno}: duplicate parameter {key!r}")
        try:
            values[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    try:
        return GameParams(**values)
    except InvalidParamsError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
