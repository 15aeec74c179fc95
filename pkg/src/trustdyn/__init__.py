"""Simulator and analysis toolkit for the repeated user-creator trust game.

Subpackages cover the payoff/fitness closed forms (``game``), stochastic
finite-population dynamics (``finite``), multi-population replicator ODEs
with equilibrium classification (``replicator``), two-population Q-learning
(``qlearn``), and the sweep/CSV command line (``cli``/``sweeps``).  Hot
stochastic loops run on a compiled kernel when available and on a
numerically identical pure-Python fallback otherwise (``_backend``).
"""

from .game import (
    CreatorStrategy,
    GameParams,
    PayoffTable,
    PopulationMix,
    UserStrategy,
    build_payoff_table,
    creator_fitness,
    fitness_difference_closed_form,
    load_params,
    per_state_metrics,
    user_fitness,
)

__version__ = "0.1.0"

__all__ = [
    "CreatorStrategy",
    "GameParams",
    "PayoffTable",
    "PopulationMix",
    "UserStrategy",
    "build_payoff_table",
    "creator_fitness",
    "fitness_difference_closed_form",
    "load_params",
    "per_state_metrics",
    "user_fitness",
    "__version__",
]
