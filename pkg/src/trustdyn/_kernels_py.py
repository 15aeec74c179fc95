"""Pure-Python twins of the compiled hot loops.

Each function here consumes uniform doubles from a ``numpy.random``
BitGenerator in exactly the same order and with exactly the same float
arithmetic as its Cython counterpart in ``_kernels.pyx``, so the two
backends produce bit-identical results for the same seed.  Only doubles
are drawn (``Generator.random()`` maps to the bit generator's
``next_double``); integer choices are derived as ``int(u * n)``.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"


def _index(u: float, n: int) -> int:
    i = int(u * n)
    return n - 1 if i >= n else i


def _logistic(x: float) -> float:
    # Imitation probability 1 / (1 + exp(-x)); saturates beyond |x| = 700
    # where exp would overflow.
    if x > 700.0:
        return 1.0
    if x < -700.0:
        return 0.0
    return 1.0 / (1.0 + math.exp(-x))


def fixation_walk_trials(deltas, beta: float, trials: int, bit_generator) -> int:
    """Count fixations of a single mutant over ``trials`` invasion attempts.

    ``deltas[k-1]`` is the mutant-minus-resident fitness difference when k
    mutants are present.  The walk follows the embedded jump chain of the
    imitation process: self-loop steps cannot change the absorption
    outcome, so conditioning on movement leaves the fixation probability
    unchanged while skipping the idle steps.
    """
    deltas = np.asarray(deltas, dtype=float)
    z = deltas.shape[0] + 1
    p_up = [_logistic(beta * d) for d in deltas]
    rng = np.random.Generator(bit_generator)
    fixed = 0
    for _ in range(trials):
        k = 1
        while 0 < k < z:
            u = rng.random()
            if u < p_up[k - 1]:
                k += 1
            else:
                k -= 1
        if k == z:
            fixed += 1
    return fixed


def _pick_strategy(counts, idx: int) -> int:
    """Map an agent index to its strategy via cumulative counts."""
    cum = 0
    for s in range(len(counts)):
        cum += counts[s]
        if idx < cum:
            return s
    return len(counts) - 1


def mutation_selection_run(
    user_pay,
    creator_pay,
    beta: float,
    mutation_rate: float,
    steps: int,
    z_u: int,
    z_c: int,
    user_counts0,
    creator_counts0,
    record_every: int,
    bit_generator,
):
    """Agent-based imitation dynamics with mutation in both populations.

    One randomly chosen focal agent per step, from a randomly chosen
    population (probability 1/2 each).  With probability ``mutation_rate``
    the focal switches to a uniformly chosen different strategy; otherwise
    it imitates a uniformly chosen model (possibly itself, a no-op) with
    the Fermi probability.  Returns strategy-count series for both
    populations, recorded every ``record_every`` steps.
    """
    user_pay = np.asarray(user_pay, dtype=float)
    creator_pay = np.asarray(creator_pay, dtype=float)
    n_user = user_pay.shape[0]
    ucounts = list(int(x) for x in user_counts0)
    ccounts = list(int(x) for x in creator_counts0)
    n_rec = steps // record_every
    user_series = np.zeros((n_rec, n_user), dtype=np.int64)
    creator_series = np.zeros((n_rec, 2), dtype=np.int64)
    rng = np.random.Generator(bit_generator)
    rec = 0

    for t in range(steps):
        if rng.random() < 0.5:
            # user population
            focal = _pick_strategy(ucounts, _index(rng.random(), z_u))
            if rng.random() < mutation_rate:
                s = _index(rng.random(), n_user - 1)
                if s >= focal:
                    s += 1
                ucounts[focal] -= 1
                ucounts[s] += 1
            else:
                model = _pick_strategy(ucounts, _index(rng.random(), z_u))
                alpha = ccounts[0] / z_c
                f_focal = alpha * user_pay[focal, 0] + (1.0 - alpha) * user_pay[focal, 1]
                f_model = alpha * user_pay[model, 0] + (1.0 - alpha) * user_pay[model, 1]
                if rng.random() < _logistic(beta * (f_model - f_focal)):
                    ucounts[focal] -= 1
                    ucounts[model] += 1
        else:
            # creator population
            focal = _pick_strategy(ccounts, _index(rng.random(), z_c))
            if rng.random() < mutation_rate:
                s = _index(rng.random(), 1)
                if s >= focal:
                    s += 1
                ccounts[focal] -= 1
                ccounts[s] += 1
            else:
                model = _pick_strategy(ccounts, _index(rng.random(), z_c))
                f_focal = 0.0
                f_model = 0.0
                for s in range(n_user):
                    freq = ucounts[s] / z_u
                    f_focal += freq * creator_pay[s, focal]
                    f_model += freq * creator_pay[s, model]
                if rng.random() < _logistic(beta * (f_model - f_focal)):
                    ccounts[focal] -= 1
                    ccounts[model] += 1
        if (t + 1) % record_every == 0:
            user_series[rec, :] = ucounts
            creator_series[rec, :] = ccounts
            rec += 1
    return user_series, creator_series


def _select(qrow, n: int, explore_rate: float, rng) -> int:
    """Epsilon-greedy draw: explore uniformly with probability
    ``explore_rate``, otherwise pick uniformly among the exact argmax set.
    Consumes exactly two doubles."""
    u1 = rng.random()
    u2 = rng.random()
    if u1 < explore_rate:
        return _index(u2, n)
    best = qrow[0]
    for j in range(1, n):
        if qrow[j] > best:
            best = qrow[j]
    ties = 0
    for j in range(n):
        if qrow[j] == best:
            ties += 1
    k = _index(u2, ties)
    seen = 0
    for j in range(n):
        if qrow[j] == best:
            if seen == k:
                return j
            seen += 1
    return n - 1


def _greedy(qrow, n: int) -> int:
    best = 0
    for j in range(1, n):
        if qrow[j] > qrow[best]:
            best = j
    return best


def qlearn_run(
    user_pay,
    creator_pay,
    n_agents: int,
    episodes: int,
    learn_rate: float,
    explore_rate: float,
    sampled_census: bool,
    bit_generator,
    reward_log=None,
):
    """One Q-learning run: ``n_agents`` users co-adapt against ``n_agents``
    creators under random perfect matching.

    Per episode: shuffle the creator side (Fisher-Yates), have every pair
    draw actions epsilon-greedily, pay both sides the per-round-average
    payoff of the realised cell, and update the chosen Q-entries.  The
    returned per-episode fractions count greedy actions unless
    ``sampled_census`` is set.  ``reward_log`` (episodes*n_agents, 4), when
    given, records user action, creator action and both rewards per pair.
    """
    user_pay = np.asarray(user_pay, dtype=float)
    creator_pay = np.asarray(creator_pay, dtype=float)
    n_user = user_pay.shape[0]
    q_u = [[0.0] * n_user for _ in range(n_agents)]
    q_c = [[0.0, 0.0] for _ in range(n_agents)]
    user_frac = np.zeros((episodes, n_user))
    creator_frac = np.zeros((episodes, 2))
    rng = np.random.Generator(bit_generator)
    perm = list(range(n_agents))

    for ep in range(episodes):
        for i in range(n_agents):
            perm[i] = i
        for i in range(n_agents - 1, 0, -1):
            j = _index(rng.random(), i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        ucount = [0] * n_user
        ccount = [0, 0]
        for i in range(n_agents):
            cr = perm[i]
            a_u = _select(q_u[i], n_user, explore_rate, rng)
            a_c = _select(q_c[cr], 2, explore_rate, rng)
            r_u = user_pay[a_u, a_c]
            r_c = creator_pay[a_u, a_c]
            q_u[i][a_u] += learn_rate * (r_u - q_u[i][a_u])
            q_c[cr][a_c] += learn_rate * (r_c - q_c[cr][a_c])
            if reward_log is not None:
                row = ep * n_agents + i
                reward_log[row, 0] = a_u
                reward_log[row, 1] = a_c
                reward_log[row, 2] = r_u
                reward_log[row, 3] = r_c
            if sampled_census:
                ucount[a_u] += 1
                ccount[a_c] += 1
        if not sampled_census:
            for i in range(n_agents):
                ucount[_greedy(q_u[i], n_user)] += 1
                ccount[_greedy(q_c[i], 2)] += 1
        for s in range(n_user):
            user_frac[ep, s] = ucount[s] / n_agents
        creator_frac[ep, 0] = ccount[0] / n_agents
        creator_frac[ep, 1] = ccount[1] / n_agents
    return user_frac, creator_frac
