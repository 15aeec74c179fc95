# cython: language_level=3
"""Compiled hot loops: invasion walks, imitation dynamics, Q-learning.

Mirror of ``_kernels_py`` operation for operation: both backends draw the
same uniform doubles from the same BitGenerator stream and apply the same
float arithmetic, so results are bit-identical for a given seed.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport exp
from numpy.random cimport bitgen_t

import numpy as np

BACKEND = "compiled"


cdef bitgen_t *_get_bitgen(bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("expected a numpy BitGenerator")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline long _index(double u, long n) nogil:
    cdef long i = <long>(u * n)
    if i >= n:
        i = n - 1
    return i


cdef inline double _logistic(double x) nogil:
    if x > 700.0:
        return 1.0
    if x < -700.0:
        return 0.0
    return 1.0 / (1.0 + exp(-x))


def fixation_walk_trials(deltas, double beta, long trials, bit_generator):
    """Count fixations of a single mutant over ``trials`` invasion attempts
    of the embedded (self-loop-free) imitation jump chain."""
    cdef const double[::1] d = np.ascontiguousarray(deltas, dtype=np.float64)
    cdef long z = d.shape[0] + 1
    cdef double[::1] p_up = np.empty(z - 1, dtype=np.float64)
    cdef long i, k
    cdef long fixed = 0
    cdef double u
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    for i in range(z - 1):
        p_up[i] = _logistic(beta * d[i])
    with bit_generator.lock, nogil:
        for i in range(trials):
            k = 1
            while 0 < k < z:
                u = rng.next_double(rng.state)
                if u < p_up[k - 1]:
                    k += 1
                else:
                    k -= 1
            if k == z:
                fixed += 1
    return fixed


cdef inline long _pick_strategy(long[::1] counts, long idx, long n) nogil:
    cdef long cum = 0
    cdef long s
    for s in range(n):
        cum += counts[s]
        if idx < cum:
            return s
    return n - 1


def mutation_selection_run(
    user_pay,
    creator_pay,
    double beta,
    double mutation_rate,
    long steps,
    long z_u,
    long z_c,
    user_counts0,
    creator_counts0,
    long record_every,
    bit_generator,
):
    """Agent-based imitation dynamics with mutation; see the pure twin for
    the step protocol."""
    cdef const double[:, ::1] up = np.ascontiguousarray(user_pay, dtype=np.float64)
    cdef const double[:, ::1] cp = np.ascontiguousarray(creator_pay, dtype=np.float64)
    cdef long n_user = up.shape[0]
    cdef long[::1] ucounts = np.array(user_counts0, dtype=np.int64)
    cdef long[::1] ccounts = np.array(creator_counts0, dtype=np.int64)
    cdef long n_rec = steps // record_every
    user_series_arr = np.zeros((n_rec, n_user), dtype=np.int64)
    creator_series_arr = np.zeros((n_rec, 2), dtype=np.int64)
    cdef long[:, ::1] user_series = user_series_arr
    cdef long[:, ::1] creator_series = creator_series_arr
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef long t, s, focal, model, rec = 0
    cdef double alpha, freq, f_focal, f_model

    with bit_generator.lock, nogil:
        for t in range(steps):
            if rng.next_double(rng.state) < 0.5:
                focal = _pick_strategy(ucounts, _index(rng.next_double(rng.state), z_u), n_user)
                if rng.next_double(rng.state) < mutation_rate:
                    s = _index(rng.next_double(rng.state), n_user - 1)
                    if s >= focal:
                        s += 1
                    ucounts[focal] -= 1
                    ucounts[s] += 1
                else:
                    model = _pick_strategy(ucounts, _index(rng.next_double(rng.state), z_u), n_user)
                    alpha = (<double>ccounts[0]) / (<double>z_c)
                    f_focal = alpha * up[focal, 0] + (1.0 - alpha) * up[focal, 1]
                    f_model = alpha * up[model, 0] + (1.0 - alpha) * up[model, 1]
                    if rng.next_double(rng.state) < _logistic(beta * (f_model - f_focal)):
                        ucounts[focal] -= 1
                        ucounts[model] += 1
            else:
                focal = _pick_strategy(ccounts, _index(rng.next_double(rng.state), z_c), 2)
                if rng.next_double(rng.state) < mutation_rate:
                    s = _index(rng.next_double(rng.state), 1)
                    if s >= focal:
                        s += 1
                    ccounts[focal] -= 1
                    ccounts[s] += 1
                else:
                    model = _pick_strategy(ccounts, _index(rng.next_double(rng.state), z_c), 2)
                    f_focal = 0.0
                    f_model = 0.0
                    for s in range(n_user):
                        freq = (<double>ucounts[s]) / (<double>z_u)
                        f_focal += freq * cp[s, focal]
                        f_model += freq * cp[s, model]
                    if rng.next_double(rng.state) < _logistic(beta * (f_model - f_focal)):
                        ccounts[focal] -= 1
                        ccounts[model] += 1
            if (t + 1) % record_every == 0:
                for s in range(n_user):
                    user_series[rec, s] = ucounts[s]
                creator_series[rec, 0] = ccounts[0]
                creator_series[rec, 1] = ccounts[1]
                rec += 1
    return user_series_arr, creator_series_arr


cdef long _select(double[:, ::1] q, long row, long n, double explore_rate, bitgen_t *rng) nogil:
    cdef double u1 = rng.next_double(rng.state)
    cdef double u2 = rng.next_double(rng.state)
    cdef double best
    cdef long j, ties, k, seen
    if u1 < explore_rate:
        return _index(u2, n)
    best = q[row, 0]
    for j in range(1, n):
        if q[row, j] > best:
            best = q[row, j]
    ties = 0
    for j in range(n):
        if q[row, j] == best:
            ties += 1
    k = _index(u2, ties)
    seen = 0
    for j in range(n):
        if q[row, j] == best:
            if seen == k:
                return j
            seen += 1
    return n - 1


cdef inline long _greedy(double[:, ::1] q, long row, long n) nogil:
    cdef long best = 0
    cdef long j
    for j in range(1, n):
        if q[row, j] > q[row, best]:
            best = j
    return best


def qlearn_run(
    user_pay,
    creator_pay,
    long n_agents,
    long episodes,
    double learn_rate,
    double explore_rate,
    bint sampled_census,
    bit_generator,
    reward_log=None,
):
    """One Q-learning run over two co-adapting populations; see the pure
    twin for the episode protocol."""
    cdef const double[:, ::1] up = np.ascontiguousarray(user_pay, dtype=np.float64)
    cdef const double[:, ::1] cp = np.ascontiguousarray(creator_pay, dtype=np.float64)
    cdef long n_user = up.shape[0]
    cdef double[:, ::1] q_u = np.zeros((n_agents, n_user), dtype=np.float64)
    cdef double[:, ::1] q_c = np.zeros((n_agents, 2), dtype=np.float64)
    user_frac_arr = np.zeros((episodes, n_user), dtype=np.float64)
    creator_frac_arr = np.zeros((episodes, 2), dtype=np.float64)
    cdef double[:, ::1] user_frac = user_frac_arr
    cdef double[:, ::1] creator_frac = creator_frac_arr
    cdef long[::1] perm = np.arange(n_agents, dtype=np.int64)
    cdef long[::1] ucount = np.zeros(n_user, dtype=np.int64)
    cdef long[::1] ccount = np.zeros(2, dtype=np.int64)
    cdef bint have_log = reward_log is not None
    cdef double[:, ::1] log_view
    if have_log:
        log_view = reward_log
    cdef bitgen_t *rng = _get_bitgen(bit_generator)
    cdef long ep, i, j, cr, a_u, a_c, s, row
    cdef double r_u, r_c

    with bit_generator.lock, nogil:
        for ep in range(episodes):
            for i in range(n_agents):
                perm[i] = i
            for i in range(n_agents - 1, 0, -1):
                j = _index(rng.next_double(rng.state), i + 1)
                s = perm[i]
                perm[i] = perm[j]
                perm[j] = s
            for s in range(n_user):
                ucount[s] = 0
            ccount[0] = 0
            ccount[1] = 0
            for i in range(n_agents):
                cr = perm[i]
                a_u = _select(q_u, i, n_user, explore_rate, rng)
                a_c = _select(q_c, cr, 2, explore_rate, rng)
                r_u = up[a_u, a_c]
                r_c = cp[a_u, a_c]
                q_u[i, a_u] += learn_rate * (r_u - q_u[i, a_u])
                q_c[cr, a_c] += learn_rate * (r_c - q_c[cr, a_c])
                if have_log:
                    row = ep * n_agents + i
                    log_view[row, 0] = a_u
                    log_view[row, 1] = a_c
                    log_view[row, 2] = r_u
                    log_view[row, 3] = r_c
                if sampled_census:
                    ucount[a_u] += 1
                    ccount[a_c] += 1
            if not sampled_census:
                for i in range(n_agents):
                    ucount[_greedy(q_u, i, n_user)] += 1
                    ccount[_greedy(q_c, i, 2)] += 1
            for s in range(n_user):
                user_frac[ep, s] = (<double>ucount[s]) / (<double>n_agents)
            creator_frac[ep, 0] = (<double>ccount[0]) / (<double>n_agents)
            creator_frac[ep, 1] = (<double>ccount[1]) / (<double>n_agents)
    return user_frac_arr, creator_frac_arr
