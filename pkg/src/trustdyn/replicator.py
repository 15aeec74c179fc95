"""Infinite-population replicator dynamics for the user-creator game.

Two coupled flows: the user simplex over five strategies (AllA, AllN,
TFT, TUA, DtG; coordinates x, y, z, w with DtG as the remainder) or over
three (AllA, AllN, TFT with TFT as the remainder), and the creator
cooperation frequency alpha.  The right-hand side exists in two
independently written forms, a generic payoff-table route and fully
expanded polynomial transcriptions, which must agree everywhere (checked
by tests).  The module also enumerates the closed-form equilibrium
candidates (labels p1..p17 for the five-strategy flow, q1..q8 for the
three-strategy one), filters them for feasibility, and classifies local
stability from the numeric Jacobian spectrum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .eigen import eigenvalues
from .errors import InvalidParamsError, NumericalError
from .game import GameParams, build_payoff_table

__all__ = [
    "ReplicatorState",
    "Trajectory",
    "EquilibriumRecord",
    "rhs",
    "rhs_explicit",
    "integrate",
    "uniform_state",
    "equilibrium_catalog",
    "classify_stability",
    "classified_catalog",
    "tabulated_eigenvalues",
    "lemma_expectations",
    "lemma_grid_check",
    "three_strategy_lemma_check",
    "trailing_alpha_range",
    "STABLE",
    "UNSTABLE",
    "DEGENERATE",
    "INFEASIBLE",
]

VARIANTS = ("five", "three")

STABLE = "stable"
UNSTABLE = "unstable"
DEGENERATE = "degenerate-nonstable"
INFEASIBLE = "infeasible"

# stability margin: an order above the finite-difference Jacobian noise
_STAB_TOL = 1e-8
_JAC_H = 1e-6


@dataclass(frozen=True)
class ReplicatorState:
    """Point on the user simplex x creator interval.

    x, y, z, w are the AllA, AllN, TFT, TUA frequencies; the DtG frequency
    is the remainder.  The three-strategy flow keeps w and the remainder
    identically zero (TFT itself is the remainder there).
    """

    x: float
    y: float
    z: float
    w: float
    alpha: float

    def __post_init__(self):
        coords = (self.x, self.y, self.z, self.w, self.alpha)
        if any(v < -1e-12 or v > 1.0 + 1e-12 for v in coords):
            raise InvalidParamsError(f"coordinates outside [0, 1]: {coords}")
        if self.x + self.y + self.z + self.w > 1.0 + 1e-12:
            raise InvalidParamsError("user frequencies exceed the simplex")

    @property
    def dtg_freq(self) -> float:
        return 1.0 - self.x - self.y - self.z - self.w

    def as_vector(self, variant: str) -> np.ndarray:
        _check_variant(variant)
        if variant == "five":
            return np.array([self.x, self.y, self.z, self.w, self.alpha])
        return np.array([self.x, self.y, self.alpha])

    @classmethod
    def from_vector(cls, vec, variant: str) -> "ReplicatorState":
        _check_variant(variant)
        if variant == "five":
            x, y, z, w, alpha = vec
            return cls(x, y, z, w, alpha)
        x, y, alpha = vec
        return cls(x, y, 1.0 - x - y, 0.0, alpha)


@dataclass(frozen=True)
class Trajectory:
    """Integrated orbit: times plus (x, y, z, w, alpha) rows."""

    times: np.ndarray
    states: np.ndarray
    params: GameParams
    variant: str

    @property
    def alpha(self) -> np.ndarray:
        return self.states[:, 4]

    @property
    def dtg(self) -> np.ndarray:
        return 1.0 - self.states[:, :4].sum(axis=1)

    def final_state(self) -> ReplicatorState:
        x, y, z, w, a = self.states[-1]
        return ReplicatorState(x, y, z, w, a)


def _check_variant(variant: str):
    if variant not in VARIANTS:
        raise InvalidParamsError(f"variant must be one of {VARIANTS}, got {variant!r}")


@lru_cache(maxsize=128)
def _flat_table(params: GameParams):
    t = build_payoff_table(params)
    return (
        tuple(t.user_payoff[:, 0]),
        tuple(t.user_payoff[:, 1]),
        tuple(t.creator_payoff[:, 0]),
        tuple(t.creator_payoff[:, 1]),
    )


def _rhs_five(vec, params: GameParams):
    """Generic payoff-route right-hand side for the five-strategy flow."""
    x, y, z, w, a = vec
    uc, ud, cc, cd = _flat_table(params)
    d = 1.0 - x - y - z - w
    na = 1.0 - a
    f0 = a * uc[0] + na * ud[0]
    f1 = a * uc[1] + na * ud[1]
    f2 = a * uc[2] + na * ud[2]
    f3 = a * uc[3] + na * ud[3]
    f4 = a * uc[4] + na * ud[4]
    fbar = x * f0 + y * f1 + z * f2 + w * f3 + d * f4
    f_c = x * cc[0] + y * cc[1] + z * cc[2] + w * cc[3] + d * cc[4]
    f_d = x * cd[0] + y * cd[1] + z * cd[2] + w * cd[3] + d * cd[4]
    return (
        x * (f0 - fbar),
        y * (f1 - fbar),
        z * (f2 - fbar),
        w * (f3 - fbar),
        a * na * (f_c - f_d),
    )


def _rhs_three(vec, params: GameParams):
    """Generic right-hand side for the three-strategy flow (TFT is the
    simplex remainder)."""
    x, y, a = vec
    uc, ud, cc, cd = _flat_table(params)
    z = 1.0 - x - y
    na = 1.0 - a
    f0 = a * uc[0] + na * ud[0]
    f1 = a * uc[1] + na * ud[1]
    f2 = a * uc[2] + na * ud[2]
    fbar = x * f0 + y * f1 + z * f2
    f_c = x * cc[0] + y * cc[1] + z * cc[2]
    f_d = x * cd[0] + y * cd[1] + z * cd[2]
    return (
        x * (f0 - fbar),
        y * (f1 - fbar),
        a * na * (f_c - f_d),
    )


def _rhs_raw(vec, params: GameParams, variant: str):
    return _rhs_five(vec, params) if variant == "five" else _rhs_three(vec, params)


def rhs(state: ReplicatorState, params: GameParams, variant: str = "five") -> np.ndarray:
    """Time derivatives at a state of the chosen flow (5- or 3-vector).

    Rejects points further than 1e-9 off the simplex; use the trajectory
    integrator for evolving states.
    """
    _check_variant(variant)
    coords = (state.x, state.y, state.z, state.w, state.alpha)
    if any(v < -1e-9 or v > 1.0 + 1e-9 for v in coords) or state.dtg_freq < -1e-9:
        raise InvalidParamsError(f"state is off the simplex beyond 1e-9: {coords}")
    if variant == "three" and (state.w != 0.0 or abs(state.dtg_freq) > 1e-9):
        raise InvalidParamsError("three-strategy flow requires w = 0 and zero DtG frequency")
    return np.array(_rhs_raw(state.as_vector(variant), params, variant))


def _explicit_five(vec, p: GameParams):
    """Fully expanded polynomial transcription of the five-strategy flow."""
    x, y, z, w, a = vec
    b_u, b_c, c, v, mu, eps, r = p.b_u, p.b_c, p.c, p.v, p.mu, p.eps, p.r
    pT, pD, thT, thD = p.p_T, p.p_D, p.theta_T, p.theta_D

    check_bar = eps * (
        -r * (a + a * (pT - 2) * w + w - a * (x + y + z) + z)
        + a * thT * (pT - 1) * w
        - (a - 1) * pD * (r - thD) * (w + x + y + z - 1)
        - (a - 1) * thD * (w + x + y + z - 1)
    ) / r
    mu_bar = (a - 1) * b_u * mu * (-r * x + x + y - 1) / r

    xdot = x * (b_u * (a * (-mu) + a + mu) - mu_bar + a * b_u * (y - 1) - check_bar)
    ydot = y * (-mu_bar + a * b_u * (y - 1) - check_bar)
    zdot = (
        z
        * (
            -(a - 1) * b_u * mu * (-r * x + x + y)
            + a * b_u * r * y
            + eps
            * (
                r * (a + a * (pT - 2) * w + (a - 1) * pD * (w + x + y + z - 1) + w - a * (x + y + z) + z - 1)
                - a * thT * (pT - 1) * w
                - (a - 1) * thD * (pD - 1) * (w + x + y + z - 1)
            )
        )
        / r
    )
    wdot = (
        w
        * (
            -(a - 1) * b_u * mu * (-r * x + x + y)
            + a * b_u * r * y
            + eps
            * (
                r * (a * (pT - 2) * w - a * (pT + x + y + z - 2) + (a - 1) * pD * (w + x + y + z - 1) + w + z - 1)
                - a * thT * (pT - 1) * (w - 1)
                - (a - 1) * thD * (pD - 1) * (w + x + y + z - 1)
            )
        )
        / r
    )
    adot = (a - 1) * a * (b_c * (r - 1) * (x + y - 1) + c * r + v * (-r * x + x + y - 1)) / r
    return (xdot, ydot, zdot, wdot, adot)


def _explicit_three(vec, p: GameParams):
    """Fully expanded transcription of the three-strategy flow."""
    x, y, a = vec
    b_u, b_c, c, v, mu, eps, r = p.b_u, p.b_c, p.c, p.v, p.mu, p.eps, p.r
    xdot = x * ((a - 1) * b_u * mu * ((r - 1) * (x - 1) - y) / r + a * b_u * y - eps * (x + y - 1))
    ydot = y * (-(a - 1) * b_u * mu * (-r * x + x + y - 1) / r + a * b_u * (y - 1) - eps * (x + y - 1))
    adot = (a - 1) * a * (b_c * (r - 1) * (x + y - 1) + c * r + v * (-r * x + x + y - 1)) / r
    return (xdot, ydot, adot)


def rhs_explicit(state: ReplicatorState, params: GameParams, variant: str = "five") -> np.ndarray:
    """Transcribed-form right-hand side; agrees with ``rhs`` to 1e-10."""
    _check_variant(variant)
    vec = state.as_vector(variant)
    form = _explicit_five if variant == "five" else _explicit_three
    return np.array(form(vec, params))


def uniform_state(variant: str = "five", alpha: float = 0.5) -> ReplicatorState:
    """Equal user-strategy frequencies with the given creator split."""
    _check_variant(variant)
    if variant == "five":
        return ReplicatorState(0.2, 0.2, 0.2, 0.2, alpha)
    third = 1.0 / 3.0
    return ReplicatorState(third, third, 1.0 - 2 * third, 0.0, alpha)


def _project(vec, variant: str):
    """Clamp tiny negatives to zero, renormalise the user frequencies to
    sum 1, and keep alpha inside [0, 1]."""
    if variant == "five":
        x, y, z, w, a = vec
        d = 1.0 - x - y - z - w
        freqs = [max(f, 0.0) for f in (x, y, z, w, d)]
        total = sum(freqs)
        freqs = [f / total for f in freqs]
        a = min(max(a, 0.0), 1.0)
        return (freqs[0], freqs[1], freqs[2], freqs[3], a)
    x, y, a = vec
    z = 1.0 - x - y
    freqs = [max(f, 0.0) for f in (x, y, z)]
    total = sum(freqs)
    freqs = [f / total for f in freqs]
    a = min(max(a, 0.0), 1.0)
    return (freqs[0], freqs[1], a)


def integrate(
    initial: ReplicatorState,
    params: GameParams,
    variant: str = "five",
    dt: float = 0.01,
    t_end: float = 500.0,
    record_every: int = 1,
) -> Trajectory:
    """Fixed-step classical 4th-order integration of the replicator flow.

    Deterministic; after every step the state is projected back onto the
    simplex (clamp negatives, renormalise, clamp alpha).  Aborts with a
    diagnostic if any coordinate passes magnitude 2.
    """
    _check_variant(variant)
    if dt <= 0.0:
        raise InvalidParamsError(f"dt must be positive, got {dt}")
    if record_every < 1:
        raise InvalidParamsError("record_every must be >= 1")
    n_steps = int(round(t_end / dt))
    vec = tuple(initial.as_vector(variant))
    dim = len(vec)
    times = [0.0]
    rows = [_full_coords(vec, variant)]
    for step in range(1, n_steps + 1):
        k1 = _rhs_raw(vec, params, variant)
        v2 = tuple(vec[i] + 0.5 * dt * k1[i] for i in range(dim))
        k2 = _rhs_raw(v2, params, variant)
        v3 = tuple(vec[i] + 0.5 * dt * k2[i] for i in range(dim))
        k3 = _rhs_raw(v3, params, variant)
        v4 = tuple(vec[i] + dt * k3[i] for i in range(dim))
        k4 = _rhs_raw(v4, params, variant)
        vec = tuple(
            vec[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0 for i in range(dim)
        )
        if any(abs(c) > 2.0 for c in vec):
            raise NumericalError(
                f"trajectory blow-up at t={step * dt:.6g}: coordinates {vec}"
            )
        vec = _project(vec, variant)
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            rows.append(_full_coords(vec, variant))
    return Trajectory(np.array(times), np.array(rows), params, variant)


def _full_coords(vec, variant: str):
    if variant == "five":
        return vec
    x, y, a = vec
    return (x, y, 1.0 - x - y, 0.0, a)


def trailing_alpha_range(traj: Trajectory, fraction: float = 0.2):
    """(min, max) of alpha over the trailing window of the trajectory; the
    spread is the oscillation report for periodic regimes."""
    n = len(traj.times)
    start = max(0, int(math.floor(n * (1.0 - fraction))))
    tail = traj.states[start:, 4]
    return float(tail.min()), float(tail.max())


# --- equilibrium candidates -------------------------------------------------


@dataclass(frozen=True)
class EquilibriumRecord:
    """Closed-form equilibrium candidate with feasibility and stability.

    ``coords`` is the raw (x, y, z, w, alpha) tuple (it may lie outside the
    hypercube for infeasible candidates).  The two one-parameter families
    carry sampled members in ``samples`` plus a descriptor of the free
    coordinate.
    """

    label: str
    coords: tuple
    feasible: bool
    reason: str
    variant: str
    is_set: bool = False
    set_descriptor: str = ""
    samples: tuple = ()
    eigenvalues: tuple = ()
    stability: str = ""

    def state(self) -> ReplicatorState:
        if not self.feasible:
            raise InvalidParamsError(f"{self.label} is infeasible; no valid state")
        x, y, z, w, a = self.coords
        return ReplicatorState(x, y, z, w, a)


def _in01(value: float, tol: float = 1e-12) -> bool:
    return -tol <= value <= 1.0 + tol


def equilibrium_catalog(params: GameParams, variant: str = "five") -> list:
    """All closed-form equilibrium candidates of the chosen flow with their
    feasibility verdicts (17 for five strategies, 8 for three)."""
    _check_variant(variant)
    return _catalog_five(params) if variant == "five" else _catalog_three(params)


def _catalog_five(p: GameParams) -> list:
    b_u, b_c, c, v, mu, eps, r = p.b_u, p.b_c, p.c, p.v, p.mu, p.eps, p.r
    pT, pD, thT, thD = p.p_T, p.p_D, p.theta_T, p.theta_D
    recs = []

    samples1 = tuple((0.0, 0.0, 1.0 - w, w, 0.0) for w in (0.0, 0.5, 1.0))
    recs.append(
        EquilibriumRecord(
            "p1",
            samples1[1],
            True,
            "one-parameter family, always on the hypercube",
            "five",
            is_set=True,
            set_descriptor="x=0, y=0, z=1-w, w in [0,1], alpha=0",
            samples=samples1,
        )
    )
    samples2 = tuple((0.0, 0.0, z, 0.0, 1.0) for z in (0.0, 0.5, 1.0))
    recs.append(
        EquilibriumRecord(
            "p2",
            samples2[1],
            True,
            "one-parameter family, always on the hypercube",
            "five",
            is_set=True,
            set_descriptor="x=0, y=0, z in [0,1], w=0, alpha=1",
            samples=samples2,
        )
    )

    corners = {
        "p3": (0.0, 0.0, 1.0, 0.0, 0.0),
        "p4": (0.0, 1.0, 0.0, 0.0, 0.0),
        "p5": (1.0, 0.0, 0.0, 0.0, 0.0),
        "p6": (0.0, 0.0, 0.0, 1.0, 0.0),
        "p7": (0.0, 0.0, 0.0, 0.0, 0.0),
        "p8": (0.0, 1.0, 0.0, 0.0, 1.0),
        "p9": (1.0, 0.0, 0.0, 0.0, 1.0),
        "p10": (0.0, 0.0, 0.0, 1.0, 1.0),
        "p11": (0.0, 0.0, 0.0, 0.0, 1.0),
    }
    for label, coords in corners.items():
        recs.append(
            EquilibriumRecord(label, coords, True, "monomorphic corner, always feasible", "five")
        )

    # p12: AllA/AllN mix with an interior creator split
    if v == 0.0 or mu == 1.0:
        recs.append(
            EquilibriumRecord("p12", (math.nan,) * 5, False, "undefined: zero denominator", "five")
        )
    else:
        coords = (c / v, (v - c) / v, 0.0, 0.0, mu / (mu - 1.0))
        ok = 0.0 <= c <= v and mu < 0.0
        reason = "0 <= c <= v and mu < 0" if ok else f"needs 0 <= c <= v and mu < 0 (c={c}, v={v}, mu={mu})"
        recs.append(EquilibriumRecord("p12", coords, ok, reason, "five"))

    # p13/p14 share the AllN weight; they differ in the third strategy and alpha
    den_y = b_c * r - b_c + v
    if den_y == 0.0:
        for label in ("p13", "p14"):
            recs.append(
                EquilibriumRecord(label, (math.nan,) * 5, False, "undefined: zero denominator", "five")
            )
    else:
        y_mix = (b_c * r - b_c - c * r + v) / den_y
        den13 = b_u * (r - mu)
        a13 = (r * eps - b_u * mu) / den13 if den13 != 0.0 else math.nan
        coords13 = (0.0, y_mix, c * r / den_y, 0.0, a13)
        ok13 = (0.0 <= c * r <= den_y) and (mu / r <= eps / b_u <= 1.0) if b_u != 0.0 else False
        recs.append(
            EquilibriumRecord(
                "p13",
                coords13,
                bool(ok13 and not math.isnan(a13)),
                "0 <= c r <= b_c r - b_c + v and mu/r <= eps/b_u <= 1"
                if ok13
                else "feasibility conditions fail",
                "five",
            )
        )
        num14 = -b_u * mu + pD * r * eps - thD * pD * eps + thD * eps
        den14 = -b_u * mu + b_u * r + pD * r * eps - thD * pD * eps - r * eps + thD * eps
        a14 = num14 / den14 if den14 != 0.0 else math.nan
        coords14 = (0.0, y_mix, 0.0, 0.0, a14)
        ok14 = (0.0 <= c * r <= den_y) and (b_u * mu <= eps * (pD * r + (1.0 - pD) * thD))
        recs.append(
            EquilibriumRecord(
                "p14",
                coords14,
                bool(ok14 and not math.isnan(a14)),
                "0 <= c r <= b_c r - b_c + v and b_u mu <= eps [p_D r + (1 - p_D) theta_D]"
                if ok14
                else "feasibility conditions fail",
                "five",
            )
        )

    # p15-p17 never lie on the hypercube
    den_x = (r - 1) * (b_c - v)
    x_out = (b_c * r - b_c - c * r + v) / den_x if den_x != 0.0 else math.nan
    den15a = b_u * mu - b_u * mu * r + pT * r * eps - thT * pT * eps - r * eps + thT * eps
    a15 = (b_u * mu - b_u * mu * r - r * eps) / den15a if den15a != 0.0 else math.nan
    w15 = -c * r / den_y if den_y != 0.0 else math.nan
    recs.append(
        EquilibriumRecord(
            "p15",
            (x_out, 0.0, 0.0, w15, a15),
            False,
            "w = -c r/(b_c r - b_c + v) < 0",
            "five",
        )
    )
    den16 = b_u * mu * (r - 1)
    a16 = (-b_u * mu + b_u * mu * r + r * eps) / den16 if den16 != 0.0 else math.nan
    z16 = -r * (c - v) / ((r - 1) * (v - b_c)) if (r - 1) * (v - b_c) != 0.0 else math.nan
    recs.append(
        EquilibriumRecord(
            "p16",
            (x_out, 0.0, z16, 0.0, a16),
            False,
            "alpha = (-b_u mu + b_u mu r + r eps)/(b_u mu (r-1)) > 1",
            "five",
        )
    )
    num17 = -b_u * mu + b_u * mu * r + pD * r * eps - thD * pD * eps + thD * eps
    den17 = -b_u * mu + b_u * mu * r + pD * r * eps - thD * pD * eps - r * eps + thD * eps
    a17 = num17 / den17 if den17 != 0.0 else math.nan
    recs.append(
        EquilibriumRecord(
            "p17",
            (x_out, 0.0, 0.0, 0.0, a17),
            False,
            "alpha outside [0, 1]",
            "five",
        )
    )
    return recs


def _catalog_three(p: GameParams) -> list:
    b_u, b_c, c, v, mu, eps, r = p.b_u, p.b_c, p.c, p.v, p.mu, p.eps, p.r
    recs = []

    den_y = b_c * (r - 1) + v
    if den_y == 0.0 or b_u == 0.0 or b_u * r - b_u * mu == 0.0:
        recs.append(
            EquilibriumRecord("q1", (math.nan,) * 5, False, "undefined: zero denominator", "three")
        )
    else:
        z1 = c * r / den_y
        a1 = (r * eps - b_u * mu) / (b_u * r - b_u * mu)
        coords = (0.0, 1.0 - z1, z1, 0.0, a1)
        ok = (0.0 <= c * r <= den_y) and (mu / r <= eps / b_u <= 1.0)
        recs.append(
            EquilibriumRecord(
                "q1",
                coords,
                bool(ok),
                "0 <= c r <= b_c(r-1) + v and mu/r <= eps/b_u <= 1"
                if ok
                else "feasibility conditions fail",
                "three",
            )
        )

    corners = {
        "q2": (0.0, 1.0, 0.0, 0.0, 0.0),
        "q3": (1.0, 0.0, 0.0, 0.0, 0.0),
        "q4": (0.0, 0.0, 1.0, 0.0, 0.0),
        "q5": (0.0, 1.0, 0.0, 0.0, 1.0),
        "q6": (1.0, 0.0, 0.0, 0.0, 1.0),
        "q7": (0.0, 0.0, 1.0, 0.0, 1.0),
    }
    for label, coords in corners.items():
        recs.append(
            EquilibriumRecord(label, coords, True, "monomorphic corner, always feasible", "three")
        )

    if v == 0.0 or mu == 1.0:
        recs.append(
            EquilibriumRecord("q8", (math.nan,) * 5, False, "undefined: zero denominator", "three")
        )
    else:
        coords = (c / v, 1.0 - c / v, 0.0, 0.0, mu / (mu - 1.0))
        ok = 0.0 <= c <= v and mu < 0.0
        reason = "0 <= c <= v and mu < 0" if ok else f"needs 0 <= c <= v and mu < 0 (c={c}, v={v}, mu={mu})"
        recs.append(EquilibriumRecord("q8", coords, ok, reason, "three"))
    return recs


def _reduced_vector(coords, variant: str):
    x, y, z, w, a = coords
    return (x, y, z, w, a) if variant == "five" else (x, y, a)


def numeric_jacobian(coords, params: GameParams, variant: str = "five", h: float = _JAC_H) -> np.ndarray:
    """Central-difference Jacobian of the flow at raw coordinates (no
    simplex validation: equilibrium candidates may sit outside it)."""
    _check_variant(variant)
    vec = list(_reduced_vector(coords, variant))
    n = len(vec)
    jac = np.zeros((n, n))
    for j in range(n):
        vp = list(vec)
        vm = list(vec)
        vp[j] += h
        vm[j] -= h
        fp = _rhs_raw(tuple(vp), params, variant)
        fm = _rhs_raw(tuple(vm), params, variant)
        for i in range(n):
            jac[i, j] = (fp[i] - fm[i]) / (2.0 * h)
    return jac


def _classify_spectrum(eigs) -> str:
    reals = [ev.real for ev in eigs]
    if any(abs(re) <= _STAB_TOL for re in reals):
        return DEGENERATE
    if max(reals) < -_STAB_TOL:
        return STABLE
    return UNSTABLE


def classify_stability(record: EquilibriumRecord, params: GameParams, variant: str | None = None) -> EquilibriumRecord:
    """Fill in the eigenvalue spectrum and stability class of a feasible
    candidate (families are judged at their sampled members, which agree
    per construction: each carries at least one vanishing eigenvalue)."""
    variant = variant or record.variant
    _check_variant(variant)
    if not record.feasible:
        return replace(record, stability=INFEASIBLE, eigenvalues=())
    points = record.samples if record.is_set else (record.coords,)
    spectra = [tuple(eigenvalues(numeric_jacobian(c, params, variant))) for c in points]
    classes = [_classify_spectrum(s) for s in spectra]
    # a family is judged by its least stable sampled member
    severity = {STABLE: 0, DEGENERATE: 1, UNSTABLE: 2}
    stability = max(classes, key=severity.__getitem__)
    representative = spectra[len(spectra) // 2]
    return replace(record, eigenvalues=representative, stability=stability)


def classified_catalog(params: GameParams, variant: str = "five") -> list:
    """Catalog with stability verdicts for every feasible candidate."""
    return [classify_stability(rec, params, variant) for rec in equilibrium_catalog(params, variant)]


def tabulated_eigenvalues(label: str, params: GameParams):
    """Closed-form eigenvalue multiset for the labelled five-strategy
    candidate (available for p1..p12), evaluated with principal-branch
    complex square roots.  Returns None where no closed form is tabulated."""
    p = params
    b_u, b_c, c, v, mu, eps, r = p.b_u, p.b_c, p.c, p.v, p.mu, p.eps, p.r
    pT, pD, thT, thD = p.p_T, p.p_D, p.theta_T, p.theta_D

    row_zero_alpha = [
        0.0,
        (b_c * (r - 1) - c * r + v) / r,
        -(pD - 1) * eps * (r - thD) / r,
        eps - b_u * mu / r,
        b_u * mu * (r - 1) / r + eps,
    ]
    row_one_alpha = [
        0.0,
        (b_c * (-r) + b_c + c * r - v) / r,
        eps,
        eps - b_u,
        -(pT - 1) * eps * (r - thT) / r,
    ]
    table = {
        "p1": row_zero_alpha,
        "p2": row_one_alpha,
        "p3": row_zero_alpha,
        "p4": [
            -c,
            b_u * mu,
            b_u * mu / r - eps,
            b_u * mu / r - eps,
            (b_u * mu + pD * eps * (thD - r) + thD * (-eps)) / r,
        ],
        "p5": [
            v - c,
            -b_u * mu,
            b_u * mu * (1.0 / r - 1.0) - eps,
            b_u * mu * (1.0 / r - 1.0) - eps,
            (-b_u * mu * (r - 1) + pD * eps * (thD - r) + thD * (-eps)) / r,
        ],
        "p6": row_zero_alpha,
        "p7": [
            (b_c * (r - 1) - c * r + v) / r,
            (pD - 1) * eps * (r - thD) / r,
            (pD - 1) * eps * (r - thD) / r,
            (-b_u * mu + pD * eps * (r - thD) + thD * eps) / r,
            (b_u * mu * (r - 1) + pD * eps * (r - thD) + thD * eps) / r,
        ],
        "p8": [
            b_u,
            c,
            b_u - eps,
            b_u - eps,
            b_u + thT * (pT - 1) * eps / r - pT * eps,
        ],
        "p9": [
            -b_u,
            c - v,
            -eps,
            -eps,
            thT * (pT - 1) * eps / r - pT * eps,
        ],
        "p10": [
            (b_c * (-r) + b_c + c * r - v) / r,
            eps * (thT + pT * (r - thT)) / r,
            (pT - 1) * eps * (r - thT) / r,
            (pT - 1) * eps * (r - thT) / r,
            eps * (thT + pT * (r - thT)) / r - b_u,
        ],
        "p11": row_one_alpha,
    }
    if label in table:
        return np.array(table[label], dtype=complex)
    if label == "p12":
        if mu in (0.0, 1.0) or v == 0.0:
            return None
        root = (
            np.sqrt(complex(b_u))
            * np.sqrt(complex(c))
            * np.sqrt(complex(c - v))
            / (np.sqrt(complex((mu - 1.0) / mu)) * np.sqrt(complex(v)))
        )
        lam3 = (r * (b_u * mu - mu * eps + eps) - b_u * mu) / ((mu - 1.0) * r)
        lam4 = (b_u * mu * (r - 1) + pD * eps * (r - thD) + eps * (thD - mu * r)) / ((mu - 1.0) * r)
        lam5 = (b_u * mu * (r - 1) - mu * eps * (thT + pT * (r - thT)) + r * eps) / ((mu - 1.0) * r)
        return np.array([-1j * root, 1j * root, lam3, lam4, lam5], dtype=complex)
    return None


def lemma_expectations(params: GameParams, variant: str = "five") -> dict:
    """Stability conditions the analysis pins down in closed form: for the
    five-strategy flow p4 iff mu<0, p5 iff mu>0 and v<c, p9 iff c<v; the
    three-strategy q2/q3/q6 mirror them."""
    p = params
    if variant == "five":
        return {
            "p4": p.mu < 0.0,
            "p5": p.mu > 0.0 and p.v - p.c < 0.0,
            "p9": p.c - p.v < 0.0,
        }
    return {
        "q2": p.mu < 0.0,
        "q3": p.mu > 0.0 and p.v - p.c < 0.0,
        "q6": p.c < p.v,
    }


def lemma_grid_check(base_params: GameParams, variant: str = "five", c_values=None, v_values=None, mu_values=(-0.2, 0.2)) -> list:
    """Compare classified stability with the closed-form expectations over
    a (c, v, mu) grid; returns one row per (point, label) with agreement.
    The default grid keeps c != v so no verdict sits on a boundary."""
    c_values = c_values if c_values is not None else (0.1, 0.3, 0.5, 0.7, 0.9)
    v_values = v_values if v_values is not None else (0.15, 0.35, 0.55, 0.75, 0.95)
    rows = []
    for c in c_values:
        for v in v_values:
            for mu in mu_values:
                params = base_params.replace(c=c, v=v, mu=mu)
                expect = lemma_expectations(params, variant)
                catalog = {rec.label: rec for rec in equilibrium_catalog(params, variant)}
                for label, want_stable in expect.items():
                    rec = classify_stability(catalog[label], params, variant)
                    got_stable = rec.stability == STABLE
                    rows.append(
                        {
                            "c": c,
                            "v": v,
                            "mu": mu,
                            "label": label,
                            "expected_stable": want_stable,
                            "classified": rec.stability,
                            "agrees": got_stable == want_stable,
                        }
                    )
    return rows


def three_strategy_lemma_check(base_params: GameParams, **grid_kwargs) -> list:
    """Grid cross-check of the three-strategy stability conditions (q2, q3,
    q6); any row with ``agrees == False`` is a disagreement."""
    return lemma_grid_check(base_params, "three", **grid_kwargs)
