"""Step operators and time evolution for the ramped-coin walk.

One step applies the step-dependent coin and then the conditional
shift: the plus component moves one site up, the minus component one
site down. A walk of T steps applies steps in increasing index order,
so the combined operator is ``U(T) @ ... @ U(1)`` under one-based
indexing.

Pure states evolve through :func:`evolve`. Mixed states evolve through
:func:`evolve_density`, which follows each unitary step with a coin
dephasing channel of strength set by the schedule visibility:

    rho -> (1 + v)/2 * rho + (1 - v)/2 * (I x Z) rho (I x Z)

with Z diagonal on the coin. Visibility 1 reproduces unitary evolution;
visibility 0 removes all coin coherence after every step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.typing import NDArray

from .coins import CoinOperator, StepConvention, coin_at_step
from .states import (
    Lattice,
    WalkerCoinDensityMatrix,
    WalkerCoinPureState,
    position_distribution,
)

BOUNDARY_LEAK_TOL = 1e-14


class BoundaryOverflowError(RuntimeError):
    """Amplitude would leave the lattice; use a wider lattice instead."""


@dataclass(frozen=True)
class WalkSchedule:
    """One walk configuration: coin biases, step count, indexing, visibility.

    ``theta`` is the fixed bias angle, ``omega`` the ramp rate per step,
    and ``visibility`` the per-step dephasing parameter (1 means unitary).
    """

    theta: float
    omega: float
    steps: int
    convention: StepConvention = StepConvention.ONE_BASED
    visibility: float = 1.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta) or not math.isfinite(self.omega):
            raise ValueError("theta and omega must be finite")
        if self.steps < 0:
            raise ValueError(f"steps must be non-negative, got {self.steps}")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")

    def step_indices(self) -> range:
        return self.convention.step_indices(self.steps)

    def coin(self, t: int) -> CoinOperator:
        """Coin operator applied at step index t."""
        return coin_at_step(self.theta, self.omega, t, self.convention)

    def with_visibility(self, visibility: float) -> "WalkSchedule":
        return replace(self, visibility=visibility)


def shift_operator(lattice: Lattice) -> NDArray[np.complex128]:
    """Dense conditional shift on (site x coin): plus up, minus down.

    Edge sites wrap cyclically so the matrix stays exactly unitary.
    Callers are responsible for keeping support away from the edges;
    the state-level routines below enforce this and raise
    :class:`BoundaryOverflowError` instead of wrapping.
    """
    n = lattice.size
    dim = 2 * n
    op = np.zeros((dim, dim), dtype=np.complex128)
    idx = np.arange(n)
    op[2 * ((idx + 1) % n), 2 * idx] = 1.0
    op[2 * ((idx - 1) % n) + 1, 2 * idx + 1] = 1.0
    return op


def step_operator(schedule: WalkSchedule, lattice: Lattice, t: int) -> NDArray[np.complex128]:
    """Dense single-step operator shift @ (I x coin(t)) on the lattice."""
    coin = schedule.coin(t)
    return shift_operator(lattice) @ np.kron(np.eye(lattice.size), coin)


def _shifted(coined: NDArray[np.complex128]) -> NDArray[np.complex128]:
    top = abs(coined[-1, 0])
    bottom = abs(coined[0, 1])
    if top >= BOUNDARY_LEAK_TOL or bottom >= BOUNDARY_LEAK_TOL:
        raise BoundaryOverflowError(
            f"amplitude {max(top, bottom):.3e} would leave the lattice"
        )
    out = np.zeros_like(coined)
    out[1:, 0] = coined[:-1, 0]
    out[:-1, 1] = coined[1:, 1]
    return out


def step(state: WalkerCoinPureState, schedule: WalkSchedule, t: int) -> WalkerCoinPureState:
    """Apply the coin for step index t, then the conditional shift."""
    if t not in schedule.step_indices():
        raise ValueError(
            f"step index {t} outside schedule range "
            f"{schedule.step_indices()} ({schedule.convention.value})"
        )
    coined = state.amplitudes @ schedule.coin(t).T
    return WalkerCoinPureState(state.lattice, _shifted(coined))


def evolve(state: WalkerCoinPureState, schedule: WalkSchedule) -> list[WalkerCoinPureState]:
    """All intermediate pure states, one per step, in step order.

    Requires visibility 1; dephased walks go through :func:`evolve_density`.
    """
    if schedule.visibility != 1.0:
        raise ValueError(
            "pure-state evolution requires visibility 1; use evolve_density"
        )
    out: list[WalkerCoinPureState] = []
    current = state
    for t in schedule.step_indices():
        current = step(current, schedule, t)
        out.append(current)
    return out


def multi_step_operator(
    schedule: WalkSchedule, lattice: Lattice | None = None
) -> NDArray[np.complex128]:
    """Dense product of all step operators, later steps multiplied on the left.

    With zero steps this is the identity. The default lattice is
    ``Lattice.for_steps(schedule.steps)``.
    """
    if lattice is None:
        lattice = Lattice.for_steps(schedule.steps)
    eye_sites = np.eye(lattice.size)
    shift = shift_operator(lattice)
    total = np.eye(2 * lattice.size, dtype=np.complex128)
    for t in schedule.step_indices():
        total = shift @ np.kron(eye_sites, schedule.coin(t)) @ total
    return total


def _support_reach(rho: WalkerCoinDensityMatrix) -> tuple[int, int]:
    populations = np.real(np.diag(rho.matrix)).reshape(-1, 2).sum(axis=1)
    occupied = np.nonzero(populations > BOUNDARY_LEAK_TOL)[0]
    if occupied.size == 0:
        return 0, 0
    sites = rho.lattice.sites()
    return int(sites[occupied[0]]), int(sites[occupied[-1]])


def evolve_density(
    rho: WalkerCoinDensityMatrix, schedule: WalkSchedule
) -> list[WalkerCoinDensityMatrix]:
    """All intermediate density matrices, one per step, in step order.

    Each step is the unitary walk step followed by the coin dephasing
    channel at the schedule visibility. The lattice must be wide enough
    to hold the initial support plus one site per step; otherwise a
    :class:`BoundaryOverflowError` is raised before any evolution.
    """
    lattice = rho.lattice
    lowest, highest = _support_reach(rho)
    if highest + schedule.steps > lattice.max_site - 1 or (
        lowest - schedule.steps < lattice.min_site + 1
    ):
        raise BoundaryOverflowError(
            f"support [{lowest}, {highest}] plus {schedule.steps} steps exceeds "
            f"lattice [{lattice.min_site}, {lattice.max_site}]"
        )
    eye_sites = np.eye(lattice.size)
    shift = shift_operator(lattice)
    v = schedule.visibility
    signs = np.tile(np.array([1.0, -1.0]), lattice.size)
    dephase_mask = np.outer(signs, signs)
    out: list[WalkerCoinDensityMatrix] = []
    matrix = rho.matrix
    for t in schedule.step_indices():
        u = shift @ np.kron(eye_sites, schedule.coin(t))
        matrix = u @ matrix @ u.conj().T
        matrix = 0.5 * (1.0 + v) * matrix + 0.5 * (1.0 - v) * (dephase_mask * matrix)
        out.append(WalkerCoinDensityMatrix(lattice, matrix))
    return out


def origin_probability_series(
    rho: WalkerCoinDensityMatrix, schedule: WalkSchedule
) -> list[float]:
    """Probability of finding the walker at the origin after each step."""
    series = []
    for state in evolve_density(rho, schedule):
        series.append(position_distribution(state).at_site(0))
    return series


def bisect_visibility(
    schedule: WalkSchedule,
    initial: WalkerCoinDensityMatrix,
    target_origin_probability: float,
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = 1e-4,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Visibility whose final origin probability matches the target.

    Bisects on the visibility interval [lo, hi]; the origin probability
    after the last step must be monotone between the bracket endpoints
    and straddle the target. Returns (visibility, origin probability).
    """
    if not 0.0 <= lo < hi <= 1.0:
        raise ValueError(f"need 0 <= lo < hi <= 1, got [{lo}, {hi}]")

    def p0_at(v: float) -> float:
        return origin_probability_series(initial, schedule.with_visibility(v))[-1]

    p_lo = p0_at(lo)
    p_hi = p0_at(hi)
    if abs(p_lo - target_origin_probability) <= tol:
        return lo, p_lo
    if abs(p_hi - target_origin_probability) <= tol:
        return hi, p_hi
    if not min(p_lo, p_hi) < target_origin_probability < max(p_lo, p_hi):
        raise ValueError(
            f"target {target_origin_probability} not bracketed: "
            f"p0({lo}) = {p_lo:.6f}, p0({hi}) = {p_hi:.6f}"
        )
    increasing = p_hi > p_lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        p_mid = p0_at(mid)
        if abs(p_mid - target_origin_probability) <= tol:
            return mid, p_mid
        if (p_mid < target_origin_probability) == increasing:
            lo = mid
        else:
            hi = mid
    raise RuntimeError(f"bisection did not converge within {max_iter} iterations")
