"""Revival diagnostics: distances, return probabilities, effective coins.

A schedule exhibits a revival after T steps when the combined operator
acts as identity on position times a fixed coin rotation, so any state
that starts at the origin returns there with certainty. The revival is
complete when that residual coin rotation is the identity up to a
global phase, making the full initial state recur.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .coins import equal_up_to_global_phase
from .evolution import WalkSchedule, evolve, evolve_density, multi_step_operator
from .states import (
    CoinVector,
    Lattice,
    PositionDistribution,
    WalkerCoinDensityMatrix,
    WalkerCoinPureState,
    coin_overlap,
    density_from_pure,
    initial_state,
    position_distribution,
    reduced_coin_state,
)

REVIVAL_TOL = 1e-10
COMPLETENESS_TOL = 1e-8
MAX_STRING_STEPS = 20
PREDICTED_STATE_NORM_TOL = 1e-12


def tv_distance(p: PositionDistribution, q: PositionDistribution) -> float:
    """Total variation distance between two distributions on one lattice."""
    if p.lattice != q.lattice:
        raise ValueError(f"lattice mismatch: {p.lattice} vs {q.lattice}")
    return float(0.5 * np.sum(np.abs(p.probabilities - q.probabilities)))


def tv_from_origin_probability(origin_probability: float) -> float:
    """Distance to a point mass at the origin: 1 - p0.

    Valid whenever the reference distribution is entirely at the origin.
    """
    if not 0.0 <= origin_probability <= 1.0:
        raise ValueError(f"probability outside [0, 1]: {origin_probability!r}")
    return 1.0 - origin_probability


def polya_number(p0_series, horizon: int | None = None) -> float:
    """Probability of at least one return to the origin within the horizon.

    Computed as ``1 - prod(1 - p0(t))`` over the first `horizon` entries
    of the per-step origin probability series.
    """
    probs = np.asarray(p0_series, dtype=np.float64)
    if probs.ndim != 1:
        raise ValueError(f"expected a 1d series, got shape {probs.shape}")
    if horizon is None:
        horizon = probs.size
    if not 0 <= horizon <= probs.size:
        raise ValueError(f"horizon {horizon} outside [0, {probs.size}]")
    if probs.size and (float(probs.min()) < -1e-9 or float(probs.max()) > 1.0 + 1e-9):
        raise ValueError("series contains values outside [0, 1]")
    clipped = np.clip(probs[:horizon], 0.0, 1.0)
    return float(1.0 - np.prod(1.0 - clipped))


def effective_coin_balanced_strings(schedule: WalkSchedule) -> NDArray[np.complex128]:
    """Origin-to-origin coin map summed over balanced branch strings.

    Each step contributes either the plus row or the minus row of its
    coin; a walker beginning and ending at the origin takes each branch
    exactly T/2 times, so summing the ordered projected products over
    all balanced strings gives the effective coin after T steps.

    T must be even and at most ``MAX_STRING_STEPS``; the number of
    strings grows as C(T, T/2).
    """
    total_steps = schedule.steps
    if total_steps % 2 != 0:
        raise ValueError(
            f"walker returns to the origin only after an even number of steps, got {total_steps}"
        )
    if total_steps > MAX_STRING_STEPS:
        raise ValueError(
            f"string enumeration supports at most {MAX_STRING_STEPS} steps, got {total_steps}"
        )
    if total_steps == 0:
        return np.eye(2, dtype=np.complex128)
    coins = [schedule.coin(t) for t in schedule.step_indices()]
    half = total_steps // 2
    strings = list(itertools.combinations(range(total_steps), half))
    n_strings = len(strings)
    up_mask = np.zeros((n_strings, total_steps), dtype=bool)
    for row, positions in enumerate(strings):
        up_mask[row, list(positions)] = True
    products = np.broadcast_to(
        np.eye(2, dtype=np.complex128), (n_strings, 2, 2)
    ).copy()
    for k, coin in enumerate(coins):
        plus_branch = np.zeros((2, 2), dtype=np.complex128)
        plus_branch[0] = coin[0]
        minus_branch = np.zeros((2, 2), dtype=np.complex128)
        minus_branch[1] = coin[1]
        chosen = np.where(up_mask[:, k][:, None, None], plus_branch, minus_branch)
        products = chosen @ products
    return products.sum(axis=0)


def effective_coin_from_operator(
    schedule: WalkSchedule, lattice: Lattice | None = None
) -> NDArray[np.complex128]:
    """Origin-to-origin 2x2 block of the dense multi-step operator."""
    if schedule.steps % 2 != 0:
        raise ValueError(
            f"origin block vanishes after an odd number of steps, got {schedule.steps}"
        )
    if lattice is None:
        lattice = Lattice.for_steps(schedule.steps)
    total = multi_step_operator(schedule, lattice)
    row = 2 * lattice.index(0)
    return total[row : row + 2, row : row + 2].copy()


def is_revival_operator(
    schedule: WalkSchedule,
    window: int = 3,
    tol: float = REVIVAL_TOL,
    lattice: Lattice | None = None,
) -> bool:
    """True when the multi-step operator is identity-on-position times a coin.

    Checks all source sites within `window` of the origin: the operator
    must keep each one in place and apply the same 2x2 coin block as at
    the origin. The default lattice leaves enough guard sites that the
    checked columns cannot reach the cyclic edge.
    """
    if window < 0:
        raise ValueError(f"window must be non-negative, got {window}")
    if lattice is None:
        lattice = Lattice.for_steps(schedule.steps, margin=window + 2)
    reach = window + schedule.steps
    if reach > lattice.max_site - 1 or -reach < lattice.min_site + 1:
        raise ValueError(
            f"window {window} plus {schedule.steps} steps reaches the edge of "
            f"lattice [{lattice.min_site}, {lattice.max_site}]"
        )
    total = multi_step_operator(schedule, lattice)
    n = lattice.size
    blocks = total.reshape(n, 2, n, 2).transpose(0, 2, 1, 3)
    origin = lattice.index(0)
    reference = blocks[origin, origin]
    for offset in range(-window, window + 1):
        col = origin + offset
        column = blocks[:, col]
        stay = column[col]
        leak = np.abs(column).max(axis=(1, 2))
        leak[col] = 0.0
        if float(leak.max()) > tol:
            return False
        if float(np.max(np.abs(stay - reference))) > tol:
            return False
    return True


@dataclass(frozen=True)
class RevivalReport:
    """Diagnostics for one schedule started from a localized state.

    ``overlap_initial`` is the overlap of the final reduced coin state
    with the initial coin; ``overlap_predicted`` uses the coin predicted
    by the effective coin map and is NaN when that prediction has
    vanishing norm. Operator-level fields describe the noiseless walk
    even when the schedule carries a visibility below 1.
    """

    schedule: WalkSchedule
    initial_coin: CoinVector
    origin_probability: float
    tv_distance: float
    polya_truncated: float
    effective_coin: NDArray[np.complex128] | None
    is_revival: bool
    is_complete: bool
    overlap_initial: float
    overlap_predicted: float


def classify(
    schedule: WalkSchedule,
    initial_coin: CoinVector | None = None,
    window: int = 3,
    revival_tol: float = REVIVAL_TOL,
    completeness_tol: float = COMPLETENESS_TOL,
) -> RevivalReport:
    """Run the walk and assemble the full revival diagnosis.

    State-dependent quantities follow the schedule visibility (pure
    evolution at visibility 1, dephased otherwise); the revival and
    completeness verdicts always refer to the noiseless operator.
    """
    if initial_coin is None:
        initial_coin = CoinVector.symmetric()
    lattice = Lattice.for_steps(schedule.steps)
    start = initial_state(lattice, initial_coin)
    start_distribution = position_distribution(start)

    if schedule.visibility == 1.0:
        trajectory: list[WalkerCoinPureState | WalkerCoinDensityMatrix] = list(
            evolve(start, schedule)
        )
        final: WalkerCoinPureState | WalkerCoinDensityMatrix = (
            trajectory[-1] if trajectory else start
        )
    else:
        rho0 = density_from_pure(start)
        trajectory = list(evolve_density(rho0, schedule))
        final = trajectory[-1] if trajectory else rho0

    p0_series = [position_distribution(state).at_site(0) for state in trajectory]
    final_distribution = position_distribution(final)
    origin_probability = final_distribution.at_site(0)
    distance = tv_distance(final_distribution, start_distribution)
    polya = polya_number(p0_series)

    unitary = schedule.with_visibility(1.0)
    even = schedule.steps % 2 == 0
    effective = effective_coin_from_operator(unitary) if even else None
    revival = is_revival_operator(unitary, window=window, tol=revival_tol)
    complete = (
        revival
        and effective is not None
        and equal_up_to_global_phase(effective, np.eye(2), completeness_tol)
    )

    coin_rho = reduced_coin_state(final)
    overlap_initial = coin_overlap(coin_rho, initial_coin)
    overlap_predicted = math.nan
    if effective is not None:
        predicted = effective @ initial_coin.as_array()
        norm = float(np.linalg.norm(predicted))
        if norm > PREDICTED_STATE_NORM_TOL:
            predicted = predicted / norm
            overlap_predicted = coin_overlap(
                coin_rho, CoinVector(complex(predicted[0]), complex(predicted[1]))
            )

    return RevivalReport(
        schedule=schedule,
        initial_coin=initial_coin,
        origin_probability=origin_probability,
        tv_distance=distance,
        polya_truncated=polya,
        effective_coin=effective,
        is_revival=revival,
        is_complete=complete,
        overlap_initial=overlap_initial,
        overlap_predicted=overlap_predicted,
    )
