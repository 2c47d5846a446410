import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rampwalk.coins import StepConvention
from rampwalk.evolution import (
    BoundaryOverflowError,
    WalkSchedule,
    bisect_visibility,
    evolve,
    evolve_density,
    multi_step_operator,
    origin_probability_series,
    shift_operator,
    step,
    step_operator,
)
from rampwalk.states import (
    CoinVector,
    Lattice,
    WalkerCoinPureState,
    density_from_pure,
    initial_state,
    position_distribution,
    purity,
    reduced_coin_state,
)

import oracles

angle = st.floats(min_value=0.0, max_value=math.pi / 2, allow_nan=False)


def symmetric_start(steps: int) -> WalkerCoinPureState:
    lattice = Lattice.for_steps(steps)
    return initial_state(lattice, CoinVector.symmetric())


def oracle_amplitudes_to_array(state_dict: dict, lattice: Lattice) -> np.ndarray:
    amps = np.zeros((lattice.size, 2), dtype=np.complex128)
    for site, (plus, minus) in state_dict.items():
        amps[lattice.index(site), 0] = plus
        amps[lattice.index(site), 1] = minus
    return amps


def test_schedule_validation():
    WalkSchedule(0.0, 0.0, 0)  # zero steps is a valid empty walk
    with pytest.raises(ValueError):
        WalkSchedule(0.0, 0.0, -1)
    with pytest.raises(ValueError):
        WalkSchedule(math.nan, 0.0, 2)
    with pytest.raises(ValueError):
        WalkSchedule(0.0, 0.0, 2, visibility=1.5)
    with pytest.raises(ValueError):
        WalkSchedule(0.0, 0.0, 2, visibility=-0.1)


def test_schedule_step_indices_by_convention():
    one = WalkSchedule(0.0, 0.1, 3)
    zero = WalkSchedule(0.0, 0.1, 3, convention=StepConvention.ZERO_BASED)
    assert list(one.step_indices()) == [1, 2, 3]
    assert list(zero.step_indices()) == [0, 1, 2]


def test_shift_operator_moves_plus_up_minus_down():
    lat = Lattice(-2, 2)
    op = shift_operator(lat)
    assert np.max(np.abs(op.conj().T @ op - np.eye(2 * lat.size))) < 1e-15
    vec = np.zeros(2 * lat.size, dtype=complex)
    vec[2 * lat.index(0)] = 1.0  # (site 0, plus)
    moved = op @ vec
    assert moved[2 * lat.index(1)] == 1.0
    vec = np.zeros(2 * lat.size, dtype=complex)
    vec[2 * lat.index(0) + 1] = 1.0  # (site 0, minus)
    moved = op @ vec
    assert moved[2 * lat.index(-1) + 1] == 1.0


def test_step_rejects_out_of_schedule_index():
    sched = WalkSchedule(0.0, math.pi / 8, 2)
    state = symmetric_start(2)
    with pytest.raises(ValueError):
        step(state, sched, 0)
    with pytest.raises(ValueError):
        step(state, sched, 3)


def test_evolve_requires_unit_visibility():
    sched = WalkSchedule(0.0, math.pi / 8, 2, visibility=0.9)
    with pytest.raises(ValueError):
        evolve(symmetric_start(2), sched)


def test_one_step_moves_symmetric_coin_down_at_ramp_eighth_pi():
    # rx(pi/8) sends the symmetric coin onto the minus branch exactly
    sched = WalkSchedule(0.0, math.pi / 8, 1)
    final = evolve(symmetric_start(1), sched)[-1]
    dist = position_distribution(final)
    assert dist.at_site(-1) == pytest.approx(1.0, abs=1e-12)


@given(angle, angle, st.integers(min_value=1, max_value=6))
@settings(max_examples=120)
def test_evolve_matches_dict_oracle(theta, omega, steps):
    sched = WalkSchedule(theta, omega, steps)
    start = symmetric_start(steps)
    trajectory = evolve(start, sched)
    oracle_trajectory = oracles.walk_states(theta, omega, steps)
    for ours, reference in zip(trajectory, oracle_trajectory):
        expected = oracle_amplitudes_to_array(reference, start.lattice)
        assert np.max(np.abs(ours.amplitudes - expected)) < 1e-10


@given(angle, angle, st.integers(min_value=1, max_value=8))
@settings(max_examples=120)
def test_evolve_preserves_norm(theta, omega, steps):
    sched = WalkSchedule(theta, omega, steps)
    for state in evolve(symmetric_start(steps), sched):
        norm_sq = float(np.sum(np.abs(state.amplitudes) ** 2))
        assert abs(norm_sq - 1.0) < 1e-12


def test_sixteen_step_walk_matches_oracle_end_to_end():
    sched = WalkSchedule(0.0, math.pi / 8, 16)
    start = symmetric_start(16)
    final = evolve(start, sched)[-1]
    expected = oracle_amplitudes_to_array(
        oracles.walk_states(0.0, math.pi / 8, 16)[-1], start.lattice
    )
    assert np.max(np.abs(final.amplitudes - expected)) < 1e-10


def test_zero_based_convention_changes_the_walk():
    # one-based ramping revives at (theta 0, omega pi/8, T 2); zero-based does not
    one = WalkSchedule(0.0, math.pi / 8, 2)
    zero = WalkSchedule(0.0, math.pi / 8, 2, convention=StepConvention.ZERO_BASED)
    p_one = position_distribution(evolve(symmetric_start(2), one)[-1]).at_site(0)
    p_zero = position_distribution(evolve(symmetric_start(2), zero)[-1]).at_site(0)
    assert p_one == pytest.approx(1.0, abs=1e-12)
    assert p_zero == pytest.approx(0.5, abs=1e-12)


def test_boundary_overflow_raises_instead_of_wrapping():
    lattice = Lattice(-2, 2)
    state = initial_state(lattice, CoinVector.symmetric())
    sched = WalkSchedule(0.3, 0.2, 4)
    with pytest.raises(BoundaryOverflowError):
        evolve(state, sched)


def test_guard_sites_stay_empty_over_long_walk():
    sched = WalkSchedule(0.0, math.pi / 8, 16)
    for state in evolve(symmetric_start(16), sched):
        edge = np.abs(state.amplitudes[[0, -1], :])
        assert float(edge.max()) < 1e-14


def test_translation_covariance():
    steps = 4
    sched = WalkSchedule(0.4, 0.2, steps)
    wide = Lattice.for_steps(steps + 3)
    centered = initial_state(wide, CoinVector.symmetric())
    offset_amps = np.zeros((wide.size, 2), dtype=np.complex128)
    offset_amps[wide.index(3), 0] = CoinVector.symmetric().plus
    offset_amps[wide.index(3), 1] = CoinVector.symmetric().minus
    shifted = WalkerCoinPureState(wide, offset_amps)
    final_centered = evolve(centered, sched)[-1]
    final_shifted = evolve(shifted, sched)[-1]
    assert np.max(
        np.abs(np.roll(final_centered.amplitudes, 3, axis=0) - final_shifted.amplitudes)
    ) < 1e-12


def test_multi_step_operator_zero_steps_is_identity():
    sched = WalkSchedule(0.3, 0.1, 0)
    lat = Lattice(-2, 2)
    assert np.array_equal(multi_step_operator(sched, lat), np.eye(2 * lat.size))


@given(angle, angle, st.integers(min_value=1, max_value=5))
@settings(max_examples=60)
def test_multi_step_operator_matches_evolve(theta, omega, steps):
    sched = WalkSchedule(theta, omega, steps)
    start = symmetric_start(steps)
    total = multi_step_operator(sched, start.lattice)
    assert np.max(np.abs(total.conj().T @ total - np.eye(total.shape[0]))) < 1e-12
    via_operator = total @ start.amplitudes.reshape(-1)
    via_steps = evolve(start, sched)[-1].amplitudes.reshape(-1)
    assert np.max(np.abs(via_operator - via_steps)) < 1e-10


def test_multi_step_operator_is_ordered_product_of_steps():
    sched = WalkSchedule(0.2, 0.5, 3)
    lat = Lattice.for_steps(3)
    expected = (
        step_operator(sched, lat, 3)
        @ step_operator(sched, lat, 2)
        @ step_operator(sched, lat, 1)
    )
    assert np.max(np.abs(multi_step_operator(sched, lat) - expected)) < 1e-12


def test_density_at_unit_visibility_matches_pure():
    sched = WalkSchedule(0.0, math.pi / 8, 8)
    start = symmetric_start(8)
    pure_states = evolve(start, sched)
    mixed_states = evolve_density(density_from_pure(start), sched)
    for pure, mixed in zip(pure_states, mixed_states):
        p = position_distribution(pure).probabilities
        q = position_distribution(mixed).probabilities
        assert np.max(np.abs(p - q)) < 1e-10
        assert np.max(
            np.abs(reduced_coin_state(pure) - reduced_coin_state(mixed))
        ) < 1e-10


@given(
    angle,
    angle,
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    st.integers(min_value=1, max_value=5),
)
@settings(max_examples=60)
def test_density_walk_matches_dict_oracle(theta, omega, visibility, steps):
    sched = WalkSchedule(theta, omega, steps, visibility=visibility)
    start = density_from_pure(symmetric_start(steps))
    ours = origin_probability_series(start, sched)
    reference = oracles.density_p0_series(theta, omega, steps, visibility)
    assert np.max(np.abs(np.array(ours) - np.array(reference))) < 1e-10


@given(
    angle,
    angle,
    st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    st.integers(min_value=1, max_value=5),
)
@settings(max_examples=40)
def test_dephasing_never_increases_purity(theta, omega, visibility, steps):
    sched = WalkSchedule(theta, omega, steps, visibility=visibility)
    start = density_from_pure(symmetric_start(steps))
    previous = 1.0
    for state in evolve_density(start, sched):
        blocks = state.matrix
        current = float(np.real(np.trace(blocks @ blocks)))
        assert current <= previous + 1e-10
        previous = current


def test_full_dephasing_return_probability_formula():
    # with theta 0 and visibility 0 the two-step return probability is sin(4 omega)^2
    for omega in (math.pi / 8, math.pi / 10, 3.0 * math.pi / 16):
        sched = WalkSchedule(0.0, omega, 2, visibility=0.0)
        start = density_from_pure(symmetric_start(2))
        p0 = origin_probability_series(start, sched)[-1]
        assert p0 == pytest.approx(math.sin(4.0 * omega) ** 2, abs=1e-12)


def test_density_boundary_check_is_static():
    lattice = Lattice(-3, 3)
    start = density_from_pure(initial_state(lattice, CoinVector.symmetric()))
    with pytest.raises(BoundaryOverflowError):
        evolve_density(start, WalkSchedule(0.3, 0.2, 3))
    evolve_density(start, WalkSchedule(0.3, 0.2, 2))


def test_reduced_coin_purity_series_at_flagship_point():
    sched = WalkSchedule(0.0, math.pi / 8, 4)
    values = [
        purity(reduced_coin_state(state))
        for state in evolve(symmetric_start(4), sched)
    ]
    expected = [1.0, 1.0, 0.5, 0.5]
    assert np.max(np.abs(np.array(values) - np.array(expected))) < 1e-12


def test_reduced_coin_purity_strictly_between_half_and_one():
    sched = WalkSchedule(0.0, math.pi / 10, 4)
    final = evolve(symmetric_start(4), sched)[-1]
    value = purity(reduced_coin_state(final))
    assert 0.5 + 1e-3 < value < 1.0 - 1e-3


def test_bisect_visibility_recovers_known_value():
    sched = WalkSchedule(0.0, math.pi / 8, 8)
    start = density_from_pure(symmetric_start(8))
    target = origin_probability_series(start, sched.with_visibility(0.93))[-1]
    visibility, achieved = bisect_visibility(sched, start, target, tol=1e-6)
    assert abs(achieved - target) <= 1e-6
    assert abs(visibility - 0.93) < 1e-3


def test_bisect_visibility_rejects_unbracketed_target():
    sched = WalkSchedule(0.0, math.pi / 8, 8)
    start = density_from_pure(symmetric_start(8))
    with pytest.raises(ValueError):
        bisect_visibility(sched, start, 0.1)
    with pytest.raises(ValueError):
        bisect_visibility(sched, start, 0.95, lo=0.9, hi=0.8)
