"""Walker-coin states on a finite integer lattice.

A pure state stores one complex amplitude per (site, coin) pair in an
array of shape ``(n_sites, 2)``. A density matrix stores the full
``(2n, 2n)`` operator with flattened index ``2 * site_index + coin``.
Coin basis ordering is ``[plus, minus]`` throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

STATE_NORM_TOL = 1e-10
COIN_NORM_TOL = 1e-12
DENSITY_TOL = 1e-10


@dataclass(frozen=True)
class Lattice:
    """Closed range of sites [min_site, max_site] containing the origin."""

    min_site: int
    max_site: int

    def __post_init__(self) -> None:
        if not (self.min_site <= 0 <= self.max_site):
            raise ValueError(
                f"lattice [{self.min_site}, {self.max_site}] must contain the origin"
            )

    @classmethod
    def for_steps(cls, steps: int, margin: int = 2) -> "Lattice":
        """Symmetric lattice wide enough for `steps` steps from the origin.

        The extra `margin` sites on each side stay empty and act as a
        guard band for the boundary checks in the evolution routines.
        """
        if steps < 0:
            raise ValueError(f"steps must be non-negative, got {steps}")
        if margin < 1:
            raise ValueError(f"margin must be at least 1, got {margin}")
        reach = steps + margin
        return cls(-reach, reach)

    @property
    def size(self) -> int:
        return self.max_site - self.min_site + 1

    def index(self, site: int) -> int:
        """Array index of a site; raises if the site is outside the lattice."""
        if not (self.min_site <= site <= self.max_site):
            raise ValueError(
                f"site {site} outside lattice [{self.min_site}, {self.max_site}]"
            )
        return site - self.min_site

    def sites(self) -> NDArray[np.int64]:
        return np.arange(self.min_site, self.max_site + 1, dtype=np.int64)


@dataclass(frozen=True)
class CoinVector:
    """Unit-norm coin state with amplitudes on the (plus, minus) basis."""

    plus: complex
    minus: complex

    def __post_init__(self) -> None:
        norm_sq = abs(self.plus) ** 2 + abs(self.minus) ** 2
        if not math.isfinite(norm_sq) or abs(norm_sq - 1.0) > COIN_NORM_TOL:
            raise ValueError(f"coin amplitudes must have unit norm, got |.|^2 = {norm_sq!r}")

    @classmethod
    def symmetric(cls) -> "CoinVector":
        """The balanced coin (|plus> + i|minus>) / sqrt(2)."""
        inv = 1.0 / math.sqrt(2.0)
        return cls(inv, 1j * inv)

    def as_array(self) -> NDArray[np.complex128]:
        return np.array([self.plus, self.minus], dtype=np.complex128)


@dataclass(frozen=True)
class WalkerCoinPureState:
    """Pure state: amplitude array of shape (lattice.size, 2), unit norm."""

    lattice: Lattice
    amplitudes: NDArray[np.complex128]

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        expected = (self.lattice.size, 2)
        if amps.shape != expected:
            raise ValueError(f"amplitude shape {amps.shape} != {expected}")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if not math.isfinite(norm_sq) or abs(norm_sq - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state norm^2 deviates from 1 by {abs(norm_sq - 1.0):.3e}")


@dataclass(frozen=True)
class WalkerCoinDensityMatrix:
    """Mixed state on (site x coin); flattened index is 2 * site_index + coin."""

    lattice: Lattice
    matrix: NDArray[np.complex128]

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix, dtype=np.complex128)
        object.__setattr__(self, "matrix", m)
        dim = 2 * self.lattice.size
        if m.shape != (dim, dim):
            raise ValueError(f"matrix shape {m.shape} != {(dim, dim)}")
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > DENSITY_TOL:
            raise ValueError(f"matrix not Hermitian (defect {herm:.3e})")
        trace = complex(np.trace(m))
        if abs(trace - 1.0) > DENSITY_TOL:
            raise ValueError(f"trace deviates from 1 by {abs(trace - 1.0):.3e}")
        lowest = float(np.min(np.linalg.eigvalsh(0.5 * (m + m.conj().T))))
        if lowest < -1e-8:
            raise ValueError(f"matrix has negative eigenvalue {lowest:.3e}")


@dataclass(frozen=True)
class PositionDistribution:
    """Probability of finding the walker at each lattice site."""

    lattice: Lattice
    probabilities: NDArray[np.float64]

    def __post_init__(self) -> None:
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "probabilities", probs)
        if probs.shape != (self.lattice.size,):
            raise ValueError(f"shape {probs.shape} != {(self.lattice.size,)}")
        if float(np.min(probs)) < -1e-12 or float(np.max(probs)) > 1.0 + 1e-12:
            raise ValueError("probabilities outside [0, 1]")
        total = float(np.sum(probs))
        if abs(total - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")

    def at_site(self, site: int) -> float:
        return float(self.probabilities[self.lattice.index(site)])


def initial_state(lattice: Lattice, coin: CoinVector) -> WalkerCoinPureState:
    """Walker localized at the origin with the given coin state."""
    amps = np.zeros((lattice.size, 2), dtype=np.complex128)
    amps[lattice.index(0), 0] = coin.plus
    amps[lattice.index(0), 1] = coin.minus
    return WalkerCoinPureState(lattice, amps)


def density_from_pure(state: WalkerCoinPureState) -> WalkerCoinDensityMatrix:
    """Rank-one density matrix |psi><psi| of a pure state."""
    vec = state.amplitudes.reshape(-1)
    return WalkerCoinDensityMatrix(state.lattice, np.outer(vec, vec.conj()))


def position_distribution(
    state: WalkerCoinPureState | WalkerCoinDensityMatrix,
) -> PositionDistribution:
    """Marginal distribution over sites, tracing out the coin."""
    if isinstance(state, WalkerCoinPureState):
        probs = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    else:
        diag = np.real(np.diag(state.matrix))
        probs = diag.reshape(-1, 2).sum(axis=1)
    return PositionDistribution(state.lattice, probs)


def reduced_coin_state(
    state: WalkerCoinPureState | WalkerCoinDensityMatrix,
) -> NDArray[np.complex128]:
    """2x2 coin density matrix after tracing out the walker position."""
    if isinstance(state, WalkerCoinPureState):
        amps = state.amplitudes
        rho = amps.T @ amps.conj()
    else:
        n = state.lattice.size
        blocks = state.matrix.reshape(n, 2, n, 2)
        rho = np.einsum("xixj->ij", blocks)
    _check_density(rho, "reduced coin state")
    return rho


def reduced_walker_state(
    state: WalkerCoinPureState | WalkerCoinDensityMatrix,
) -> NDArray[np.complex128]:
    """Position density matrix after tracing out the coin."""
    if isinstance(state, WalkerCoinPureState):
        amps = state.amplitudes
        rho = amps @ amps.conj().T
    else:
        n = state.lattice.size
        blocks = state.matrix.reshape(n, 2, n, 2)
        rho = np.einsum("xiyi->xy", blocks)
    _check_density(rho, "reduced walker state")
    return rho


def purity(rho: NDArray[np.complex128]) -> float:
    """tr(rho^2); equals 1 exactly for pure states."""
    rho = np.asarray(rho, dtype=np.complex128)
    _check_density(rho, "purity input")
    return float(np.real(np.trace(rho @ rho)))


def coin_overlap(rho: NDArray[np.complex128], psi: CoinVector) -> float:
    """Expectation <psi| rho |psi> of a 2x2 coin density matrix."""
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.shape != (2, 2):
        raise ValueError(f"expected a 2x2 coin density matrix, got shape {rho.shape}")
    _check_density(rho, "coin overlap input")
    vec = psi.as_array()
    return float(np.real(vec.conj() @ rho @ vec))


def _check_density(rho: NDArray[np.complex128], label: str) -> None:
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    if herm > DENSITY_TOL:
        raise ValueError(f"{label} not Hermitian (defect {herm:.3e})")
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > DENSITY_TOL:
        raise ValueError(f"{label} trace deviates from 1 by {abs(trace - 1.0):.3e}")
    lowest = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    if lowest < -1e-8:
        raise ValueError(f"{label} has negative eigenvalue {lowest:.3e}")
