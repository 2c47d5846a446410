"""Two-level coin operators for the ramped-coin walk.

The coin applied at step t is a product of two wave-plate style
rotations: a fixed bias rotation about y and a rotation about x whose
angle grows linearly with the step index, ``rx(omega * t) @ ry(theta)``.
Angles follow the wave-plate convention, meaning the matrix entries
contain twice the nominal angle.

Coin basis ordering is ``[plus, minus]``: the plus component moves the
walker up, the minus component moves it down.
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
from numpy.typing import NDArray

CoinOperator = NDArray[np.complex128]

UNITARITY_TOL = 1e-12
PHASE_EQUAL_TOL = 1e-8


class StepConvention(Enum):
    """Which step indices feed the ramped coin over a walk of T steps."""

    ONE_BASED = "one-based"  # t = 1..T; reproduces the revival catalog
    ZERO_BASED = "zero-based"  # t = 0..T-1; first coin has no ramp

    def step_indices(self, steps: int) -> range:
        if self is StepConvention.ONE_BASED:
            return range(1, steps + 1)
        return range(0, steps)

    @property
    def first_step(self) -> int:
        return 1 if self is StepConvention.ONE_BASED else 0


def rx(phi: float) -> CoinOperator:
    """Rotation about x by nominal angle phi.

    Returns ``[[cos 2phi, i sin 2phi], [i sin 2phi, cos 2phi]]``.
    """
    if not math.isfinite(phi):
        raise ValueError(f"rotation angle must be finite, got {phi!r}")
    c = math.cos(2.0 * phi)
    s = math.sin(2.0 * phi)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=np.complex128)


def ry(theta: float) -> CoinOperator:
    """Rotation about y by nominal angle theta.

    Returns ``[[cos 2theta, -sin 2theta], [sin 2theta, cos 2theta]]``.
    """
    if not math.isfinite(theta):
        raise ValueError(f"rotation angle must be finite, got {theta!r}")
    c = math.cos(2.0 * theta)
    s = math.sin(2.0 * theta)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def coin_at_step(
    theta: float,
    omega: float,
    t: int,
    convention: StepConvention = StepConvention.ONE_BASED,
) -> CoinOperator:
    """Coin operator for step t: ``rx(omega * t) @ ry(theta)``."""
    if t < convention.first_step:
        raise ValueError(
            f"step index {t} is not valid under {convention.value} indexing"
        )
    return rx(omega * t) @ ry(theta)


def unitarity_defect(matrix: NDArray[np.complex128]) -> float:
    """Largest entrywise deviation of ``m.H @ m`` from the identity."""
    m = np.asarray(matrix, dtype=np.complex128)
    gram = m.conj().T @ m
    return float(np.max(np.abs(gram - np.eye(m.shape[0]))))


def compose(a: CoinOperator, b: CoinOperator) -> CoinOperator:
    """Product ``a @ b``, with a applied after b. Both must be unitary."""
    for name, m in (("a", a), ("b", b)):
        defect = unitarity_defect(m)
        if defect > UNITARITY_TOL:
            raise ValueError(f"operand {name} is not unitary (defect {defect:.3e})")
    return np.asarray(a, dtype=np.complex128) @ np.asarray(b, dtype=np.complex128)


def equal_up_to_global_phase(
    a: NDArray[np.complex128],
    b: NDArray[np.complex128],
    tol: float = PHASE_EQUAL_TOL,
) -> bool:
    """True when ``a == lam * b`` entrywise within tol for some unit-modulus lam.

    The phase is fixed by aligning at the largest-modulus entry of b, then
    the comparison uses the max-abs norm of the residual.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    idx = np.unravel_index(int(np.argmax(np.abs(b))), b.shape)
    pivot = b[idx]
    if abs(pivot) == 0.0:
        return float(np.max(np.abs(a))) <= tol
    lam = a[idx] / pivot
    if abs(lam) == 0.0:
        return False
    lam = lam / abs(lam)
    return float(np.max(np.abs(a - lam * b))) <= tol
