"""Dense state-vector simulation of up to three d-level registers.

Index convention: the register listed first in the layout is the most
significant base-d digit of the flat amplitude index, so for registers
(H, T) the basis state |h>|t> sits at index h*d + t.

Gates are pure functions returning new states. Each gate re-checks the
2-norm and raises NotNormalized if it drifted beyond 1e-9. The per-gate
tables (QFT matrix, copy permutation, phase diagonal) are cached per
dimension, which keeps the shot loops cheap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    NotNormalized,
    ModulusMismatch,
    SameRegister,
    UnknownRegister,
    ValueOutOfRange,
)
from .field import FieldElement

_GATE_NORM_TOL = 1e-9
_MEASURE_NORM_TOL = 1e-6


@dataclass(frozen=True)
class RegisterLayout:
    """Dimension d and ordered register labels (home H, transmitted T, and
    optionally one adversary ancilla)."""

    d: int
    registers: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueOutOfRange("register dimension must be at least 2")
        if self.d > 1024:
            raise ValueOutOfRange("register dimension capped at 1024")
        if not 1 <= len(self.registers) <= 3:
            raise ValueOutOfRange("layout supports 1 to 3 registers")
        if len(set(self.registers)) != len(self.registers):
            raise ValueOutOfRange("register labels must be unique")

    @property
    def qubits_per_register(self) -> int:
        """c = ceil(log2 d), the width of the equivalent qubit register."""
        return (self.d - 1).bit_length()

    def axis(self, register: str) -> int:
        try:
            return self.registers.index(register)
        except ValueError:
            raise UnknownRegister(f"no register {register!r} in {self.registers}") from None


class QuditState:
    """Complex amplitudes over the layout's registers (length d**k)."""

    __slots__ = ("layout", "amplitudes")

    def __init__(self, layout: RegisterLayout, amplitudes: np.ndarray):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        expected = layout.d ** len(layout.registers)
        if amplitudes.shape != (expected,):
            raise ValueOutOfRange(
                f"amplitude vector must have length {expected}, got {amplitudes.shape}"
            )
        self.layout = layout
        self.amplitudes = amplitudes

    def norm(self) -> float:
        return math.sqrt(np.vdot(self.amplitudes, self.amplitudes).real)

    def marginal(self, register: str) -> np.ndarray:
        """Probability distribution of one register, other registers traced out."""
        axis = self.layout.axis(register)
        d, k = self.layout.d, len(self.layout.registers)
        probs = (self.amplitudes.real**2 + self.amplitudes.imag**2).reshape(
            (d**axis, d, d ** (k - axis - 1))
        )
        return probs.sum(axis=(0, 2))


@dataclass(frozen=True)
class MeasurementOutcome:
    register: str
    value: int
    post_state: QuditState


def basis_state(layout: RegisterLayout, values: dict[str, int]) -> QuditState:
    """Computational basis state with the given value per register."""
    if set(values) != set(layout.registers):
        missing = set(layout.registers) ^ set(values)
        raise UnknownRegister(f"values must cover the layout exactly, mismatch: {missing}")
    index = 0
    for label in layout.registers:
        v = values[label]
        if not 0 <= v < layout.d:
            raise ValueOutOfRange(f"value {v} for register {label!r} not in [0, {layout.d})")
        index = index * layout.d + v
    amps = np.zeros(layout.d ** len(layout.registers), dtype=np.complex128)
    amps[index] = 1.0
    return QuditState(layout, amps)


@lru_cache(maxsize=None)
def _qft_matrix(d: int) -> np.ndarray:
    q = np.arange(d)
    m = np.exp(2j * np.pi * np.outer(q, q) / d) / math.sqrt(d)
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _iqft_matrix(d: int) -> np.ndarray:
    m = _qft_matrix(d).conj()
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _copy_table(d: int) -> np.ndarray:
    """Target-value table of the copy gate: entry [a, b] is the target value
    that basis pair (a, b) maps to.

    The gate is bitwise XOR on the c-bit encodings, exactly the CNOT^(x)c
    cascade on qubit registers. For non-power-of-two d some XOR results fall
    outside [0, d); those pairs (never produced by an honest run, whose
    targets are only ever |0> or a copy of the control) are left unchanged,
    which keeps the table a self-inverse permutation in every row.
    """
    a = np.arange(d)[:, None]
    b = np.arange(d)[None, :]
    x = a ^ b
    table = np.where(x < d, x, b)
    table.setflags(write=False)
    return table


@lru_cache(maxsize=None)
def _copy_permutation(d: int, k: int, c_axis: int, t_axis: int) -> np.ndarray:
    """Flat gather indices realizing the copy gate on a d**k state: the gate
    is an involution, so out = amps[perm] with perm[dest] = source = dest
    with the target digit re-mapped through _copy_table."""
    idx = np.arange(d**k)
    digits = [(idx // d ** (k - 1 - axis)) % d for axis in range(k)]
    new_target = _copy_table(d)[digits[c_axis], digits[t_axis]]
    perm = idx + (new_target - digits[t_axis]) * d ** (k - 1 - t_axis)
    perm.setflags(write=False)
    return perm


def _phase_diagonal(d: int, shadow_value: int, k: int, axis: int) -> np.ndarray:
    # Caching every (d, shadow) diagonal only pays off for the small d the
    # protocol actually runs at; large d would hoard memory.
    if d <= 64:
        return _phase_diagonal_cached(d, shadow_value, k, axis)
    return _build_phase_diagonal(d, shadow_value, k, axis)


@lru_cache(maxsize=None)
def _phase_diagonal_cached(d: int, shadow_value: int, k: int, axis: int) -> np.ndarray:
    full = _build_phase_diagonal(d, shadow_value, k, axis)
    full.setflags(write=False)
    return full


def _build_phase_diagonal(d: int, shadow_value: int, k: int, axis: int) -> np.ndarray:
    """exp(2 pi i * s * value / d) broadcast over the full flat index space."""
    phases = np.exp(2j * np.pi * shadow_value * np.arange(d) / d)
    shape = [1] * k
    shape[axis] = d
    return np.broadcast_to(phases.reshape(shape), (d,) * k).reshape(-1).copy()


def _check_norm(amps: np.ndarray, tol: float) -> None:
    n2 = np.vdot(amps, amps).real
    if abs(n2 - 1.0) > 2 * tol:
        raise NotNormalized(f"state norm {math.sqrt(n2)} deviates from 1 beyond {tol}")


def _apply_matrix(state: QuditState, register: str, matrix: np.ndarray) -> QuditState:
    axis = state.layout.axis(register)
    d, k = state.layout.d, len(state.layout.registers)
    amps = state.amplitudes
    if axis == 0:
        out = (matrix @ amps.reshape(d, -1)).reshape(-1)
    elif axis == k - 1:
        out = (amps.reshape(-1, d) @ matrix.T).reshape(-1)
    else:
        out = np.einsum("ij,ajb->aib", matrix, amps.reshape(d, d, d)).reshape(-1)
    _check_norm(out, _GATE_NORM_TOL)
    return QuditState(state.layout, out)


def apply_qft(state: QuditState, register: str) -> QuditState:
    """|s> -> (1/sqrt d) sum_q exp(2 pi i s q / d) |q> on one register."""
    return _apply_matrix(state, register, _qft_matrix(state.layout.d))


def apply_iqft(state: QuditState, register: str) -> QuditState:
    """Inverse of apply_qft (conjugate transpose; the matrix is symmetric)."""
    return _apply_matrix(state, register, _iqft_matrix(state.layout.d))


def apply_copy(state: QuditState, control: str, target: str) -> QuditState:
    """Self-inverse copy gate: |a>|0> -> |a>|a> and |a>|a> -> |a>|0>.

    See _copy_table for the exact basis permutation.
    """
    if control == target:
        raise SameRegister(f"control and target are both {control!r}")
    layout = state.layout
    perm = _copy_permutation(
        layout.d, len(layout.registers), layout.axis(control), layout.axis(target)
    )
    out = state.amplitudes[perm]
    _check_norm(out, _GATE_NORM_TOL)
    return QuditState(layout, out)


def apply_shadow_phase(state: QuditState, register: str, shadow: FieldElement) -> QuditState:
    """Phase-kickback form of the shadow oracle: |k> gains exp(2 pi i s k / d).

    The player's eigenstate stays a fixed computational basis state throughout
    the protocol and factors out, so only this diagonal on the transmitted
    register is simulated.
    """
    if shadow.modulus.d != state.layout.d:
        raise ModulusMismatch(
            f"shadow modulus {shadow.modulus.d} != register dimension {state.layout.d}"
        )
    layout = state.layout
    diag = _phase_diagonal(
        layout.d, shadow.value, len(layout.registers), layout.axis(register)
    )
    out = state.amplitudes * diag
    _check_norm(out, _GATE_NORM_TOL)
    return QuditState(layout, out)


def measure(state: QuditState, register: str, rng: np.random.Generator) -> MeasurementOutcome:
    """Projective measurement of one register in the computational basis.

    Samples from the register marginal by inverse CDF, so the outcome is a
    deterministic function of the rng stream.
    """
    _check_norm(state.amplitudes, _MEASURE_NORM_TOL)
    probs = state.marginal(register)
    cdf = np.cumsum(probs)
    # Scaling by cdf[-1] absorbs sub-tolerance norm error and guarantees the
    # draw never lands past the last value with positive probability.
    value = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    value = min(value, state.layout.d - 1)
    axis = state.layout.axis(register)
    d, k = state.layout.d, len(state.layout.registers)
    shaped = state.amplitudes.reshape((d**axis, d, d ** (k - axis - 1)))
    collapsed = np.zeros_like(shaped)
    collapsed[:, value, :] = shaped[:, value, :] / math.sqrt(probs[value])
    post = QuditState(state.layout, collapsed.reshape(-1))
    return MeasurementOutcome(register=register, value=value, post_state=post)
