"""Dense statevector simulation for few-qubit circuits.

Wires are numbered from 1. Wire 1 is the most significant bit of the
amplitude index, so ``|10>`` on two wires is amplitude index 2.
"""

from __future__ import annotations

import enum
from typing import Iterable, Sequence

import numpy as np

NORM_TOL = 1e-9
PROB_TOL = 1e-9


class GateKind(enum.Enum):
    I = "i"
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    CNOT = "cnot"

    @property
    def arity(self) -> int:
        return 2 if self is GateKind.CNOT else 1

    @property
    def is_clifford(self) -> bool:
        return self not in (GateKind.T, GateKind.TDG)

    @property
    def matrix(self) -> np.ndarray:
        return _MATRICES[self]

    @classmethod
    def from_mnemonic(cls, name: str) -> "GateKind":
        return cls(name.lower())


_R2 = 1 / np.sqrt(2)
_MATRICES = {
    GateKind.I: np.eye(2, dtype=complex),
    GateKind.X: np.array([[0, 1], [1, 0]], dtype=complex),
    GateKind.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    GateKind.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    GateKind.H: np.array([[_R2, _R2], [_R2, -_R2]], dtype=complex),
    GateKind.S: np.diag([1, 1j]).astype(complex),
    GateKind.SDG: np.diag([1, -1j]).astype(complex),
    GateKind.T: np.diag([1, np.exp(1j * np.pi / 4)]),
    GateKind.TDG: np.diag([1, np.exp(-1j * np.pi / 4)]),
    GateKind.CNOT: np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
    ),
}
for _m in _MATRICES.values():
    _m.setflags(write=False)


class MeasurementError(ValueError):
    """A measurement could not be carried out under the given policy."""


class StateVector:
    """Immutable amplitude vector over ``num_wires`` labelled wires."""

    __slots__ = ("num_wires", "amplitudes")

    def __init__(self, num_wires: int, amplitudes):
        if num_wires < 1:
            raise ValueError(f"num_wires must be positive, got {num_wires}")
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 2**num_wires:
            raise ValueError(
                f"expected {2 ** num_wires} amplitudes for {num_wires} wires, "
                f"got {amps.shape[0]}"
            )
        amps.setflags(write=False)
        self.num_wires = num_wires
        self.amplitudes = amps

    def tensor(self) -> np.ndarray:
        """Amplitudes as a ``(2,) * num_wires`` array; axis k is wire k+1."""
        return self.amplitudes.reshape((2,) * self.num_wires)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def __repr__(self) -> str:
        terms = []
        for idx, amp in enumerate(self.amplitudes):
            if abs(amp) > 1e-12:
                terms.append(f"({amp:.4g})|{idx:0{self.num_wires}b}>")
        return "StateVector(" + " + ".join(terms) + ")"


def _check_wire(state: StateVector, wire: int) -> None:
    if not 1 <= wire <= state.num_wires:
        raise IndexError(f"wire {wire} out of range 1..{state.num_wires}")


def new_basis_state(num_wires: int, bits: Sequence[int]) -> StateVector:
    if len(bits) != num_wires:
        raise ValueError(f"got {len(bits)} bits for {num_wires} wires")
    index = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"not a bit: {b!r}")
        index = (index << 1) | b
    amps = np.zeros(2**num_wires, dtype=complex)
    amps[index] = 1.0
    return StateVector(num_wires, amps)


def new_uniform(num_wires: int) -> StateVector:
    dim = 2**num_wires
    return StateVector(num_wires, np.full(dim, 1 / np.sqrt(dim), dtype=complex))


def kron(first: StateVector, second: StateVector) -> StateVector:
    """Tensor product; the wires of ``second`` follow those of ``first``."""
    return StateVector(
        first.num_wires + second.num_wires,
        np.kron(first.amplitudes, second.amplitudes),
    )


def apply_1q(state: StateVector, gate: GateKind, wire: int) -> StateVector:
    if gate.arity != 1:
        raise ValueError(f"{gate.name} is not a single-qubit gate")
    _check_wire(state, wire)
    axis = wire - 1
    out = np.tensordot(gate.matrix, state.tensor(), axes=([1], [axis]))
    out = np.moveaxis(out, 0, axis)
    return StateVector(state.num_wires, out)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    _check_wire(state, control)
    _check_wire(state, target)
    if control == target:
        raise ValueError(f"CNOT control and target are both wire {control}")
    psi = np.array(state.tensor())
    sel = [slice(None)] * state.num_wires
    sel[control - 1] = 1
    sel = tuple(sel)
    # the control axis disappears from the sliced view
    t_axis = target - 1 if target < control else target - 2
    psi[sel] = np.flip(psi[sel], axis=t_axis).copy()
    return StateVector(state.num_wires, psi)


class Sampled:
    """Born-rule sampling from a seeded generator; records every drawn bit."""

    def __init__(self, seed=None):
        self.rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        self.history: list[int] = []

    def choose(self, p_one: float) -> int:
        bit = int(self.rng.random() < p_one)
        self.history.append(bit)
        return bit


class Scripted:
    """Forces outcomes from a fixed list, consumed in order."""

    def __init__(self, bits: Iterable[int]):
        self.bits = [int(b) for b in bits]
        self.position = 0

    @property
    def remaining(self) -> int:
        return len(self.bits) - self.position

    def choose(self, p_one: float) -> int:
        if self.position >= len(self.bits):
            raise MeasurementError(
                f"scripted outcomes exhausted after {len(self.bits)} measurements"
            )
        bit = self.bits[self.position]
        self.position += 1
        p = p_one if bit else 1.0 - p_one
        if p <= PROB_TOL:
            raise MeasurementError(
                f"scripted outcome {bit} at position {self.position} has probability {p:.3g}"
            )
        return bit


class Exhaustive:
    """Marker policy: enumerate every branch with :func:`measurement_branches`."""

    def choose(self, p_one: float) -> int:
        raise MeasurementError(
            "an Exhaustive policy has no single outcome; use measurement_branches()"
        )


MeasurementPolicy = Sampled | Scripted | Exhaustive


def _branch_probability(state: StateVector, wire: int, bit: int) -> float:
    return float(np.sum(np.abs(np.take(state.tensor(), bit, axis=wire - 1)) ** 2))


def _collapse(state: StateVector, wire: int, bit: int) -> StateVector:
    psi = np.array(state.tensor())
    sel = [slice(None)] * state.num_wires
    sel[wire - 1] = 1 - bit
    psi[tuple(sel)] = 0
    psi /= np.linalg.norm(psi)
    return StateVector(state.num_wires, psi)


def measure_wire(state: StateVector, wire: int, policy) -> tuple[int, StateVector]:
    _check_wire(state, wire)
    p_one = _branch_probability(state, wire, 1)
    bit = policy.choose(p_one)
    return bit, _collapse(state, wire, bit)


def measurement_branches(state: StateVector, wire: int) -> list[tuple[int, float, StateVector]]:
    """All outcomes of measuring ``wire`` with probability above the tolerance."""
    _check_wire(state, wire)
    out = []
    for bit in (0, 1):
        p = _branch_probability(state, wire, bit)
        if p > PROB_TOL:
            out.append((bit, p, _collapse(state, wire, bit)))
    return out


def measure_register(state: StateVector, wires: Sequence[int], policy) -> tuple[list[int], StateVector]:
    if len(set(wires)) != len(wires):
        raise ValueError(f"duplicate wires in {list(wires)}")
    bits = []
    for w in wires:
        b, state = measure_wire(state, w, policy)
        bits.append(b)
    return bits, state


def remove_wire(state: StateVector, wire: int, known_value: int) -> StateVector:
    _check_wire(state, wire)
    if state.num_wires == 1:
        raise ValueError("cannot remove the only wire")
    stray = _branch_probability(state, wire, 1 - known_value)
    if stray > NORM_TOL:
        raise ValueError(
            f"wire {wire} is not classical with value {known_value} "
            f"(weight {stray:.3g} on the other value)"
        )
    kept = np.take(state.tensor(), known_value, axis=wire - 1)
    return StateVector(state.num_wires - 1, kept / np.linalg.norm(kept))


def outcome_distribution(state: StateVector, wires: Sequence[int]) -> dict[str, float]:
    """Marginal distribution of ``wires``; zero-probability outcomes are omitted."""
    if len(set(wires)) != len(wires):
        raise ValueError(f"duplicate wires in {list(wires)}")
    for w in wires:
        _check_wire(state, w)
    probs = np.abs(state.tensor()) ** 2
    others = tuple(a for a in range(state.num_wires) if a + 1 not in wires)
    marg = probs.sum(axis=others) if others else probs
    # remaining axes are in ascending wire order; reorder to the requested order
    ordered = sorted(wires)
    marg = np.transpose(marg, [ordered.index(w) for w in wires]).reshape(-1)
    k = len(wires)
    return {
        format(i, f"0{k}b"): float(p) for i, p in enumerate(marg) if p > 1e-12
    }


def inner(a: StateVector, b: StateVector) -> complex:
    if a.num_wires != b.num_wires:
        raise ValueError(f"dimension mismatch: {a.num_wires} vs {b.num_wires} wires")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2 for pure states."""
    return abs(inner(a, b)) ** 2


def equal_up_to_global_phase(a: StateVector, b: StateVector, tol: float = NORM_TOL) -> bool:
    return abs(inner(a, b)) >= 1 - tol
