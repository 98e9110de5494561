"""Classical decryption-key tracking for QOTP-encrypted evaluation.

The key ``(x, z)`` satisfies: current cipher state = Z^z X^x (current plain
state), wire by wire. Each applied gate or gadget advances the round counter
by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import gf2
from .circuits import CircuitOp, CNot, GadgetSlot, HomomorphicCircuit, compile_homomorphic
from .pauli_crypto import Bits, PauliKey, bitstring
from .statevector import GateKind


@dataclass(frozen=True)
class KeyRound:
    key: PauliKey
    round: int = 0

    @property
    def num_wires(self) -> int:
        return len(self.key)


@dataclass(frozen=True)
class TParams:
    """Secret (y, d) chosen by the key holder and the evaluator's reported bit c."""

    y: int
    d: int
    c: int


def _pauli_rule(x: list, z: list, wires) -> None:
    pass


def _h_rule(x: list, z: list, wires) -> None:
    (i,) = wires
    x[i], z[i] = z[i], x[i]


def _s_rule(x: list, z: list, wires) -> None:
    (i,) = wires
    z[i] ^= x[i]


def _cnot_rule(x: list, z: list, wires) -> None:
    i, l = wires
    z[i] ^= z[l]
    x[l] ^= x[i]


# Sdg = Z.S and Z leaves the key alone, so Sdg shares the S rule.
CLIFFORD_RULES: dict[GateKind, Callable] = {
    GateKind.I: _pauli_rule,
    GateKind.X: _pauli_rule,
    GateKind.Y: _pauli_rule,
    GateKind.Z: _pauli_rule,
    GateKind.H: _h_rule,
    GateKind.S: _s_rule,
    GateKind.SDG: _s_rule,
    GateKind.CNOT: _cnot_rule,
}


def _check_wires(kr: KeyRound, wires: Sequence[int]) -> list[int]:
    for w in wires:
        if not 1 <= w <= kr.num_wires:
            raise IndexError(f"wire {w} out of range 1..{kr.num_wires}")
    return [w - 1 for w in wires]


def update_clifford(kr: KeyRound, gate: GateKind, wires: Sequence[int]) -> KeyRound:
    rule = CLIFFORD_RULES.get(gate)
    if rule is None:
        raise ValueError(f"{gate.name} is not a Clifford gate; use update_t")
    if len(wires) != gate.arity:
        raise ValueError(f"{gate.name} acts on {gate.arity} wire(s), got {list(wires)}")
    if gate is GateKind.CNOT and wires[0] == wires[1]:
        raise ValueError(f"CNOT control equals target ({wires[0]})")
    idx = _check_wires(kr, wires)
    x, z = list(kr.key.x), list(kr.key.z)
    rule(x, z, idx)
    return KeyRound(PauliKey(x, z), kr.round + 1)


def update_t(kr: KeyRound, wire: int, p: TParams) -> KeyRound:
    """Key refresh after a T or T-dagger gadget on ``wire`` (same rule for both)."""
    (i,) = _check_wires(kr, [wire])
    x, z = list(kr.key.x), list(kr.key.z)
    xi = x[i]
    x[i] = xi ^ p.c
    z[i] = (xi & (p.c ^ p.y ^ 1)) ^ z[i] ^ p.d ^ p.y
    return KeyRound(PauliKey(x, z), kr.round + 1)


def update_op(kr: KeyRound, op: CircuitOp, params: TParams | None = None) -> KeyRound:
    if isinstance(op, CNot):
        return update_clifford(kr, GateKind.CNOT, (op.control, op.target))
    if isinstance(op, GadgetSlot):
        if params is None:
            raise ValueError(f"gadget on wire {op.wire} needs TParams")
        return update_t(kr, op.wire, params)
    return update_clifford(kr, op.kind, (op.wire,))


def finalize_measurement(kr: KeyRound, wires: Sequence[int] | None = None) -> Bits:
    """Classical pad for a computational-basis readout: the x half of the key."""
    if wires is None:
        return kr.key.x
    idx = _check_wires(kr, wires)
    return tuple(kr.key.x[i] for i in idx)


def _as_homomorphic(circuit) -> HomomorphicCircuit:
    if isinstance(circuit, HomomorphicCircuit):
        return circuit
    return compile_homomorphic(circuit)


def key_rounds(circuit, ek: PauliKey, params: Sequence[TParams] = ()) -> list[KeyRound]:
    """Every intermediate key, starting with round 0 (the encryption key)."""
    hc = _as_homomorphic(circuit)
    if len(ek) != hc.num_wires:
        raise ValueError(f"key covers {len(ek)} wires, circuit has {hc.num_wires}")
    if len(params) != hc.gadget_count:
        raise ValueError(f"{hc.gadget_count} gadget slots but {len(params)} TParams")
    rounds = [KeyRound(ek, 0)]
    it = iter(params)
    for op in hc.ops:
        p = next(it) if isinstance(op, GadgetSlot) else None
        rounds.append(update_op(rounds[-1], op, p))
    return rounds


def dk_transform(circuit, ek: PauliKey, params: Sequence[TParams] = ()) -> PauliKey:
    return key_rounds(circuit, ek, params)[-1].key


def key_trace(circuit, ek: PauliKey, params: Sequence[TParams] = ()) -> list[str]:
    return [
        f"r={kr.round} x={bitstring(kr.key.x)} z={bitstring(kr.key.z)}"
        for kr in key_rounds(circuit, ek, params)
    ]


@dataclass(frozen=True)
class CliffordKeyMap:
    """GF(2) matrix acting on the concatenated key vector ``x || z``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = gf2.as_gf2(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"key map must be 2n x 2n, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def num_wires(self) -> int:
        return self.matrix.shape[0] // 2

    def is_invertible(self) -> bool:
        return gf2.is_invertible(self.matrix)


def _elementary(op: CircuitOp, n: int) -> np.ndarray:
    """The key-update step of one Clifford op, written directly as a GF(2) matrix."""
    e = np.eye(2 * n, dtype=np.uint8)
    if isinstance(op, CNot):
        i, l = op.control - 1, op.target - 1
        e[n + i, n + l] = 1
        e[l, i] = 1
        return e
    if isinstance(op, GadgetSlot) or not op.kind.is_clifford:
        raise ValueError(f"non-Clifford op {op} has no fixed key map")
    i = op.wire - 1
    if op.kind is GateKind.H:
        e[[i, n + i]] = e[[n + i, i]]
    elif op.kind in (GateKind.S, GateKind.SDG):
        e[n + i, i] = 1
    return e


def clifford_key_matrix(circuit) -> CliffordKeyMap:
    n = circuit.num_wires
    m = np.eye(2 * n, dtype=np.uint8)
    for op in circuit.ops:
        m = gf2.matmul(_elementary(op, n), m)
    return CliffordKeyMap(m)


def apply_key_map(key_map: CliffordKeyMap, ek: PauliKey) -> PauliKey:
    if len(ek) != key_map.num_wires:
        raise ValueError(f"key map is for {key_map.num_wires} wires, key has {len(ek)}")
    v = np.array(ek.vector(), dtype=np.uint8)
    return PauliKey.from_vector(gf2.matmul(key_map.matrix, v).tolist())
