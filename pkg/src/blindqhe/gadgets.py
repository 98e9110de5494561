"""Interactive T / T-dagger gadget on QOTP-encrypted data."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

from .circuits import GadgetSlot, HomomorphicCircuit, CircuitOp, apply_op
from .key_update import KeyRound, TParams, update_op
from .pauli_crypto import PauliKey
from .statevector import (
    GateKind,
    StateVector,
    apply_1q,
    apply_cnot,
    kron,
    measure_wire,
    new_basis_state,
    remove_wire,
)


@dataclass(frozen=True)
class AuxSpec:
    y: int
    d: int

    def __post_init__(self):
        if self.y not in (0, 1) or self.d not in (0, 1):
            raise ValueError(f"AuxSpec bits must be 0/1, got y={self.y!r} d={self.d!r}")


@dataclass(frozen=True)
class GadgetRecord:
    wire: int
    dagger: bool
    y: int
    d: int
    w: int
    c: int

    def serialize(self, k: int) -> str:
        return (
            f"gadget {k}: wire={self.wire} dagger={int(self.dagger)} "
            f"y={self.y} d={self.d} w={self.w} c={self.c}"
        )

    @property
    def params(self) -> TParams:
        return TParams(self.y, self.d, self.c)


def prepare_aux(spec: AuxSpec, dagger: bool = False) -> StateVector:
    """Z^d S^y H|0>, with S replaced by S-dagger for a T-dagger gadget.

    Always one of |+>, |->, |+_y>, |-_y>.
    """
    phase = GateKind.SDG if dagger else GateKind.S
    state = apply_1q(new_basis_state(1, [0]), GateKind.H, 1)
    if spec.y:
        state = apply_1q(state, phase, 1)
    if spec.d:
        state = apply_1q(state, GateKind.Z, 1)
    return state


def compute_w(x_bit: int, y: int) -> int:
    return x_bit ^ y


def run_gadget(
    state: StateVector,
    wire: int,
    aux: StateVector,
    w: int,
    dagger: bool,
    policy,
) -> tuple[int, StateVector]:
    """Evaluator side of the gadget. Returns (c, state) with the wire count unchanged.

    The auxiliary qubit ends up carrying the data in the logical position of
    ``wire``; the original data qubit is measured out to give ``c``.
    """
    if aux.num_wires != 1:
        raise ValueError(f"aux must be a single qubit, got {aux.num_wires} wires")
    if not 1 <= wire <= state.num_wires:
        raise IndexError(f"wire {wire} out of range 1..{state.num_wires}")
    n = state.num_wires
    a = n + 1
    psi = kron(state, aux)
    psi = apply_1q(psi, GateKind.TDG if dagger else GateKind.T, wire)
    psi = apply_cnot(psi, a, wire)
    if w:
        psi = apply_1q(psi, GateKind.SDG if dagger else GateKind.S, a)
    c, psi = measure_wire(psi, wire, policy)
    psi = remove_wire(psi, wire, c)
    # the aux wire is now last; move it back to position `wire`
    t = psi.tensor()
    order = list(range(n - 1))
    order.insert(wire - 1, n - 1)
    return c, StateVector(n, t.transpose(order))


@dataclass(frozen=True)
class EvalStep:
    index: int
    op: CircuitOp
    state: StateVector
    key: KeyRound
    record: GadgetRecord | None = None


def evaluate_homomorphic(
    circuit: HomomorphicCircuit,
    enc_state: StateVector,
    ek: PauliKey,
    aux_specs: Sequence[AuxSpec],
    policy,
) -> Iterator[EvalStep]:
    """Run ``circuit`` on an encrypted state, yielding state and key after every op.

    Collapses the evaluator and key-holder roles into one loop; the protocol
    module keeps them apart.
    """
    if len(aux_specs) != circuit.gadget_count:
        raise ValueError(f"{circuit.gadget_count} gadget slots but {len(aux_specs)} aux specs")
    kr = KeyRound(ek, 0)
    state = enc_state
    specs = iter(aux_specs)
    for idx, op in enumerate(circuit.ops):
        record = None
        if isinstance(op, GadgetSlot):
            spec = next(specs)
            w = compute_w(kr.key.x[op.wire - 1], spec.y)
            c, state = run_gadget(state, op.wire, prepare_aux(spec, op.dagger), w, op.dagger, policy)
            record = GadgetRecord(op.wire, op.dagger, spec.y, spec.d, w, c)
            kr = update_op(kr, op, record.params)
        else:
            state = apply_op(state, op)
            kr = update_op(kr, op)
        yield EvalStep(idx, op, state, kr, record)
