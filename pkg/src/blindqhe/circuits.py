"""Circuit representation over {I, X, Y, Z, H, S, Sdg, T, Tdg, CNOT}.

Text format, one op per line with 1-based wires::

    h 1
    cnot 1 2      # control first
    tdg 3

``#`` starts a comment and blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .statevector import GateKind, StateVector, apply_1q, apply_cnot


@dataclass(frozen=True)
class Gate1Q:
    kind: GateKind
    wire: int

    def __str__(self) -> str:
        return f"{self.kind.value} {self.wire}"


@dataclass(frozen=True)
class CNot:
    control: int
    target: int

    def __str__(self) -> str:
        return f"cnot {self.control} {self.target}"


@dataclass(frozen=True)
class GadgetSlot:
    """Placeholder for an interactive T (or T-dagger) gadget."""

    wire: int
    dagger: bool = False

    def __str__(self) -> str:
        return f"{'tdg' if self.dagger else 't'}-gadget {self.wire}"


CircuitOp = Union[Gate1Q, CNot, GadgetSlot]


def _op_wires(op: CircuitOp) -> tuple[int, ...]:
    if isinstance(op, CNot):
        return (op.control, op.target)
    return (op.wire,)


def _validate(num_wires: int, ops: Sequence[CircuitOp]) -> None:
    if num_wires < 1:
        raise ValueError(f"num_wires must be positive, got {num_wires}")
    for pos, op in enumerate(ops):
        for w in _op_wires(op):
            if not 1 <= w <= num_wires:
                raise ValueError(f"op {pos} ({op}) uses wire {w} outside 1..{num_wires}")
        if isinstance(op, CNot) and op.control == op.target:
            raise ValueError(f"op {pos}: CNOT control equals target ({op.control})")
        if isinstance(op, Gate1Q) and op.kind is GateKind.CNOT:
            raise ValueError(f"op {pos}: CNOT must be a CNot op")


@dataclass(frozen=True)
class Circuit:
    num_wires: int
    ops: tuple[CircuitOp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        if any(isinstance(op, GadgetSlot) for op in self.ops):
            raise ValueError("a plain Circuit cannot contain gadget slots")
        _validate(self.num_wires, self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(max(self.num_wires, other.num_wires), self.ops + other.ops)

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def t_count(self) -> int:
        return sum(
            1 for op in self.ops
            if isinstance(op, Gate1Q) and op.kind in (GateKind.T, GateKind.TDG)
        )

    @property
    def is_clifford(self) -> bool:
        return self.t_count == 0


@dataclass(frozen=True)
class HomomorphicCircuit:
    num_wires: int
    ops: tuple[CircuitOp, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if isinstance(op, Gate1Q) and not op.kind.is_clifford:
                raise ValueError(f"raw {op.kind.name} gate in a homomorphic circuit")
        _validate(self.num_wires, self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    @property
    def gadget_count(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, GadgetSlot))

    @property
    def gadget_slots(self) -> list[GadgetSlot]:
        return [op for op in self.ops if isinstance(op, GadgetSlot)]


class CircuitParseError(ValueError):
    def __init__(self, lineno: int, line: str, reason: str):
        super().__init__(f"line {lineno}: {reason}: {line.strip()!r}")
        self.lineno = lineno
        self.line = line
        self.reason = reason


_MNEMONICS = {k.value: k for k in GateKind}


def _parse_lines(text: str) -> list[tuple[int, str, CircuitOp]]:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        name, *args = line.split()
        kind = _MNEMONICS.get(name.lower())
        if kind is None:
            raise CircuitParseError(lineno, raw, f"unknown gate {name!r}")
        if len(args) != kind.arity:
            raise CircuitParseError(
                lineno, raw, f"{name} takes {kind.arity} wire(s), got {len(args)}"
            )
        try:
            wires = [int(a) for a in args]
        except ValueError:
            raise CircuitParseError(lineno, raw, "wire indices must be integers") from None
        if any(w < 1 for w in wires):
            raise CircuitParseError(lineno, raw, "wires are numbered from 1")
        if kind is GateKind.CNOT:
            if wires[0] == wires[1]:
                raise CircuitParseError(lineno, raw, "control equals target")
            op = CNot(wires[0], wires[1])
        else:
            op = Gate1Q(kind, wires[0])
        out.append((lineno, raw, op))
    return out


def parse_circuit(text: str, num_wires: int | None = None) -> Circuit:
    """Parse the line format. Wire count is inferred from the largest index unless given."""
    parsed = _parse_lines(text)
    inferred = max((max(_op_wires(op)) for _, _, op in parsed), default=1)
    if num_wires is None:
        num_wires = inferred
    for lineno, raw, op in parsed:
        if max(_op_wires(op)) > num_wires:
            raise CircuitParseError(lineno, raw, f"wire out of range 1..{num_wires}")
    return Circuit(num_wires, [op for _, _, op in parsed])


def non_clifford_lines(text: str) -> list[tuple[int, str]]:
    """(line number, line) for every T/Tdg in circuit text."""
    return [
        (lineno, raw.strip())
        for lineno, raw, op in _parse_lines(text)
        if isinstance(op, Gate1Q) and not op.kind.is_clifford
    ]


def serialize_circuit(circuit: Circuit) -> str:
    return "".join(f"{op}\n" for op in circuit.ops)


def toffoli(control1: int = 1, control2: int = 2, target: int = 3, num_wires: int = 3) -> Circuit:
    """Toffoli over {H, S, T, Tdg, CNOT} with seven T-type gates.

    The phase on ``control2`` is split as Tdg, Tdg and a closing S so that
    every T-type gate on a control is conjugated by the same CNOT pair.
    """
    c1, c2, t = control1, control2, target
    g, cx = Gate1Q, CNot
    ops = [
        g(GateKind.H, t),
        cx(c2, t), g(GateKind.TDG, t),
        cx(c1, t), g(GateKind.T, t),
        cx(c2, t), g(GateKind.TDG, t),
        cx(c1, t), g(GateKind.T, t),
        g(GateKind.TDG, c2),
        cx(c1, c2), g(GateKind.TDG, c2),
        cx(c1, c2), g(GateKind.T, c1),
        g(GateKind.S, c2), g(GateKind.H, t),
    ]
    return Circuit(num_wires, ops)


def _check_search_params(m: int, target: Sequence[int]) -> tuple[int, ...]:
    if m != 2:
        raise ValueError(f"only two-qubit search registers are supported (m={m})")
    target = tuple(int(b) for b in target)
    if len(target) != m or any(b not in (0, 1) for b in target):
        raise ValueError(f"target must be {m} bits, got {target!r}")
    return target


def build_oracle(target: Sequence[int], m: int = 2) -> Circuit:
    """Phase oracle on data wires 1..m with the oracle qubit on wire m+1."""
    target = _check_search_params(m, target)
    flips = [Gate1Q(GateKind.X, w) for w, b in enumerate(target, start=1) if b == 0]
    return Circuit(m + 1, flips) + toffoli(1, 2, m + 1) + Circuit(m + 1, flips)


def build_diffusion(m: int = 2) -> Circuit:
    if m != 2:
        raise ValueError(f"only two-qubit search registers are supported (m={m})")
    g = Gate1Q
    ops = [
        g(GateKind.H, 1), g(GateKind.H, 2),
        g(GateKind.X, 1), g(GateKind.X, 2),
        g(GateKind.H, 2), CNot(1, 2), g(GateKind.H, 2),
        g(GateKind.X, 1), g(GateKind.X, 2),
        g(GateKind.H, 1), g(GateKind.H, 2),
    ]
    return Circuit(m + 1, ops)


def build_grover(target: Sequence[int], m: int = 2) -> Circuit:
    """One Grover iteration (oracle then diffusion); input preparation is not included."""
    return build_oracle(target, m) + build_diffusion(m)


def compile_homomorphic(circuit: Circuit) -> HomomorphicCircuit:
    ops = []
    for op in circuit.ops:
        if isinstance(op, Gate1Q) and op.kind is GateKind.T:
            ops.append(GadgetSlot(op.wire, False))
        elif isinstance(op, Gate1Q) and op.kind is GateKind.TDG:
            ops.append(GadgetSlot(op.wire, True))
        else:
            ops.append(op)
    return HomomorphicCircuit(circuit.num_wires, ops)


def apply_op(state: StateVector, op: CircuitOp) -> StateVector:
    if isinstance(op, CNot):
        return apply_cnot(state, op.control, op.target)
    if isinstance(op, Gate1Q):
        return apply_1q(state, op.kind, op.wire)
    raise TypeError(f"cannot apply {op!r} directly; gadgets need the evaluation engine")


def simulate_plain(circuit: Circuit, state: StateVector) -> StateVector:
    if state.num_wires != circuit.num_wires:
        raise ValueError(
            f"circuit has {circuit.num_wires} wires, state has {state.num_wires}"
        )
    for op in circuit.ops:
        state = apply_op(state, op)
    return state


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^n x 2^n unitary, built column by column with the simulator."""
    from .statevector import new_basis_state

    n = circuit.num_wires
    cols = []
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - k)) & 1 for k in range(n)]
        cols.append(simulate_plain(circuit, new_basis_state(n, bits)).amplitudes)
    return np.stack(cols, axis=1)


CLIFFORD_1Q = (GateKind.I, GateKind.X, GateKind.Y, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG)


def random_circuit(
    rng: np.random.Generator,
    num_wires: int,
    num_gates: int,
    max_t: int = 0,
    gates: Iterable[GateKind] = (GateKind.X, GateKind.Z, GateKind.H, GateKind.S, GateKind.SDG),
) -> Circuit:
    """Uniform random circuit; CNOTs appear when there are at least two wires."""
    pool = list(gates)
    ops: list[CircuitOp] = []
    t_left = max_t
    for _ in range(num_gates):
        roll = rng.random()
        if t_left and roll < 0.25:
            kind = GateKind.T if rng.random() < 0.5 else GateKind.TDG
            ops.append(Gate1Q(kind, int(rng.integers(1, num_wires + 1))))
            t_left -= 1
        elif num_wires > 1 and roll > 0.7:
            c, t = rng.choice(np.arange(1, num_wires + 1), size=2, replace=False)
            ops.append(CNot(int(c), int(t)))
        else:
            kind = pool[int(rng.integers(len(pool)))]
            ops.append(Gate1Q(kind, int(rng.integers(1, num_wires + 1))))
    return Circuit(num_wires, ops)
