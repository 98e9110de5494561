"""Messages exchanged between protocol parties, and the ordered transcript."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Any

from ..pauli_crypto import bitstring
from ..statevector import StateVector


class Party(enum.Enum):
    ALICE = "Alice"
    BOB = "Bob"
    CAROL = "Carol"
    DAVE = "Dave"


class Kind(enum.Enum):
    INPUT_LENGTH = "InputLength"
    BB84_QUBIT = "BB84Qubit"
    BASES = "Bases"
    SIFT_MASK = "SiftMask"
    SHARED_BITS = "SharedBits"
    ENC_STATE = "EncState"
    AUX_QUBIT = "AuxQubit"
    W_BIT = "WBit"
    C_BIT = "CBit"
    ENC_RESULT = "EncResult"
    ENC_DK = "EncDk"
    KAPPA_PRIME = "KappaPrime"
    SEARCH_KEY = "SearchKey"
    KEY_PAIR = "KeyPair"


A, B, C, D = Party.ALICE, Party.BOB, Party.CAROL, Party.DAVE

# (sender, receiver) pairs each payload kind may travel on
ROUTES: dict[Kind, frozenset] = {
    Kind.INPUT_LENGTH: frozenset({(A, C), (A, B)}),
    Kind.BB84_QUBIT: frozenset({(C, A), (D, A)}),
    Kind.BASES: frozenset({(A, C), (A, D)}),
    Kind.SIFT_MASK: frozenset({(C, A), (D, A)}),
    Kind.SHARED_BITS: frozenset({(C, A), (D, A)}),
    Kind.ENC_STATE: frozenset({(A, B), (B, A)}),
    Kind.AUX_QUBIT: frozenset({(C, B)}),
    Kind.W_BIT: frozenset({(C, B)}),
    Kind.C_BIT: frozenset({(B, C)}),
    Kind.ENC_RESULT: frozenset({(B, A)}),
    Kind.ENC_DK: frozenset({(C, A)}),
    Kind.KAPPA_PRIME: frozenset({(B, A), (A, D)}),
    Kind.SEARCH_KEY: frozenset({(A, D)}),
    Kind.KEY_PAIR: frozenset({(D, A)}),
}

# the only payloads the evaluator may ever see in the blind-search protocol
BOB_VISIBLE = frozenset({Kind.ENC_STATE, Kind.AUX_QUBIT, Kind.W_BIT})


def _summary(payload: Any) -> str:
    if isinstance(payload, StateVector):
        return f"wires={payload.num_wires}"
    if isinstance(payload, int):
        return str(payload)
    if isinstance(payload, tuple) and payload and all(isinstance(p, tuple) for p in payload):
        return " ".join(bitstring(p) for p in payload)
    if isinstance(payload, tuple):
        return bitstring(payload)
    return str(payload)


def _json_payload(payload: Any, amplitudes: bool) -> Any:
    if isinstance(payload, StateVector):
        out: dict[str, Any] = {"num_wires": payload.num_wires}
        if amplitudes:
            out["amplitudes"] = [
                [float(a.real).hex(), float(a.imag).hex()] for a in payload.amplitudes
            ]
        return out
    if isinstance(payload, tuple) and payload and all(isinstance(p, tuple) for p in payload):
        return [bitstring(p) for p in payload]
    if isinstance(payload, tuple):
        return bitstring(payload)
    return payload


@dataclass(frozen=True)
class Message:
    step: int
    sender: Party
    receiver: Party
    kind: Kind
    payload: Any

    def __str__(self) -> str:
        return (
            f"step={self.step} {self.sender.value}→{self.receiver.value} "
            f"{self.kind.value} {_summary(self.payload)}"
        )


@dataclass
class Transcript:
    messages: list[Message] = field(default_factory=list)

    def send(self, step: int, sender: Party, receiver: Party, kind: Kind, payload: Any) -> Any:
        """Record a message and hand the payload to the caller (the receiver)."""
        if (sender, receiver) not in ROUTES[kind]:
            raise ValueError(f"{kind.value} may not travel {sender.value}→{receiver.value}")
        self.messages.append(Message(step, sender, receiver, kind, payload))
        return payload

    def extend(self, other: "Transcript") -> None:
        self.messages.extend(other.messages)

    def __iter__(self):
        return iter(self.messages)

    def __len__(self) -> int:
        return len(self.messages)

    def received_by(self, party: Party) -> list[Message]:
        return [m for m in self.messages if m.receiver is party]

    def serialize(self) -> str:
        return "".join(f"{m}\n" for m in self.messages)

    def to_json(self, amplitudes: bool = False) -> str:
        rows = [
            {
                "step": m.step,
                "sender": m.sender.value,
                "receiver": m.receiver.value,
                "kind": m.kind.value,
                "payload": _json_payload(m.payload, amplitudes),
            }
            for m in self.messages
        ]
        return json.dumps(rows, indent=1)


def bob_is_blind(transcript: Transcript) -> bool:
    """Structural check: Bob only ever receives encrypted data, aux qubits and w bits."""
    return all(m.kind in BOB_VISIBLE for m in transcript.received_by(Party.BOB))
