"""Idealized BB84 over the X and Y bases: no noise, no eavesdropper.

Encoding: |+>, |+_y> carry 0 and |->, |-_y> carry 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._rng import seed_sequence
from ..gadgets import AuxSpec, prepare_aux
from ..pauli_crypto import Bits
from ..statevector import GateKind, Sampled, StateVector, apply_1q, measure_wire
from .transcript import Kind, Party, Transcript

X_BASIS, Y_BASIS = 0, 1


def encode(bit: int, basis: int) -> StateVector:
    return prepare_aux(AuxSpec(y=basis, d=bit))


def decode(qubit: StateVector, basis: int, policy) -> int:
    if basis == Y_BASIS:
        qubit = apply_1q(qubit, GateKind.SDG, 1)
    qubit = apply_1q(qubit, GateKind.H, 1)
    bit, _ = measure_wire(qubit, 1, policy)
    return bit


@dataclass(frozen=True)
class BB84Round:
    sender_bit: int
    sender_basis: int
    receiver_basis: int
    receiver_bit: int

    @property
    def sifted(self) -> bool:
        return self.sender_basis == self.receiver_basis


@dataclass
class BB84Result:
    bits: Bits  # the receiver's sifted key
    sender_bits: Bits
    rounds: list[BB84Round]
    transcript: Transcript

    @property
    def sift_rate(self) -> float:
        return len(self.bits) / len(self.rounds)


class _Session:
    def __init__(self, seed):
        s_seed, r_seed, m_seed = seed_sequence(seed).spawn(3)
        self.sender_rng = np.random.default_rng(s_seed)
        self.receiver_rng = np.random.default_rng(r_seed)
        self.measure = Sampled(np.random.default_rng(m_seed))

    def round(self) -> tuple[StateVector, BB84Round]:
        bit, basis = (int(v) for v in self.sender_rng.integers(0, 2, size=2))
        qubit = encode(bit, basis)
        r_basis = int(self.receiver_rng.integers(0, 2))
        r_bit = decode(qubit, r_basis, self.measure)
        return qubit, BB84Round(bit, basis, r_basis, r_bit)


def bb84_raw_rounds(num_rounds: int, seed) -> list[BB84Round]:
    session = _Session(seed)
    return [session.round()[1] for _ in range(num_rounds)]


def bb84_exchange(
    num_bits: int,
    seed,
    sender: Party = Party.CAROL,
    receiver: Party = Party.ALICE,
    step: int = 2,
) -> BB84Result:
    """Run rounds until ``num_bits`` matching-basis bits are agreed, then sift."""
    if num_bits < 1:
        raise ValueError(f"num_bits must be positive, got {num_bits}")
    session = _Session(seed)
    transcript = Transcript()
    rounds: list[BB84Round] = []
    while sum(r.sifted for r in rounds) < num_bits:
        qubit, rnd = session.round()
        transcript.send(step, sender, receiver, Kind.BB84_QUBIT, qubit)
        rounds.append(rnd)
    transcript.send(step, receiver, sender, Kind.BASES, tuple(r.receiver_basis for r in rounds))
    transcript.send(step, sender, receiver, Kind.SIFT_MASK, tuple(int(r.sifted) for r in rounds))
    kept = [r for r in rounds if r.sifted]
    return BB84Result(
        bits=tuple(r.receiver_bit for r in kept),
        sender_bits=tuple(r.sender_bit for r in kept),
        rounds=rounds,
        transcript=transcript,
    )
