"""Blind Grover search on QOTP-encrypted data with a trusted key center.

Alice owns the data and the search target, Bob evaluates the homomorphic
Grover circuit without any key material, and Carol tracks the decryption key
by exchanging aux qubits, w bits and c bits with Bob gadget by gadget.

Wire layout for the two-qubit demo: wires 1-2 hold the (encrypted) search
register, wire 3 is the oracle qubit |-> which carries zero key bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .._rng import seed_sequence
from ..circuits import GadgetSlot, HomomorphicCircuit, apply_op, build_grover, compile_homomorphic
from ..gadgets import AuxSpec, GadgetRecord, compute_w, prepare_aux, run_gadget
from ..key_update import KeyRound, TParams, finalize_measurement, update_op
from ..pauli_crypto import Bits, PauliKey, classical_decrypt, otp_xor, qotp_encrypt, to_bits
from ..statevector import GateKind, Sampled, Scripted, StateVector, apply_1q, kron, measure_register, new_basis_state, new_uniform
from .bb84 import bb84_exchange
from .transcript import Kind, Party, Transcript


@dataclass
class Protocol1Result:
    target: Bits
    ek: PauliKey
    sk: Bits
    y: Bits
    d: Bits
    c: Bits
    encrypted_result: Bits
    dk: Bits
    decrypted: Bits
    verified: bool
    transcript: Transcript
    records: list[GadgetRecord] = field(default_factory=list)


class Alice:
    def __init__(self, target: Bits, m: int):
        self.target = target
        self.m = m
        self.data_wires = tuple(range(1, m + 1))
        self.num_wires = m + 1
        self.ek: PauliKey | None = None
        self.sk: Bits = ()

    def take_shared_bits(self, bits: Bits, forced_ek: PauliKey | None) -> None:
        n = self.m
        if forced_ek is not None:
            self.ek = forced_ek
        else:
            self.ek = _extend_key(PauliKey(bits[:n], bits[n:2 * n]), self.num_wires)
        self.sk = bits[2 * n:3 * n]

    def encrypted_input(self) -> StateVector:
        minus = apply_1q(new_basis_state(1, [1]), GateKind.H, 1)
        plain = kron(new_uniform(self.m), minus)
        return qotp_encrypt(plain, self.ek, range(1, self.num_wires + 1))

    def finish(self, encrypted_result: Bits, enc_dk: Bits) -> tuple[Bits, Bits]:
        dk = otp_xor(enc_dk, self.sk)
        return dk, classical_decrypt(encrypted_result, dk)


class Carol:
    """Key center: owns ek, sk, the per-gadget (y, d) and the running key."""

    def __init__(self, circuit: HomomorphicCircuit, rng: np.random.Generator,
                 forced_yd: tuple[Bits, Bits] | None):
        self.circuit = circuit
        self.rng = rng
        self.forced_yd = forced_yd
        self.kr: KeyRound | None = None
        self.sk: Bits = ()
        self.pending: tuple[GadgetSlot, AuxSpec, int] | None = None
        self.records: list[GadgetRecord] = []

    def take_shared_bits(self, bits: Bits, m: int, forced_ek: PauliKey | None) -> None:
        if forced_ek is not None:
            ek = forced_ek
        else:
            ek = _extend_key(PauliKey(bits[:m], bits[m:2 * m]), self.circuit.num_wires)
        self.kr = KeyRound(ek, 0)
        self.sk = bits[2 * m:3 * m]

    def clifford_step(self, op) -> None:
        self.kr = update_op(self.kr, op)

    def gadget_request(self, slot: GadgetSlot) -> tuple[StateVector, int]:
        k = len(self.records)
        if self.forced_yd is not None:
            spec = AuxSpec(self.forced_yd[0][k], self.forced_yd[1][k])
        else:
            spec = AuxSpec(*(int(v) for v in self.rng.integers(0, 2, size=2)))
        w = compute_w(self.kr.key.x[slot.wire - 1], spec.y)
        self.pending = (slot, spec, w)
        return prepare_aux(spec, slot.dagger), w

    def gadget_result(self, c: int) -> None:
        slot, spec, w = self.pending
        self.pending = None
        record = GadgetRecord(slot.wire, slot.dagger, spec.y, spec.d, w, c)
        self.records.append(record)
        self.kr = update_op(self.kr, slot, TParams(spec.y, spec.d, c))

    def encrypted_dk(self, data_wires: Sequence[int]) -> Bits:
        return otp_xor(finalize_measurement(self.kr, data_wires), self.sk)


class Bob:
    """Evaluator: sees only the cipher state, aux qubits and w bits."""

    def __init__(self, circuit: HomomorphicCircuit, gadget_policy, readout_policy):
        self.circuit = circuit
        self.gadget_policy = gadget_policy
        self.readout_policy = readout_policy
        self.state: StateVector | None = None

    def apply(self, op) -> None:
        self.state = apply_op(self.state, op)

    def run_gadget(self, slot: GadgetSlot, aux: StateVector, w: int) -> int:
        c, self.state = run_gadget(self.state, slot.wire, aux, w, slot.dagger, self.gadget_policy)
        return c

    def measure(self, wires: Sequence[int]) -> Bits:
        bits, self.state = measure_register(self.state, wires, self.readout_policy)
        return tuple(bits)


def _extend_key(key: PauliKey, num_wires: int) -> PauliKey:
    pad = (0,) * (num_wires - len(key))
    return PauliKey(key.x + pad, key.z + pad)


def _normalize_forced_ek(ek, m: int) -> PauliKey:
    if isinstance(ek, str):
        ek = PauliKey.parse(ek)
    if len(ek) == m:
        ek = _extend_key(ek, m + 1)
    if len(ek) != m + 1:
        raise ValueError(f"forced ek must cover {m} or {m + 1} wires, got {len(ek)}")
    if ek.x[m] or ek.z[m]:
        raise ValueError("the oracle qubit is not encrypted; its key bits must be 0")
    return ek


def run_protocol1(
    target,
    m: int = 2,
    seed=0,
    scripted_c=None,
    forced_ek=None,
    forced_yd=None,
) -> Protocol1Result:
    target = to_bits(target)
    circuit = compile_homomorphic(build_grover(target, m))
    g = circuit.gadget_count
    if scripted_c is not None:
        scripted_c = to_bits(scripted_c)
        if len(scripted_c) != g:
            raise ValueError(f"scripted c has {len(scripted_c)} bits; the circuit has {g} gadgets")
    if forced_ek is not None:
        forced_ek = _normalize_forced_ek(forced_ek, m)
    if forced_yd is not None:
        forced_yd = (to_bits(forced_yd[0]), to_bits(forced_yd[1]))
        if len(forced_yd[0]) != g or len(forced_yd[1]) != g:
            raise ValueError(f"forced y and d must each have {g} bits")

    qkd_seed, carol_seed, bob_seed, readout_seed = seed_sequence(seed).spawn(4)
    gadget_policy = Scripted(scripted_c) if scripted_c is not None else Sampled(np.random.default_rng(bob_seed))
    alice = Alice(target, m)
    carol = Carol(circuit, np.random.default_rng(carol_seed), forced_yd)
    bob = Bob(circuit, gadget_policy, Sampled(np.random.default_rng(readout_seed)))
    tr = Transcript()

    # 1. input length
    n = tr.send(1, Party.ALICE, Party.CAROL, Kind.INPUT_LENGTH, m)

    # 2. 3n shared bits over BB84: ek = first 2n, sk = last n
    qkd = bb84_exchange(3 * n, qkd_seed, Party.CAROL, Party.ALICE, step=2)
    tr.extend(qkd.transcript)
    carol.take_shared_bits(qkd.sender_bits, n, forced_ek)
    alice.take_shared_bits(qkd.bits, forced_ek)

    # 3. encrypted superposed input to Bob
    bob.state = tr.send(3, Party.ALICE, Party.BOB, Kind.ENC_STATE, alice.encrypted_input())

    # 4. homomorphic search, key updated in lockstep
    for op in circuit.ops:
        if isinstance(op, GadgetSlot):
            aux, w = carol.gadget_request(op)
            tr.send(4, Party.CAROL, Party.BOB, Kind.AUX_QUBIT, aux)
            tr.send(4, Party.CAROL, Party.BOB, Kind.W_BIT, w)
            c = bob.run_gadget(op, aux, w)
            carol.gadget_result(tr.send(4, Party.BOB, Party.CAROL, Kind.C_BIT, c))
        else:
            bob.apply(op)
            carol.clifford_step(op)

    # 5. encrypted readout from Bob, padded dk from Carol
    enc_result = tr.send(5, Party.BOB, Party.ALICE, Kind.ENC_RESULT, bob.measure(alice.data_wires))
    enc_dk = tr.send(5, Party.CAROL, Party.ALICE, Kind.ENC_DK, carol.encrypted_dk(alice.data_wires))

    # 6. Alice unpads dk, decrypts and checks the result against her condition
    dk, decrypted = alice.finish(enc_result, enc_dk)
    records = carol.records
    return Protocol1Result(
        target=target,
        ek=alice.ek,
        sk=alice.sk,
        y=tuple(r.y for r in records),
        d=tuple(r.d for r in records),
        c=tuple(r.c for r in records),
        encrypted_result=enc_result,
        dk=dk,
        decrypted=decrypted,
        verified=decrypted == target,
        transcript=tr,
        records=list(records),
    )
