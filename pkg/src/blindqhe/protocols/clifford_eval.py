"""Non-interactive homomorphic evaluation of Clifford circuits.

Bob evaluates the circuit on the cipher state and, alongside, runs the
key-update network on a uniform superposition of all encryption keys,
producing |kappa'> = sum_j |j, DecKey(j)>. A second server, Dave, amplifies
the branch whose key register equals Alice's ek and returns (ek, dk).

Register layout of |kappa'> for a circuit on W wires with n encrypted wires:
wires 1..2n hold the candidate ek (x bits then z bits of the encrypted wires),
wires 2n+1..2n+2W hold the full decryption key (x bits then z bits of every
wire).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .._rng import seed_sequence
from ..circuits import Circuit, CNot, Gate1Q, simulate_plain
from ..key_update import CliffordKeyMap, apply_key_map, clifford_key_matrix
from ..pauli_crypto import Bits, PauliKey, gen_key, otp_xor, qotp_decrypt, qotp_encrypt
from ..statevector import GateKind, Sampled, StateVector, kron, measure_register, new_basis_state, new_uniform
from .bb84 import bb84_exchange
from .transcript import Kind, Party, Transcript

MAX_KEY_WIRES = 3
DAVE_MAX_ATTEMPTS = 16


class NonCliffordError(ValueError):
    pass


class KeySearchError(RuntimeError):
    pass


def _require_clifford(circuit: Circuit) -> None:
    if not circuit.is_clifford:
        bad = [
            f"op {k} ({op})" for k, op in enumerate(circuit.ops)
            if isinstance(op, Gate1Q) and not op.kind.is_clifford
        ]
        raise NonCliffordError("circuit is not Clifford: " + ", ".join(bad))


def _encrypted_wires(circuit: Circuit, n: int | None, wires: Sequence[int] | None) -> tuple[int, ...]:
    if wires is not None:
        return tuple(wires)
    if n is None:
        n = circuit.num_wires
    if not 1 <= n <= circuit.num_wires:
        raise ValueError(f"cannot encrypt {n} of {circuit.num_wires} wires")
    # leading index wires stay in the clear
    return tuple(range(circuit.num_wires - n + 1, circuit.num_wires + 1))


def key_update_network(circuit: Circuit, encrypted_wires: Sequence[int]) -> Circuit:
    """CNOT network mapping |ek, 0> to |ek, dk> for a Clifford circuit.

    The ek register is first copied into the dk register, then every gate's
    key rule is replayed as bit swaps and XORs on the dk register.
    """
    _require_clifford(circuit)
    n, w = len(encrypted_wires), circuit.num_wires
    off = 2 * n

    def xw(i):
        return off + i

    def zw(i):
        return off + w + i

    ops = []
    for k, e in enumerate(encrypted_wires, start=1):
        ops.append(CNot(k, xw(e)))
        ops.append(CNot(n + k, zw(e)))
    for op in circuit.ops:
        if isinstance(op, CNot):
            i, l = op.control, op.target
            ops += [CNot(zw(l), zw(i)), CNot(xw(i), xw(l))]
        elif op.kind is GateKind.H:
            a, b = xw(op.wire), zw(op.wire)
            ops += [CNot(a, b), CNot(b, a), CNot(a, b)]
        elif op.kind in (GateKind.S, GateKind.SDG):
            ops.append(CNot(xw(op.wire), zw(op.wire)))
    return Circuit(off + 2 * w, ops)


def build_kappa_prime(circuit: Circuit, n: int | None = None,
                      encrypted_wires: Sequence[int] | None = None) -> StateVector:
    _require_clifford(circuit)
    enc = _encrypted_wires(circuit, n, encrypted_wires)
    if len(enc) > MAX_KEY_WIRES or circuit.num_wires > MAX_KEY_WIRES:
        raise ValueError(f"key superposition is limited to {MAX_KEY_WIRES} wires")
    net = key_update_network(circuit, enc)
    start = kron(new_uniform(2 * len(enc)), new_basis_state(2 * circuit.num_wires, [0] * (2 * circuit.num_wires)))
    return simulate_plain(net, start)


def restricted_key_map(circuit: Circuit, encrypted_wires: Sequence[int]):
    """DecKey as a function of the encrypted-wire ek only (other wires keyed with 0)."""
    key_map: CliffordKeyMap = clifford_key_matrix(circuit)
    w = circuit.num_wires

    def dec_key(ek: PauliKey) -> PauliKey:
        x, z = [0] * w, [0] * w
        for k, e in enumerate(encrypted_wires):
            x[e - 1], z[e - 1] = ek.x[k], ek.z[k]
        return apply_key_map(key_map, PauliKey(x, z))

    return dec_key


def grover_iterations(index_bits: int) -> int:
    return int(math.floor(math.pi / 4 * math.sqrt(2**index_bits)))


def _marked_mask(num_wires: int, prefix: Bits) -> np.ndarray:
    k = len(prefix)
    idx = np.arange(2**num_wires) >> (num_wires - k)
    return idx == int("".join(map(str, prefix)), 2)


def amplify(kappa_prime: StateVector, ek: PauliKey, iterations: int | None = None) -> StateVector:
    """Amplitude amplification towards branches whose key register equals ``ek``.

    The diffusion step reflects about |kappa'> itself; a reflection on the
    key register alone cannot amplify because that register is maximally
    entangled with the dk register.
    """
    prefix = ek.vector()
    if iterations is None:
        iterations = grover_iterations(len(prefix))
    mask = _marked_mask(kappa_prime.num_wires, prefix)
    start = kappa_prime.amplitudes
    psi = start.copy()
    for _ in range(iterations):
        psi[mask] *= -1
        psi = 2 * np.vdot(start, psi) * start - psi
    return StateVector(kappa_prime.num_wires, psi)


def search_success_probability(kappa_prime: StateVector, ek: PauliKey, iterations: int | None = None) -> float:
    amplified = amplify(kappa_prime, ek, iterations)
    mask = _marked_mask(kappa_prime.num_wires, ek.vector())
    return float(np.sum(np.abs(amplified.amplitudes[mask]) ** 2))


@dataclass(frozen=True)
class KeySearchResult:
    ek_bits: Bits
    dk_bits: Bits
    attempts: int


def dave_key_search(kappa_prime: StateVector, ek: PauliKey, seed,
                    max_attempts: int = DAVE_MAX_ATTEMPTS) -> KeySearchResult:
    """Amplify, measure every wire, and retry with fresh randomness on a miss."""
    prefix = ek.vector()
    k = len(prefix)
    if k >= kappa_prime.num_wires:
        raise ValueError(f"ek has {k} bits but kappa' has only {kappa_prime.num_wires} wires")
    amplified = amplify(kappa_prime, ek)
    wires = list(range(1, kappa_prime.num_wires + 1))
    for attempt, child in enumerate(seed_sequence(seed).spawn(max_attempts), start=1):
        bits, _ = measure_register(amplified, wires, Sampled(np.random.default_rng(child)))
        if tuple(bits[:k]) == prefix:
            return KeySearchResult(tuple(bits[:k]), tuple(bits[k:]), attempt)
    raise KeySearchError(f"no branch matching ek found in {max_attempts} attempts")


@dataclass
class Protocol2Result:
    state: StateVector
    transcript: Transcript
    ek: PauliKey
    dk: PauliKey
    attempts: int
    encrypted_wires: tuple[int, ...]


def run_protocol2(circuit: Circuit, plain_input: StateVector, n: int | None = None, seed=0,
                  encrypted_wires: Sequence[int] | None = None) -> Protocol2Result:
    _require_clifford(circuit)
    if plain_input.num_wires != circuit.num_wires:
        raise ValueError(f"input has {plain_input.num_wires} wires, circuit has {circuit.num_wires}")
    enc = _encrypted_wires(circuit, n, encrypted_wires)
    n = len(enc)
    w = circuit.num_wires
    alice_seed, dave_seed, qkd_seed = seed_sequence(seed).spawn(3)
    tr = Transcript()

    # 1-2. Alice picks ek and ships the cipher state plus n
    ek = gen_key(n, np.random.default_rng(alice_seed))
    cipher = tr.send(2, Party.ALICE, Party.BOB, Kind.ENC_STATE, qotp_encrypt(plain_input, ek, enc))
    tr.send(2, Party.ALICE, Party.BOB, Kind.INPUT_LENGTH, n)

    # 3-4. Bob evaluates and builds the key-pair superposition
    evaluated = tr.send(4, Party.BOB, Party.ALICE, Kind.ENC_STATE, simulate_plain(circuit, cipher))
    kappa = tr.send(4, Party.BOB, Party.ALICE, Kind.KAPPA_PRIME, build_kappa_prime(circuit, encrypted_wires=enc))

    # 5-6. Alice hands kappa' and ek to a key searcher
    tr.send(6, Party.ALICE, Party.DAVE, Kind.KAPPA_PRIME, kappa)
    tr.send(6, Party.ALICE, Party.DAVE, Kind.SEARCH_KEY, ek.vector())

    # 7. Dave searches, then returns (ek, dk) under a BB84-derived pad
    found = dave_key_search(kappa, ek, dave_seed)
    payload = found.ek_bits + found.dk_bits
    qkd = bb84_exchange(len(payload), qkd_seed, Party.DAVE, Party.ALICE, step=7)
    tr.extend(qkd.transcript)
    padded = otp_xor(payload, qkd.sender_bits)
    tr.send(7, Party.DAVE, Party.ALICE, Kind.KEY_PAIR, (padded[:2 * n], padded[2 * n:]))

    # 8. Alice unpads and decrypts every wire with the returned dk
    clear = otp_xor(padded, qkd.bits)
    if clear[:2 * n] != ek.vector():
        raise KeySearchError("returned key pair does not match ek")
    dk = PauliKey.from_vector(clear[2 * n:])
    out = qotp_decrypt(evaluated, dk, range(1, w + 1))
    return Protocol2Result(out, tr, ek, dk, found.attempts, enc)
