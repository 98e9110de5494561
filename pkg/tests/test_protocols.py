import itertools
import json
import math

import numpy as np
import pytest

from blindqhe.circuits import CNot, Circuit, Gate1Q, circuit_unitary, random_circuit, simulate_plain
from blindqhe.key_update import apply_key_map, clifford_key_matrix, dk_transform
from blindqhe.pauli_crypto import PauliKey
from blindqhe.protocols import (
    Kind,
    Party,
    bb84_exchange,
    bob_is_blind,
    build_kappa_prime,
    dave_key_search,
    run_protocol1,
    run_protocol2,
)
from blindqhe.protocols.bb84 import Y_BASIS, bb84_raw_rounds, decode, encode
from blindqhe.protocols.clifford_eval import (
    KeySearchError,
    NonCliffordError,
    amplify,
    grover_iterations,
    key_update_network,
    search_success_probability,
)
from blindqhe.protocols.transcript import Message, Transcript
from blindqhe.statevector import GateKind, Sampled, fidelity, new_basis_state, outcome_distribution
from conftest import random_state

H = GateKind.H


# --- BB84 ---------------------------------------------------------------

def test_bb84_agreement():
    res = bb84_exchange(4, 11)
    assert len(res.bits) == 4
    assert res.bits == res.sender_bits


@pytest.mark.parametrize("seed", range(5))
def test_bb84_agreement_many_seeds(seed):
    res = bb84_exchange(12, seed)
    assert res.bits == res.sender_bits


def test_bb84_sift_rate():
    rounds = bb84_raw_rounds(10_000, 3)
    rate = sum(r.sifted for r in rounds) / len(rounds)
    assert abs(rate - 0.5) <= 3 * math.sqrt(0.25 / 10_000)


def test_bb84_decoding():
    assert decode(encode(1, Y_BASIS), Y_BASIS, Sampled(0)) == 1
    for bit, basis in itertools.product((0, 1), repeat=2):
        assert decode(encode(bit, basis), basis, Sampled(1)) == bit


def test_bb84_transcript_kinds():
    res = bb84_exchange(3, 5)
    kinds = [m.kind for m in res.transcript]
    assert kinds.count(Kind.BB84_QUBIT) == len(res.rounds)
    assert kinds[-2:] == [Kind.BASES, Kind.SIFT_MASK]


def test_bb84_rejects_zero_bits():
    with pytest.raises(ValueError):
        bb84_exchange(0, 1)


# --- Protocol 1 ---------------------------------------------------------

@pytest.mark.parametrize(
    "ek, y, d, c, enc, dk",
    [
        ("100110", "1010110", "0111001", "1110111", (0, 1), (1, 1)),
        ("110110", "0101100", "0001010", "1011101", (1, 0), (0, 0)),
    ],
)
def test_protocol1_table_rows(ek, y, d, c, enc, dk):
    key = PauliKey(ek[:3], ek[3:])
    res = run_protocol1("10", forced_ek=key, forced_yd=(y, d), scripted_c=c)
    assert res.encrypted_result == enc
    assert res.dk == dk
    assert res.decrypted == (1, 0)
    assert res.verified


def test_protocol1_accepts_data_only_ek():
    res = run_protocol1("10", forced_ek=PauliKey("10", "11"), forced_yd=("1010110", "0111001"),
                        scripted_c="1110111")
    assert (res.encrypted_result, res.dk) == ((0, 1), (1, 1))


def test_protocol1_random_runs():
    for seed in range(50):
        res = run_protocol1("10", seed=seed)
        assert res.decrypted == (1, 0) and res.verified


@pytest.mark.parametrize("target", ["00", "01", "11"])
def test_protocol1_other_targets(target):
    for seed in range(10):
        assert run_protocol1(target, seed=seed).verified


def test_protocol1_errors():
    with pytest.raises(ValueError):
        run_protocol1("10", scripted_c="11")
    with pytest.raises(ValueError):
        run_protocol1("10", forced_yd=("101", "010"))
    with pytest.raises(ValueError):
        run_protocol1("10", forced_ek=PauliKey("101", "000"))
    with pytest.raises(ValueError):
        run_protocol1("1")


def test_protocol1_transcript_determinism():
    a = run_protocol1("10", seed=42).transcript
    b = run_protocol1("10", seed=42).transcript
    assert a.serialize() == b.serialize()
    assert a.to_json(amplitudes=True) == b.to_json(amplitudes=True)
    assert run_protocol1("10", seed=43).transcript.serialize() != a.serialize()


def test_protocol1_bob_is_blind():
    res = run_protocol1("10", seed=3)
    assert bob_is_blind(res.transcript)
    to_bob = {m.kind for m in res.transcript.received_by(Party.BOB)}
    assert to_bob == {Kind.ENC_STATE, Kind.AUX_QUBIT, Kind.W_BIT}


def test_blindness_check_catches_leak():
    tr = Transcript()
    tr.send(3, Party.ALICE, Party.BOB, Kind.ENC_STATE, new_basis_state(1, [0]))
    assert bob_is_blind(tr)
    # bypass route validation to simulate a faulty implementation
    tr.messages.append(Message(5, Party.CAROL, Party.BOB, Kind.ENC_DK, (1, 1)))
    assert not bob_is_blind(tr)


def test_transcript_route_validation():
    with pytest.raises(ValueError):
        Transcript().send(5, Party.CAROL, Party.BOB, Kind.ENC_DK, (1, 1))


def test_transcript_line_format():
    res = run_protocol1("10", forced_ek=PauliKey("100", "110"), forced_yd=("1010110", "0111001"),
                        scripted_c="1110111")
    lines = res.transcript.serialize().splitlines()
    assert lines[0] == "step=1 Alice→Carol InputLength 2"
    assert "step=5 Bob→Alice EncResult 01" in lines
    assert sum(line.startswith("step=4 Carol→Bob AuxQubit") for line in lines) == 7


def test_transcript_json_amplitudes():
    res = run_protocol1("10", seed=1)
    rows = json.loads(res.transcript.to_json(amplitudes=True))
    enc = next(r for r in rows if r["kind"] == "EncState")
    amps = enc["payload"]["amplitudes"]
    assert len(amps) == 8
    norm = sum(float.fromhex(re) ** 2 + float.fromhex(im) ** 2 for re, im in amps)
    assert norm == pytest.approx(1.0, abs=1e-12)
    plain = json.loads(res.transcript.to_json())
    enc_plain = next(r for r in plain if r["kind"] == "EncState")
    assert enc_plain["payload"] == {"num_wires": 3}


# --- kappa' and Dave ----------------------------------------------------

def _branches(kappa, index_bits):
    """Map index bitstring -> key-register bitstring over non-negligible branches."""
    dist = outcome_distribution(kappa, list(range(1, kappa.num_wires + 1)))
    out = {}
    for bits, p in dist.items():
        assert p == pytest.approx(1 / 2**index_bits, abs=1e-12)
        out[bits[:index_bits]] = bits[index_bits:]
    return out


def test_kappa_identity():
    br = _branches(build_kappa_prime(Circuit(1), 1), 2)
    assert br == {"00": "00", "01": "01", "10": "10", "11": "11"}


def test_kappa_single_h():
    br = _branches(build_kappa_prime(Circuit(1, [Gate1Q(H, 1)]), 1), 2)
    for x, z in itertools.product("01", repeat=2):
        assert br[x + z] == z + x


def test_kappa_matches_classical_map(rng):
    for _ in range(5):
        circuit = random_circuit(rng, 2, 15)
        br = _branches(build_kappa_prime(circuit, 2), 4)
        assert len(br) == 16
        for j, key_bits in br.items():
            assert PauliKey.from_vector(key_bits) == dk_transform(circuit, PauliKey.from_vector(j))


def test_kappa_rejects_non_clifford_and_large():
    with pytest.raises(NonCliffordError):
        build_kappa_prime(Circuit(1, [Gate1Q(GateKind.T, 1)]), 1)
    with pytest.raises(ValueError):
        build_kappa_prime(Circuit(4), 4)


def test_grover_iterations():
    assert grover_iterations(2) == 1
    assert grover_iterations(4) == 3


def test_dave_success_probability_n1():
    kappa = build_kappa_prime(Circuit(1, [Gate1Q(H, 1)]), 1)
    for bits in itertools.product((0, 1), repeat=2):
        assert search_success_probability(kappa, PauliKey.from_vector(bits)) == pytest.approx(1, abs=1e-9)


def test_dave_success_probability_n2(rng):
    kappa = build_kappa_prime(random_circuit(rng, 2, 12), 2)
    want = math.sin(7 * math.asin(1 / 4)) ** 2
    for bits in itertools.product((0, 1), repeat=4):
        assert search_success_probability(kappa, PauliKey.from_vector(bits)) == pytest.approx(want, abs=1e-9)


def _explicit_amplify(circuit, n, ek):
    # A = uniform layer on the index register followed by the key network;
    # one iteration = A (2|0><0| - I) A^dagger . O
    w = circuit.num_wires
    net = key_update_network(circuit, list(range(w - n + 1, w + 1)))
    prep = Circuit(net.num_wires, [Gate1Q(H, k) for k in range(1, 2 * n + 1)]) + net
    a = circuit_unitary(prep)
    dim = a.shape[0]
    s0 = -np.eye(dim)
    s0[0, 0] = 1
    reflect = a @ s0 @ a.conj().T
    prefix = int("".join(map(str, ek.vector())), 2)
    oracle = np.diag([-1.0 if (i >> (net.num_wires - 2 * n)) == prefix else 1.0 for i in range(dim)])
    psi = a[:, 0]
    for _ in range(grover_iterations(2 * n)):
        psi = reflect @ (oracle @ psi)
    return psi


@pytest.mark.parametrize("n", [1, 2])
def test_amplify_matches_explicit_operator(rng, n):
    circuit = random_circuit(rng, n, 10)
    ek = PauliKey.from_vector(rng.integers(0, 2, 2 * n).tolist())
    got = amplify(build_kappa_prime(circuit, n), ek).amplitudes
    assert np.max(np.abs(got - _explicit_amplify(circuit, n, ek))) <= 1e-9


def test_dave_returns_mapped_key(rng):
    for _ in range(10):
        circuit = random_circuit(rng, 2, 12)
        ek = PauliKey.from_vector(rng.integers(0, 2, 4).tolist())
        found = dave_key_search(build_kappa_prime(circuit, 2), ek, int(rng.integers(1 << 30)))
        assert found.ek_bits == ek.vector()
        assert PauliKey.from_vector(found.dk_bits) == apply_key_map(clifford_key_matrix(circuit), ek)
        assert 1 <= found.attempts <= 16


def test_dave_retry_bound():
    # n=2 single-shot success is about 0.96, so some single attempts miss
    kappa = build_kappa_prime(Circuit(2), 2)
    ek = PauliKey("10", "01")
    misses = 0
    for seed in range(200):
        try:
            dave_key_search(kappa, ek, seed, max_attempts=1)
        except KeySearchError:
            misses += 1
    assert 0 < misses < 30


# --- Protocol 2 ---------------------------------------------------------

def test_protocol2_identity(rng):
    psi = random_state(rng, 2)
    res = run_protocol2(Circuit(2), psi, 2, seed=4)
    assert fidelity(res.state, psi) >= 1 - 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_protocol2_h_on_zero(seed):
    res = run_protocol2(Circuit(1, [Gate1Q(H, 1)]), new_basis_state(1, [0]), 1, seed=seed)
    assert np.allclose(np.abs(res.state.amplitudes), [2**-0.5, 2**-0.5], atol=1e-9)
    assert fidelity(res.state, simulate_plain(Circuit(1, [Gate1Q(H, 1)]), new_basis_state(1, [0]))) >= 1 - 1e-9


def test_protocol2_random_circuits():
    for seed in range(50):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 4))
        circuit = random_circuit(rng, n, int(rng.integers(1, 21)))
        psi = random_state(rng, n)
        res = run_protocol2(circuit, psi, n, seed=seed)
        assert fidelity(res.state, simulate_plain(circuit, psi)) >= 1 - 1e-9


def test_protocol2_with_clear_index_wire(rng):
    circuit = Circuit(3, [Gate1Q(H, 1), CNot(1, 2), Gate1Q(GateKind.S, 3), CNot(3, 2)])
    psi = random_state(rng, 3)
    res = run_protocol2(circuit, psi, 2, seed=9)
    assert res.encrypted_wires == (2, 3)
    assert fidelity(res.state, simulate_plain(circuit, psi)) >= 1 - 1e-9


def test_protocol2_transcript():
    res = run_protocol2(Circuit(1, [Gate1Q(H, 1)]), new_basis_state(1, [0]), 1, seed=2)
    kinds = [m.kind for m in res.transcript]
    assert Kind.KAPPA_PRIME in kinds and kinds[-1] is Kind.KEY_PAIR
    assert all(m.kind is not Kind.SEARCH_KEY or m.receiver is Party.DAVE for m in res.transcript)


def test_protocol2_rejects_non_clifford():
    with pytest.raises(NonCliffordError):
        run_protocol2(Circuit(1, [Gate1Q(GateKind.T, 1)]), new_basis_state(1, [0]), 1)
