import itertools

import numpy as np
import pytest

from blindqhe.circuits import build_grover, compile_homomorphic, simulate_plain
from blindqhe.gadgets import AuxSpec, GadgetRecord, compute_w, evaluate_homomorphic, prepare_aux, run_gadget
from blindqhe.key_update import KeyRound, TParams, update_t
from blindqhe.pauli_crypto import PauliKey, qotp_decrypt, qotp_encrypt
from blindqhe.statevector import (
    GateKind,
    Sampled,
    Scripted,
    apply_1q,
    fidelity,
    kron,
    measure_wire,
    new_basis_state,
)
from conftest import minus, plus, random_state

R2 = 1 / np.sqrt(2)


@pytest.mark.parametrize(
    "y, d, dagger, amps",
    [
        (0, 0, False, [R2, R2]),
        (0, 1, False, [R2, -R2]),
        (1, 0, False, [R2, 1j * R2]),
        (1, 1, False, [R2, -1j * R2]),
        (1, 0, True, [R2, -1j * R2]),
        (1, 1, True, [R2, 1j * R2]),
    ],
)
def test_prepare_aux(y, d, dagger, amps):
    assert np.allclose(prepare_aux(AuxSpec(y, d), dagger).amplitudes, amps)


def test_aux_spec_validation():
    with pytest.raises(ValueError):
        AuxSpec(2, 0)


def test_compute_w():
    assert [compute_w(x, y) for x, y in itertools.product((0, 1), repeat=2)] == [0, 1, 1, 0]


def _gadget_case(psi, x, z, y, d, c, dagger):
    enc = qotp_encrypt(psi, PauliKey([x], [z]), [1])
    got, out = run_gadget(enc, 1, prepare_aux(AuxSpec(y, d), dagger), compute_w(x, y), dagger, Scripted([c]))
    key = update_t(KeyRound(PauliKey([x], [z])), 1, TParams(y, d, got)).key
    return got, qotp_decrypt(out, key, [1])


def test_gadget_on_plus_with_zero_key():
    want = apply_1q(plus(), GateKind.T, 1)
    for c in (0, 1):
        got, dec = _gadget_case(plus(), 0, 0, 0, 0, c, False)
        assert got == c
        assert fidelity(dec, want) >= 1 - 1e-12


def test_gadget_on_one_with_x_key():
    # |1> encrypted under x=1 is |0>; T|1> decrypts back out
    want = apply_1q(new_basis_state(1, [1]), GateKind.T, 1)
    for c in (0, 1):
        _, dec = _gadget_case(new_basis_state(1, [1]), 1, 0, 0, 0, c, False)
        assert fidelity(dec, want) >= 1 - 1e-12


@pytest.mark.parametrize("dagger", [False, True])
def test_all_sixteen_key_aux_combinations(rng, dagger):
    psi = random_state(rng, 1)
    want = apply_1q(psi, GateKind.TDG if dagger else GateKind.T, 1)
    for x, z, y, d in itertools.product((0, 1), repeat=4):
        for c in (0, 1):
            _, dec = _gadget_case(psi, x, z, y, d, c, dagger)
            assert fidelity(dec, want) >= 1 - 1e-9, (x, z, y, d, c)


def test_plain_s_aux_breaks_tdg_gadget(rng):
    # negative control: the S-based aux is wrong for T-dagger when y=1
    psi = random_state(rng, 1)
    want = apply_1q(psi, GateKind.TDG, 1)
    worst = 1.0
    for x, z, d, c in itertools.product((0, 1), repeat=4):
        enc = qotp_encrypt(psi, PauliKey([x], [z]), [1])
        _, out = run_gadget(enc, 1, prepare_aux(AuxSpec(1, d), False), x ^ 1, True, Scripted([c]))
        key = update_t(KeyRound(PauliKey([x], [z])), 1, TParams(1, d, c)).key
        worst = min(worst, fidelity(qotp_decrypt(out, key, [1]), want))
    assert worst < 0.99


def test_measurement_outcome_is_unbiased(rng):
    psi = random_state(rng, 1)
    enc = qotp_encrypt(psi, PauliKey("1", "0"), [1])
    aux = prepare_aux(AuxSpec(1, 0))
    policy = Sampled(7)
    shots = 10_000
    ones = sum(run_gadget(enc, 1, aux, 0, False, policy)[0] for _ in range(shots))
    assert abs(ones / shots - 0.5) <= 3 * np.sqrt(0.25 / shots)


@pytest.mark.parametrize("wire", [1, 2, 3])
def test_gadget_keeps_wire_count_and_position(rng, wire):
    psi = random_state(rng, 1)
    others = [minus(), new_basis_state(1, [1])]
    parts = others[: wire - 1] + [psi] + others[wire - 1:]
    state = kron(kron(parts[0], parts[1]), parts[2])
    _, out = run_gadget(state, wire, prepare_aux(AuxSpec(0, 0)), 0, False, Scripted([0]))
    assert out.num_wires == 3
    key = update_t(KeyRound(PauliKey.zeros(3)), wire, TParams(0, 0, 0)).key
    assert fidelity(qotp_decrypt(out, key, [1, 2, 3]), apply_1q(state, GateKind.T, wire)) >= 1 - 1e-12


def test_gadget_argument_errors():
    s = new_basis_state(1, [0])
    with pytest.raises(ValueError):
        run_gadget(s, 1, new_basis_state(2, [0, 0]), 0, False, Sampled(0))
    with pytest.raises(IndexError):
        run_gadget(s, 2, plus(), 0, False, Sampled(0))


def test_record_serialize():
    rec = GadgetRecord(3, True, 1, 0, 1, 1)
    assert rec.serialize(1) == "gadget 1: wire=3 dagger=1 y=1 d=0 w=1 c=1"
    assert rec.params == TParams(1, 0, 1)


def test_evaluate_homomorphic_grover(rng):
    circuit = build_grover([0, 1])
    hc = compile_homomorphic(circuit)
    plain = kron(new_basis_state(2, [0, 0]), minus())
    plain = apply_1q(apply_1q(plain, GateKind.H, 1), GateKind.H, 2)
    ek = PauliKey("110", "010")
    wires = [1, 2, 3]
    specs = [AuxSpec(*rng.integers(0, 2, 2).tolist()) for _ in range(hc.gadget_count)]
    steps = list(evaluate_homomorphic(hc, qotp_encrypt(plain, ek, wires), ek, specs, Sampled(3)))
    assert len(steps) == len(hc.ops)
    assert sum(s.record is not None for s in steps) == 7
    final = qotp_decrypt(steps[-1].state, steps[-1].key.key, wires)
    assert fidelity(final, simulate_plain(circuit, plain)) >= 1 - 1e-9
    bits = [measure_wire(final, w, Sampled(0))[0] for w in (1, 2)]
    assert bits == [0, 1]


def test_evaluate_homomorphic_spec_count():
    hc = compile_homomorphic(build_grover([1, 1]))
    with pytest.raises(ValueError):
        list(evaluate_homomorphic(hc, new_basis_state(3, [0, 0, 0]), PauliKey.zeros(3), [], Sampled(0)))
