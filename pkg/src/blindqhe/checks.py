"""Randomized invariant suites, run by ``blindqhe selftest``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuits import apply_op, circuit_unitary, compile_homomorphic, random_circuit, toffoli
from .gadgets import AuxSpec, evaluate_homomorphic, prepare_aux, run_gadget
from .key_update import KeyRound, TParams, apply_key_map, clifford_key_matrix, dk_transform, update_t
from .pauli_crypto import PauliKey, qotp_decrypt, qotp_encrypt
from .statevector import GateKind, Sampled, Scripted, StateVector, apply_1q, fidelity

FIDELITY_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def random_state(rng: np.random.Generator, num_wires: int) -> StateVector:
    v = rng.normal(size=2**num_wires) + 1j * rng.normal(size=2**num_wires)
    return StateVector(num_wires, v / np.linalg.norm(v))


def random_key(rng: np.random.Generator, n: int) -> PauliKey:
    return PauliKey(rng.integers(0, 2, n).tolist(), rng.integers(0, 2, n).tolist())


def all_keys(n: int):
    for bits in itertools.product((0, 1), repeat=2 * n):
        yield PauliKey.from_vector(bits)


def qotp_mixing(seed: int = 0) -> CheckResult:
    """Averaging the cipher density matrix over all keys gives I / 2^n."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for n in (1, 2):
        psi = random_state(rng, n)
        wires = list(range(1, n + 1))
        rho = np.zeros((2**n, 2**n), dtype=complex)
        keys = list(all_keys(n))
        for key in keys:
            v = qotp_encrypt(psi, key, wires).amplitudes
            rho += np.outer(v, v.conj())
        rho /= len(keys)
        worst = max(worst, float(np.max(np.abs(rho - np.eye(2**n) / 2**n))))
    return CheckResult("qotp_mixing", worst <= 1e-10, f"max deviation {worst:.2e}")


def _stepwise_one(rng: np.random.Generator, num_wires: int, num_gates: int, max_t: int) -> float:
    circuit = random_circuit(rng, num_wires, num_gates, max_t)
    hc = compile_homomorphic(circuit)
    wires = list(range(1, num_wires + 1))
    plain = random_state(rng, num_wires)
    ek = random_key(rng, num_wires)
    specs = [AuxSpec(*rng.integers(0, 2, 2).tolist()) for _ in range(hc.gadget_count)]
    enc = qotp_encrypt(plain, ek, wires)
    worst = 1.0
    for op, step in zip(circuit.ops, evaluate_homomorphic(hc, enc, ek, specs, Sampled(rng))):
        plain = apply_op(plain, op)
        worst = min(worst, fidelity(qotp_decrypt(step.state, step.key.key, wires), plain))
    return worst


def stepwise_oracle(seed: int = 0, trials: int = 100) -> CheckResult:
    """Decrypting with the tracked key reproduces the plain run after every op."""
    rng = np.random.default_rng(seed)
    worst = 1.0
    for _ in range(trials):
        n = int(rng.integers(1, 4))
        worst = min(worst, _stepwise_one(rng, n, int(rng.integers(1, 41)), 8))
    return CheckResult("stepwise_oracle", worst >= 1 - FIDELITY_TOL, f"min fidelity {worst:.12f}")


def gf2_linearity(seed: int = 0) -> CheckResult:
    """The Clifford key matrix agrees with the rule-by-rule fold and is invertible."""
    rng = np.random.default_rng(seed)
    mismatches = 0
    singular = 0
    for n in (1, 2, 3):
        for _ in range(10):
            circuit = random_circuit(rng, n, 20)
            km = clifford_key_matrix(circuit)
            singular += not km.is_invertible()
            keys = all_keys(n) if n <= 2 else (random_key(rng, n) for _ in range(100))
            for ek in keys:
                mismatches += apply_key_map(km, ek) != dk_transform(circuit, ek)
    ok = mismatches == 0 and singular == 0
    return CheckResult("gf2_linearity", ok, f"{mismatches} mismatches, {singular} singular maps")


def gadget_correctness(seed: int = 0, plaintexts: int = 20) -> CheckResult:
    """Every (x, z, y, d), both outcomes, T and T-dagger."""
    rng = np.random.default_rng(seed)
    worst = 1.0
    cases = 0
    for _ in range(plaintexts):
        psi = random_state(rng, 1)
        for dagger in (False, True):
            want = apply_1q(psi, GateKind.TDG if dagger else GateKind.T, 1)
            for x, z, y, d in itertools.product((0, 1), repeat=4):
                enc = qotp_encrypt(psi, PauliKey([x], [z]), [1])
                aux = prepare_aux(AuxSpec(y, d), dagger)
                for c in (0, 1):
                    got_c, out = run_gadget(enc, 1, aux, x ^ y, dagger, Scripted([c]))
                    new = update_t(KeyRound(PauliKey([x], [z])), 1, TParams(y, d, got_c)).key
                    worst = min(worst, fidelity(qotp_decrypt(out, new, [1]), want))
                    cases += 1
    return CheckResult("gadget_correctness", worst >= 1 - FIDELITY_TOL,
                       f"{cases} cases, min fidelity {worst:.12f}")


def toffoli_equivalence() -> CheckResult:
    circuit = toffoli()
    u = circuit_unitary(circuit)
    ref = np.eye(8, dtype=complex)
    ref[[6, 7]] = ref[[7, 6]]
    phase = u[0, 0] / ref[0, 0]
    dev = float(np.max(np.abs(u - phase * ref)))
    ok = dev <= 1e-10 and abs(abs(phase) - 1) <= 1e-10 and circuit.t_count == 7
    return CheckResult("toffoli_equivalence", ok, f"max deviation {dev:.2e}, T-count {circuit.t_count}")


SUITES = {
    "qotp_mixing": qotp_mixing,
    "stepwise_oracle": stepwise_oracle,
    "gf2_linearity": gf2_linearity,
    "gadget_correctness": gadget_correctness,
    "toffoli_equivalence": toffoli_equivalence,
}


def run_all(seed: int = 0) -> list[CheckResult]:
    out = []
    for name, fn in SUITES.items():
        out.append(fn() if name == "toffoli_equivalence" else fn(seed))
    return out
