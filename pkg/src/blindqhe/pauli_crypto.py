"""Quantum one-time pad over Pauli keys, and the classical pad used for key transport."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevector import GateKind, StateVector, apply_1q

Bits = tuple[int, ...]


def to_bits(value) -> Bits:
    """Accept a ``"0101"`` string or an iterable of 0/1 and return a bit tuple."""
    if isinstance(value, str):
        if not re.fullmatch(r"[01]*", value):
            raise ValueError(f"not a binary string: {value!r}")
        return tuple(int(ch) for ch in value)
    bits = tuple(int(b) for b in value)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"not a bit vector: {value!r}")
    return bits


def bitstring(bits: Sequence[int]) -> str:
    return "".join(str(int(b)) for b in bits)


@dataclass(frozen=True)
class PauliKey:
    """Paired bit vectors; bit k of ``x``/``z`` keys the k-th wire it is applied to."""

    x: Bits
    z: Bits

    def __post_init__(self):
        object.__setattr__(self, "x", to_bits(self.x))
        object.__setattr__(self, "z", to_bits(self.z))
        if len(self.x) != len(self.z):
            raise ValueError(f"x has {len(self.x)} bits but z has {len(self.z)}")

    def __len__(self) -> int:
        return len(self.x)

    def __str__(self) -> str:
        return f"x={bitstring(self.x)} z={bitstring(self.z)}"

    @classmethod
    def parse(cls, text: str) -> "PauliKey":
        m = re.fullmatch(r"\s*x=([01]*)\s+z=([01]*)\s*", text)
        if not m:
            raise ValueError(f"cannot parse key {text!r}; expected 'x=<bits> z=<bits>'")
        return cls(m.group(1), m.group(2))

    @classmethod
    def from_vector(cls, bits) -> "PauliKey":
        """Split a concatenated ``x || z`` vector."""
        bits = to_bits(bits)
        if len(bits) % 2:
            raise ValueError(f"odd-length key vector ({len(bits)} bits)")
        n = len(bits) // 2
        return cls(bits[:n], bits[n:])

    @classmethod
    def zeros(cls, n: int) -> "PauliKey":
        return cls((0,) * n, (0,) * n)

    def vector(self) -> Bits:
        return self.x + self.z


@dataclass(frozen=True)
class ClassicalPad:
    bits: Bits

    def __post_init__(self):
        object.__setattr__(self, "bits", to_bits(self.bits))

    def __len__(self) -> int:
        return len(self.bits)


def gen_key(n: int, seed) -> PauliKey:
    if n < 1:
        raise ValueError(f"key length must be positive, got {n}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    raw = rng.integers(0, 2, size=2 * n)
    return PauliKey(raw[:n].tolist(), raw[n:].tolist())


def _check_wires(key: PauliKey, wires: Sequence[int]) -> None:
    if len(wires) != len(key):
        raise ValueError(f"key covers {len(key)} wires but {len(wires)} were given")
    if len(set(wires)) != len(wires):
        raise ValueError(f"duplicate wires in {list(wires)}")


def qotp_encrypt(state: StateVector, key: PauliKey, wires: Sequence[int]) -> StateVector:
    """Apply Z^z X^x (X first) to each listed wire."""
    _check_wires(key, wires)
    for w, xb, zb in zip(wires, key.x, key.z):
        if xb:
            state = apply_1q(state, GateKind.X, w)
        if zb:
            state = apply_1q(state, GateKind.Z, w)
    return state


def qotp_decrypt(state: StateVector, key: PauliKey, wires: Sequence[int]) -> StateVector:
    """Apply X^x Z^z (Z first), the exact inverse of :func:`qotp_encrypt`."""
    _check_wires(key, wires)
    for w, xb, zb in zip(wires, key.x, key.z):
        if zb:
            state = apply_1q(state, GateKind.Z, w)
        if xb:
            state = apply_1q(state, GateKind.X, w)
    return state


def otp_xor(data, pad) -> Bits:
    data = to_bits(data)
    pad_bits = pad.bits if isinstance(pad, ClassicalPad) else to_bits(pad)
    if len(data) != len(pad_bits):
        raise ValueError(f"length mismatch: data {len(data)} bits, pad {len(pad_bits)} bits")
    return tuple(a ^ b for a, b in zip(data, pad_bits))


def classical_decrypt(measured, dk) -> Bits:
    """Undo the X part of the pad on a computational-basis outcome."""
    measured, dk = to_bits(measured), to_bits(dk)
    if len(measured) != len(dk):
        raise ValueError(f"length mismatch: measured {len(measured)} bits, dk {len(dk)} bits")
    return tuple(a ^ b for a, b in zip(measured, dk))
