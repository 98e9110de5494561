"""Quantum homomorphic evaluation on QOTP-encrypted states.

Blind Grover search with a trusted key center, and compact evaluation of
Clifford circuits with a Grover-assisted key search.
"""

__version__ = "0.1.0"
