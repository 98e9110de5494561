from .bb84 import BB84Result, BB84Round, bb84_exchange, bb84_raw_rounds
from .blind_search import Protocol1Result, run_protocol1
from .clifford_eval import (
    KeySearchError,
    KeySearchResult,
    NonCliffordError,
    Protocol2Result,
    amplify,
    build_kappa_prime,
    dave_key_search,
    key_update_network,
    run_protocol2,
    search_success_probability,
)
from .transcript import Kind, Message, Party, Transcript, bob_is_blind

__all__ = [
    "BB84Result", "BB84Round", "bb84_exchange", "bb84_raw_rounds",
    "Protocol1Result", "run_protocol1",
    "KeySearchError", "KeySearchResult", "NonCliffordError", "Protocol2Result",
    "amplify", "build_kappa_prime", "dave_key_search", "key_update_network",
    "run_protocol2", "search_success_probability",
    "Kind", "Message", "Party", "Transcript", "bob_is_blind",
]
