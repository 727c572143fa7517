"""HAKE security experiment: parties, queries, partnering and cleanness."""

from .adversaries import coin_flip, relay_stage, reveal_then_test, toy_kem_breaker
from .model import QUERY_KINDS, HakeExperiment, Party, QueryRecord, run_experiment

__all__ = [
    "QUERY_KINDS",
    "HakeExperiment",
    "Party",
    "QueryRecord",
    "coin_flip",
    "relay_stage",
    "reveal_then_test",
    "run_experiment",
    "toy_kem_breaker",
]
