"""Exact channel simulation over finite fields with greedy rejection-sampled syndrome encoders."""
from .bounds import ETA, BoundReport, lemma2_bound, theorem1_bounds
from .channels import NoiseModel, TypeDistribution, capacity, noise_entropy, type_distribution
from .codec import Codec, SyncRng, decode, encode
from .codes import LinearCode, code_by_name, golay_code, juxtapose
from .planner import CodeSchedule, KappaPlan, LazyKappaPlan, expected_rate, plan_grsse

__version__ = "0.1.0"

__all__ = [
    "ETA", "BoundReport", "lemma2_bound", "theorem1_bounds",
    "NoiseModel", "TypeDistribution", "capacity", "noise_entropy", "type_distribution",
    "Codec", "SyncRng", "decode", "encode",
    "LinearCode", "code_by_name", "golay_code", "juxtapose",
    "CodeSchedule", "KappaPlan", "LazyKappaPlan", "expected_rate", "plan_grsse",
]
