"""Optimization-free neuro-fuzzy computing with a memristor-crossbar backend."""

from . import benchmarks, crossbar, errors, experiments, fuzzy, network
from .crossbar import Crossbar, MemristorParams, MemristorState
from .experiments import ExperimentConfig, ExperimentReport
from .fuzzy import (
    MembershipVector,
    TNorm,
    Universe,
    apply_tnorm,
    build_universe,
    defuzzify_centroid,
    fuzzify_triangular,
    similarity,
    universe_from_count,
)
from .network import (
    InputGroup,
    NetworkConfig,
    NetworkState,
    TrainOutcome,
    classify,
    deserialize,
    forward,
    infer_crisp,
    serialize,
    train_dataset,
    train_one,
)

__version__ = "0.1.0"
