"""Simulation of one-dimensional quantum position verification and its attacks."""
from .analysis import Estimate, ExactResult, exact_success, inference_error, monte_carlo, sweep
from .adversaries import AttackKind
from .config import ScenarioConfig, validate_config
from .protocols import ProtocolKind

__all__ = [
    "AttackKind",
    "Estimate",
    "ExactResult",
    "ProtocolKind",
    "ScenarioConfig",
    "exact_success",
    "inference_error",
    "monte_carlo",
    "sweep",
    "validate_config",
]
