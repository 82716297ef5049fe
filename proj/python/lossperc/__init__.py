"""Photon-loss percolation simulations with modified Newman-Ziff sweeps."""

from ._core import (
    Lattice,
    ModelParams,
    adaptive_probs,
    boosted_probs,
    build_lattice,
    canonical_curve,
    check_names,
    convolve,
    coordination_number,
    ensemble,
    exhaustive_curve,
    extrapolate,
    oracle_curve,
    run_check,
    run_cli,
    sweep,
)

__all__ = [
    "Lattice",
    "ModelParams",
    "adaptive_probs",
    "boosted_probs",
    "build_lattice",
    "canonical_curve",
    "check_names",
    "convolve",
    "coordination_number",
    "ensemble",
    "exhaustive_curve",
    "extrapolate",
    "oracle_curve",
    "run_check",
    "run_cli",
    "sweep",
]
__version__ = "0.1.0"
