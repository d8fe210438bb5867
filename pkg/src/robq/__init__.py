"""Lipschitz robustness bounds for quantum circuits under coherent control errors."""
from __future__ import annotations

__version__ = "0.1.0"

from .bounds import (
    BoundReport,
    diamond_distance_bound,
    eps_max_for_fidelity,
    exact_worst_case_single_gate,
    fidelity_lower_bound,
    fidelity_lower_bound_sin,
    full_report,
    lipschitz_norm,
    lipschitz_pairwise,
)
from .circuit import (
    Circuit,
    GateInstance,
    NoiseModel,
    circuit_from_dict,
    equivalent_up_to_phase,
    gate,
    ideal_unitary,
    load_circuit,
    parse_circuit,
    serialize_circuit,
)
from .gates import Gate, builtin_gate, custom_gate, gate_norm, phase_optimize
from .rng import SeededRng
from .simulator import SimStats, apply_noisy, empirical_lipschitz, monte_carlo, noise_sweep

__all__ = [
    "BoundReport", "Circuit", "Gate", "GateInstance", "NoiseModel", "SeededRng", "SimStats",
    "apply_noisy", "builtin_gate", "circuit_from_dict", "custom_gate", "diamond_distance_bound",
    "empirical_lipschitz", "eps_max_for_fidelity", "equivalent_up_to_phase", "exact_worst_case_single_gate",
    "fidelity_lower_bound", "fidelity_lower_bound_sin", "full_report", "gate", "gate_norm", "ideal_unitary",
    "lipschitz_norm", "lipschitz_pairwise", "load_circuit", "monte_carlo", "noise_sweep", "parse_circuit",
    "phase_optimize", "serialize_circuit",
]
