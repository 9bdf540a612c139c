"""Spin measurement amplitudes between arbitrary quantization directions."""

__version__ = "0.1.0"

from .amplitude_engine import (
    CANONICAL,
    PAPER,
    AmplitudeTable,
    ProbabilityTable,
    align_phases,
    chain_compose,
    eigenbasis,
    general_table,
    numeric_eigenbasis,
    probabilities,
    standard_table,
    wigner_small_d,
)
from .paper_oracle import ErrataRecord, general_closed_form, standard_closed_form, verify_all
from .sg_simulator import (
    MeasurementChain,
    SimulationResult,
    Stage,
    analytic_chain_probabilities,
    compare,
    run_chain,
)
from .spin_algebra import Direction, Spin, casimir, commutator, projection_operator, spin_components

__all__ = [
    "CANONICAL",
    "PAPER",
    "AmplitudeTable",
    "Direction",
    "ErrataRecord",
    "MeasurementChain",
    "ProbabilityTable",
    "SimulationResult",
    "Spin",
    "Stage",
    "align_phases",
    "analytic_chain_probabilities",
    "casimir",
    "chain_compose",
    "commutator",
    "compare",
    "eigenbasis",
    "general_closed_form",
    "general_table",
    "numeric_eigenbasis",
    "probabilities",
    "projection_operator",
    "run_chain",
    "spin_components",
    "standard_closed_form",
    "standard_table",
    "verify_all",
    "wigner_small_d",
]
