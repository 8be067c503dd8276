"""Dissipative quantum dynamics and Tsallis-entropy entanglement criteria."""

from .density import DensityMatrix, from_pure, marginal, purity, spectrum, validate
from .entanglement import (
    classify_three_qubit,
    detect,
    ppt_min_eigenvalue,
    symmetry_label,
    threshold_scan,
    track,
)
from .entropy import conditional_q_entropy, conditional_sign_at_infinity, tsallis_entropy, tsallis_rate
from .lindblad import (
    DiagonalModel,
    GKSModel,
    diagonalize_gks,
    evolve,
    generator,
    positivity_probe,
    purity_rate,
    step_euler,
    trace_power_rate,
)
from .states import WernerParams, heisenberg_3spin, pauli, three_qubit, werner, werner_threshold

__version__ = "0.1.0"
