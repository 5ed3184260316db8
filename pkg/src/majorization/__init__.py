"""Majorization uncertainty bounds and entanglement detection for finite-dimensional states."""

from .bounds import (
    BoundResult,
    MeasurementSet,
    OptimizerConfig,
    joint_probs,
    max_product_overlap,
    mu_sup_component,
    sup_all_states,
    sup_separable,
)
from .detectors import (
    Status,
    Verdict,
    corollary_detect,
    estimate_spectrum,
    optimal_measurement,
    theorem1_detect,
    theorem2_detect,
    theorem3_detect,
    tsallis_threshold,
    werner_scan,
)
from .entropy import EntropyMeasure, parse_measure
from .probvec import MajOrder, ProbVec, compare, infimum, outer, supremum
from .quantum import DensityMatrix, Observable, Povm, PureState, bell_basis, werner

__version__ = "0.1.0"
