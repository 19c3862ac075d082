"""Monitored quantum-walk search toolkit.

Designed graph families whose stroboscopically monitored dynamics detect
any initial state within one sweep of the system size, the non-Hermitian
survival-operator analysis behind that guarantee, and the Laplace-domain
winding numbers that count the detection attempts.
"""

__version__ = "0.1.0"

from .exceptional import (
    ExceptionalReport,
    NecessaryConditionReport,
    SurvivalOperator,
    characteristic_identity_check,
    necessary_condition_probe,
    survival_operator,
    survival_spectrum,
)
from .experiments import (
    EvolutionProfile,
    NoiseConfig,
    NoiseResult,
    SweepResult,
    default_tau_grid,
    noise_run,
    non_monitored_profile,
    sk_sweep,
    state_transfer_check,
)
from .graphs import (
    ConditionReport,
    HermitianGraph,
    SpectralData,
    build_crawl,
    build_funnel,
    build_sk,
    check_search_conditions,
    default_tau,
    diagonalize,
    funnel_eigenvectors,
    graph_from_dict,
    graph_to_dict,
    load_graph,
    node_state,
    save_graph,
    synthesize_from_spectrum,
)
from .monitored import (
    DetectionSeries,
    DetectionStatistics,
    Protocol,
    detection_amplitude_direct,
    detection_statistics,
    evolve,
    first_detection_series,
    unitary,
)
from .qbasis import QBasis, build_qbasis, gram_check, predict_detection, shift_action_check
from .topology import (
    StrategyDisagreementError,
    ThetaSeries,
    generating_function,
    integral_statistics,
    winding_number,
)

__all__ = [name for name in dir() if not name.startswith("_")]
