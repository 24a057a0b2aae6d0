"""Spectral controllability and output-stabilizability analysis for

    z_t = z_xixi - alpha z_xi + k z + b(xi) u(t),   z(0, t) = z(1, t) = 0,
    y(t) = int_0^1 exp(-alpha xi) c(xi) z(xi, t) dxi.
"""

__version__ = "0.1.0"

from .coefficients import (  # noqa: E402
    PeriodicSet,
    ThresholdPolicy,
    ZeroCertainty,
    ZeroKind,
    classify_zero,
    coeff_indicator,
    coeff_quadrature,
    coefficient,
    zero_pattern,
    zero_pattern_period,
)
from .feedback import (  # noqa: E402
    FeedbackLaw,
    SpectrumReport,
    closed_loop_spectrum,
    rank_one_eigvals,
    rank_one_gains,
    synthesize,
)
from .modes import (  # noqa: E402
    Analysis,
    Certainty,
    Decision,
    IndexSetSummary,
    ModeRecord,
    Status,
    Verdict,
    analyze,
    build_index_sets,
    classify_modes,
    critical_k,
    decide_approx_controllability,
    decide_output_stabilizability,
    decide_state_stabilizability,
)
from .profiles import Indicator, Profile, Tabulated  # noqa: E402
from .quadrature import QuadratureSettings, integrate  # noqa: E402
from .simulation import (  # noqa: E402
    ModalState,
    Trajectory,
    estimate_decay_rate,
    project_initial,
    reconstruct_field,
    simulate_closed_loop,
    simulate_open_loop,
    y2_series,
)
from .spectral import (  # noqa: E402
    SystemParams,
    eigenfunction_eval,
    eigenvalue,
    n_max_unstable,
    weighted_inner_product,
)

__all__ = [
    "__version__",
    "PeriodicSet",
    "ThresholdPolicy",
    "ZeroCertainty",
    "ZeroKind",
    "classify_zero",
    "coeff_indicator",
    "coeff_quadrature",
    "coefficient",
    "zero_pattern",
    "zero_pattern_period",
    "FeedbackLaw",
    "SpectrumReport",
    "closed_loop_spectrum",
    "rank_one_eigvals",
    "rank_one_gains",
    "synthesize",
    "Analysis",
    "Certainty",
    "Decision",
    "IndexSetSummary",
    "ModeRecord",
    "Status",
    "Verdict",
    "analyze",
    "build_index_sets",
    "classify_modes",
    "critical_k",
    "decide_approx_controllability",
    "decide_output_stabilizability",
    "decide_state_stabilizability",
    "Indicator",
    "Profile",
    "Tabulated",
    "QuadratureSettings",
    "integrate",
    "ModalState",
    "Trajectory",
    "estimate_decay_rate",
    "project_initial",
    "reconstruct_field",
    "simulate_closed_loop",
    "simulate_open_loop",
    "y2_series",
    "SystemParams",
    "eigenfunction_eval",
    "eigenvalue",
    "n_max_unstable",
    "weighted_inner_product",
]
