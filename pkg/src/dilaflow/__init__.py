"""Toolkit for dilation-type semigroups in C^n.

Analyze the spectrum of the linear part for resonances, conjugate the
field to a polynomial normal form, evaluate the flow numerically or in
closed triangular form, decide linearizability through rescaled-orbit
limits, and verify rigidity statements on concrete data.
"""

from .algebra import PolyMap, VectorField, linear_flow_diag
from .errors import (
    NearResonanceError,
    NumericsError,
    PolydiscExitError,
    SmallDivisorError,
    StepSizeUnderflowError,
    ToolkitError,
    ValidationError,
)
from .flow import (
    Trajectory,
    TriangularFlow,
    estimate_generator,
    eval_triangular,
    flow_at,
    integrate,
    triangular_flow,
)
from .koenigs import (
    KoenigsResult,
    limit,
    limit_with_precomposition,
    normal_linearizability_precheck,
)
from .normalform import (
    NormalFormResult,
    conjugation_residual,
    schroder_residual,
    solve,
)
from .rigidity import (
    CoefficientCurve,
    CoincidenceReport,
    CommutationReport,
    LinearElementReport,
    UniquenessReport,
    check_commutation,
    cocycle_check,
    coefficient_evolution,
    flow_linearity,
    linear_element_check,
    linearity_probe,
    monomial_coefficient,
    polydisc_grid,
    semigroups_coincide,
    unique_linearizability,
)
from .spectrum import (
    Resonance,
    SpectrumReport,
    analyze,
    discrete_resonances,
    lambda_index,
    pure_real_resonances,
    resonances,
)
from . import fixtures

__version__ = "0.1.0"

__all__ = [
    "PolyMap",
    "VectorField",
    "linear_flow_diag",
    "ToolkitError",
    "ValidationError",
    "NumericsError",
    "SmallDivisorError",
    "NearResonanceError",
    "PolydiscExitError",
    "StepSizeUnderflowError",
    "Trajectory",
    "TriangularFlow",
    "integrate",
    "flow_at",
    "estimate_generator",
    "triangular_flow",
    "eval_triangular",
    "KoenigsResult",
    "limit",
    "limit_with_precomposition",
    "normal_linearizability_precheck",
    "NormalFormResult",
    "solve",
    "schroder_residual",
    "conjugation_residual",
    "Resonance",
    "SpectrumReport",
    "analyze",
    "resonances",
    "pure_real_resonances",
    "discrete_resonances",
    "lambda_index",
    "CoefficientCurve",
    "CommutationReport",
    "CoincidenceReport",
    "LinearElementReport",
    "UniquenessReport",
    "check_commutation",
    "cocycle_check",
    "coefficient_evolution",
    "flow_linearity",
    "linearity_probe",
    "linear_element_check",
    "monomial_coefficient",
    "polydisc_grid",
    "semigroups_coincide",
    "unique_linearizability",
    "fixtures",
    "__version__",
]
