"""geomopt: restricted geometric constants and instrumented proximal gradient solvers."""

from .analytics import (
    ConeMetrics,
    LassoOptimalityData,
    active_set,
    cone_lemma_check,
    cone_ratio,
    identification_time,
    jaccard,
    lasso_b_matrix,
    lasso_kkt_residual,
    lasso_optimal_set_system,
    lasso_optimality_data,
)
from .constants import (
    ConstantsReport,
    HoffmanEstimate,
    Restriction,
    constants_report,
    eb_from_pl,
    eb_polyhedral_nonsmooth,
    firm_convexity_lb_lasso,
    hoffman_enumerated,
    hoffman_equality,
    hoffman_sampled,
    measured_eb,
    measured_pl,
    pl_from_eb,
    pl_from_hoffman_indicator,
    pl_from_qg,
    restricted_hoffman_support,
)
from .errors import (
    ClassificationError,
    ConfigError,
    DegenerateMatrixError,
    DomainError,
    GeomoptError,
    InputError,
    NotOptimalError,
    NumericalError,
    PreconditionError,
    SamplingError,
    SizeCapError,
)
from .linalg import (
    EnsembleSpec,
    read_matrix,
    read_vector,
    sample_ensemble,
    singular_values,
    smallest_nonzero_singular,
    smoothness_constant,
    write_matrix,
)
from .problems import (
    BoxHyperplaneIndicator,
    CompositeProblem,
    L1Reg,
    PolyhedralIndicator,
    PolyhedralSystem,
    ZeroReg,
    generalized_gradient_size,
    gradient_f,
    gradient_mapping,
    lasso_problem,
    objective,
    prox,
    svm_dual_problem,
)
from .solver import (
    IterateRecord,
    SolverConfig,
    Trajectory,
    contraction_factors,
    identification_stable,
    run,
)

__version__ = "0.1.0"
