"""Sharp Gronwall-Bellman bounds for positive operators, with oracle cross-checks."""
from .discrete import (
    BoundReport,
    DiscreteInequality,
    brute_force_discrete,
    build_proof_matrix,
    discrete_bound,
    matrix_gronwall,
    verify_bound,
)
from .errors import (
    AdmissibilityError,
    ConvergenceError,
    DimensionError,
    DivergenceError,
    GronwallError,
    InvariantError,
    NumericError,
    ParameterError,
    PreconditionError,
    ResourceError,
)
from .laplacian import (
    DirichletLaplacian1D,
    build_laplacian,
    continuous_green_oracle,
    green_apply,
    max_principle_check,
)
from .lattice import Grid, abs_val, join, leq, meet, ordered, sup_norm
from .semilinear import (
    SemilinearProblem,
    continuous_dependence_bound,
    lattice_lipschitz_estimate,
    make_nonlinearity,
    picard_solve,
    uniqueness_certificate,
    volterra_ivp,
)
from .spectral import (
    NonnegMatrix,
    SpectralBracket,
    expm,
    expm_action,
    neumann_resolvent,
    resolvent_direct,
    resolvent_laplace,
    spectral_bound,
)
from .volterra import (
    CoefficientTriple,
    VolterraKernel,
    classic_bound,
    hat_majorant_bound,
    iterated_kernels,
    quasinilpotence_check,
    resolvent_kernel_bound,
    varcoef_sharp_bound,
    varcoef_simple_bound,
)

__version__ = "0.1.0"
