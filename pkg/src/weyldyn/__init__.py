"""weyldyn: time-domain construction of Titchmarsh-Weyl data on the half line.

Pipeline: potential -> Goursat kernel (Neumann series in characteristic
coordinates) -> wave representation / response function -> Weyl solution and
m-function by transform, with independent ODE and finite-difference oracles
and checkers for every growth estimate the construction relies on.
"""

from .potentials import (
    Potential,
    PotentialError,
    PotentialNorms,
    compute_norms,
    load_sampled_potential,
    make_catalog_potential,
    read_potential_file,
)
from .kernel import (
    ConvergenceError,
    DomainError,
    GridError,
    KernelField,
    TriangleGrid,
    apply_K,
    build_Q,
    eval_w,
    neumann_solve,
    term_bound,
)
from .wave import (
    BoundaryControl,
    ControlError,
    ResponseFunction,
    WaveField,
    apply_response_operator,
    response_function,
    solve_wave,
)
from .spectral import (
    Amplitude,
    ConvergenceRegion,
    MValue,
    RegionError,
    SpectralPoint,
    TruncationError,
    WeylSample,
    a_amplitude,
    convergence_region,
    k_from_z,
    kappa_to_k,
    m_from_amplitude,
    m_from_response,
    m_from_weyl,
    weyl_solution,
)
from .oracles import InstabilityError, OracleBlowupError, fd_wave_oracle, ode_weyl_oracle
from .bounds import (
    HerglotzReport,
    InfiniteNormError,
    gursa_bound,
    herglotz_check,
    lemma1_check,
    w_bound_l1,
    w_bound_window,
)

__version__ = "0.1.0"

__all__ = [
    "Potential", "PotentialError", "PotentialNorms", "compute_norms",
    "load_sampled_potential", "make_catalog_potential", "read_potential_file",
    "ConvergenceError", "DomainError", "GridError", "KernelField",
    "TriangleGrid", "apply_K", "build_Q", "eval_w", "neumann_solve",
    "term_bound",
    "BoundaryControl", "ControlError", "ResponseFunction", "WaveField",
    "apply_response_operator", "response_function", "solve_wave",
    "Amplitude", "ConvergenceRegion", "MValue", "RegionError",
    "SpectralPoint", "TruncationError", "WeylSample", "a_amplitude",
    "convergence_region", "k_from_z", "kappa_to_k", "m_from_amplitude",
    "m_from_response", "m_from_weyl", "weyl_solution",
    "InstabilityError", "OracleBlowupError", "fd_wave_oracle", "ode_weyl_oracle",
    "HerglotzReport", "InfiniteNormError", "gursa_bound", "herglotz_check",
    "lemma1_check", "w_bound_l1", "w_bound_window",
    "__version__",
]
