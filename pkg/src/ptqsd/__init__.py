"""PT-symmetric discrimination of pure qubit states."""

from .discriminate import (
    ALL_CPT,
    COMBINED,
    DETERMINISTIC,
    STOCHASTIC,
    DiscriminationPlan,
    MeasurementRecord,
    ProtocolResult,
    born_probability,
    closed_form_locus,
    design_cpt_orthogonal,
    discriminate3,
    discriminate_n,
    hermitian_projector,
    measure_deterministic,
    measure_stochastic,
    plan_pair,
    plan_protocol,
    plan_round,
    run_protocol,
    tan_omega_tau,
    tau_closed_form,
    tau_numeric,
)
from .errors import (
    BrokenPTRegime,
    DegenerateTriple,
    InvalidParameter,
    NoOrthogonalizingTime,
    NotOrthogonalizable,
    PlanningError,
    PTError,
    SampleBudgetExceeded,
    ZeroCPTNorm,
)
from .linalg2 import expm_2x2, expm_series, inner_hermitian, mat_apply
from .montecarlo import MonteCarloResult, simulate_trials
from .ptcore import (
    FamilyParams,
    PTHamiltonian,
    StateTriple,
    c_operator,
    cpt_inner,
    cpt_projector,
    gram_evolution,
    propagator,
    pt_hamiltonian,
    spread_family,
    state_family,
)

__version__ = "0.1.0"
