"""Explicit Baker-type lower bounds for linear forms over imaginary
quadratic integer rings: certificates, tuning schedules, small-value
witness searches, exact simultaneous approximation tables, and an
end-to-end consistency verifier."""

from .engine import (
    AxiomParams,
    BoundCertificate,
    certificate,
    corollary_bound,
    corollary_x0,
    epsilon,
    log_lower_bound,
    lower_bound,
    q_envelope,
    r_envelope,
    solve_master_threshold,
    z_chain,
    z_inverse,
)
from .errors import (
    CapExceededError,
    DomainError,
    FitRejectedError,
    SingularSystemError,
)
from .harness import (
    ConsistencyReport,
    ConsistencyRow,
    compute_Gk,
    symmetric_height_grid,
    unbalanced_height_grid,
    verify_consistency,
)
from .pade import (
    EnvelopeReport,
    FitResult,
    FormTable,
    SeriesSystem,
    check_determinant,
    exact_determinant,
    exp_system,
    fit_axiom_samples,
    fit_axioms,
    geometric_system,
    hermite_pade,
    linform_remainders,
    log_system,
    table_from_json,
    table_to_json,
    validate_envelopes,
)
from .ring import FieldSpec, RingInt
from .schedule import (
    Schedule,
    build_schedule,
    check_half,
    frequencies,
    q_budget,
    solve_master,
    split,
)
from .search import (
    SearchBox,
    Witness,
    brute_min,
    default_beta0_cap,
    disk_points,
    find_witness,
    minkowski_radius,
    shidlovskii_radius,
    shidlovskii_witness,
)

__version__ = "0.1.0"
