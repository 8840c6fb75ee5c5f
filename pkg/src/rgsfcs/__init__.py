"""Belt-restricted Slepian compressed sensing for spherical near-field
to far-field characterization.

Builds band-limited Slepian functions concentrated on a latitudinal belt
of the rotation group, recovers their coefficients from randomized belt
measurements by quadratically constrained basis pursuit, and compares
against classical and Wigner-basis baselines.
"""

from .errors import (
    ConsistencyError,
    DegenerateBasisError,
    DomainError,
    IndexDomainError,
    ParameterError,
    RgsfError,
    ShapeError,
    SolverError,
    UndefinedReferenceError,
)
from .forward import (
    DeviceModel,
    GroundTruth,
    device_to_wigner_coeffs,
    evaluate_field,
    make_device,
    synthesize_measurements,
    wigner_to_sw_coeffs,
)
from .methods import (
    METHODS,
    MethodConfig,
    ReconstructionReport,
    assemble_rgsf_matrix,
    assemble_wd_matrix,
    grid_measurements,
    predict_recovery_budget,
    run_padded_fft,
    run_rgsf_cs,
    run_wd_cs,
)
from .metrics import (
    MetricBundle,
    belt_energy,
    coefficient_errors,
    interior_window,
    m_nonzero_energy_fraction,
    relative_magnitude,
    snr,
)
from .sampling import (
    MeasurementSet,
    equiangular_grid,
    precondition,
    preconditioner_weights,
    sample_belt,
    sample_so3,
)
from .slepian import (
    FULL_SPHERE,
    BeltRegion,
    RgsfBasis,
    build_basis,
    evaluate_rgsf,
    from_rgsf_coeffs,
    load_basis,
    save_basis,
    sparsity_bound_bounded_orders,
    sparsity_bound_k_sparse,
    to_rgsf_coeffs,
)
from .solver import QcbpProblem, QcbpSolution, solve_qcbp
from .specfun import (
    num_wigner,
    spherical_hankel1,
    wigner_D,
    wigner_d,
    wigner_index,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
