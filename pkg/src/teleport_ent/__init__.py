"""Entanglement and teleportation diagnostics for bipartite d x d states."""

__version__ = "0.1.0"

from .errors import InvariantError, StateParseError
from .states import (
    DensityMatrix,
    PureBipartiteState,
    PureDecomposition,
    SchmidtSpectrum,
    haar_unitary,
    hjw_decomposition,
    random_density_matrix,
    random_isometry,
    random_pure_state,
    random_spectrum,
    schmidt,
    spectral_decomposition,
    validated_decomposition,
)
from .measures import (
    MeasureReport,
    RankClass,
    analyze_pure,
    central_identity_residual,
    classical_fidelity_limit,
    classify_rank_band,
    concurrence_2qubit,
    e_d2,
    e_d3,
    fidelity_from_fraction,
    fidelity_from_negativity,
    is_useful,
    negativity_fraction_relation_check,
    negativity_mixed,
    negativity_pure,
    rank2_bounds,
    rank3_fidelity_lower_bound,
    rank3_mixed_bound,
    singlet_fraction_pure,
)
from .mixed import (
    OptResult,
    OptimizerConfig,
    classify_mixed,
    cren_estimate,
    cren_upper_bound,
    e_d2_mixed,
    e_d3_mixed,
    fef_2qubit_closed_form,
    singlet_fraction_mixed,
)
from .qutrit_family import (
    FamilyParams,
    FamilyReport,
    build_rho_f,
    declared_decomposition,
    declared_decomposition_value,
    e32_closed_form,
    e32_of_family,
    min_avg_fraction,
    rho_c,
)
from .dynamics import (
    BathParams,
    DynamicsConfig,
    ModelKind,
    SweepResult,
    Trajectory,
    antisymmetric_initial_state,
    collective_coefficients,
    coupling_kernel,
    default_initial_state,
    evolve,
    lindblad_rhs,
    shift_kernel,
    squeezed_occupations,
    step_doubling_check,
    sweep,
    thermal_occupation,
)

__all__ = [name for name in dir() if not name.startswith("_")]
