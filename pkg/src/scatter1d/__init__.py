"""scatter1d: wave operators, S-matrices, and winding diagnostics in 1D.

A numerical laboratory for one-dimensional potential scattering.  It builds
the wave operator from generalized eigenfunctions, verifies the exact
splitting of the wave operator into a universal part plus a compact
remainder, and evaluates Levinson's theorem as a winding number over the
boundary of the energy-dilation square.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    ContractError,
    DecayError,
    PhysicsError,
    RangeError,
    UndersampledPathError,
)
from .grids import (
    LineGrid,
    LogGrid,
    ParityVector,
    default_grid,
    default_log_grid,
    fourier,
    inverse_fourier,
    inverse_mellin,
    mellin,
    parity_join,
    parity_split,
)
from .potentials import (
    Potential,
    delta_regularized,
    gaussian_well,
    poschl_teller,
    square_well,
    weighted_norm,
)
from .operators import (
    OperatorMatrix,
    SymbolPair,
    apply_R,
    apply_T_fourier,
    apply_T_mellin,
    function_of_A,
    function_of_H0,
    hilbert_transform,
    r_symbols,
)
from .scatter import (
    ScatteringData,
    SMatrix,
    SpectralSummary,
    bound_state_profile,
    bound_states,
    geometric_lambdas,
    s_matrix,
    s_matrix_sweep,
    threshold_smatrix,
)
from .waveop import (
    RemainderKernel,
    StructureReport,
    WaveOperatorMatrix,
    build_wave_operator,
    compression_deficiency,
    free_band_projection,
    intertwining_defect,
    isometry_defect,
    point_bound_profile,
    point_interaction_omega,
    point_symbol,
    remainder_kernel,
    structure_residual,
)
from .levinson import (
    BoundarySymbol,
    LevinsonReport,
    boundary_symbols,
    levinson_report,
    point_report,
    w1_closed_form,
    winding_phase,
    winding_trace,
)
from .asymptotics import (
    DecayCurve,
    corollary_limits,
    log_time_propagation,
    rescale_window,
    rescaled_family,
)
