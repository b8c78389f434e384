"""Spectral tools for the linear and energy-critical wave equation in odd
dimensions: radiation fields, exterior light-cone energy, the non-radiative
space and Picard constructions built on them."""

import os as _os

# thread count for the BLAS backend; must be set before numpy loads
_threads = _os.environ.get("LIGHTCONE_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "1.0.0"

from .fields import (  # noqa: E402
    CauchyData,
    Grid,
    GridMismatchError,
    ModeIndex,
    RadialProfile,
    SourceTerm,
    Trajectory,
    TruncationError,
    TruncationWarning,
    h_inner,
    h_norm,
    norm_N,
    norm_W,
    norm_X,
)
from .hankel import free_propagate, free_trajectory, hankel_forward, hankel_inverse  # noqa: E402
from .radiation import (  # noqa: E402
    RadiationProfile,
    apply_dsT,
    apply_T,
    invert_radiation,
    partial_inverse_G,
    radiation_field,
)
from .exterior import exterior_energy_formula, exterior_energy_measure, measure_free_evolution  # noqa: E402
from .plr import PlrBasisSpec, PlrElement, is_nonradiative_linear, materialize, pi_R, plr_basis, project_pR  # noqa: E402
from .duhamel import (  # noqa: E402
    duhamel_from_minus_infinity,
    duhamel_from_plus_infinity,
    extract_scattering,
    nonradiative_source_solve,
    solve_with_report,
)
from .nonlinear import NonlinearityConfig, phi_map, wave_operator  # noqa: E402
from .container import load_any, load_state, save_state  # noqa: E402
