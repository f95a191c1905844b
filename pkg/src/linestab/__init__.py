"""Transverse-instability spectrum of the hyperbolic-NLS line soliton.

Dense eigenvalue scans over the transverse wavenumber, bifurcation
detection, the short-wave (semiclassical) fixed point, and cross-route
growth-rate comparisons.
"""

from .eigensolver import (
    SpectrumSlice,
    classify_spectrum,
    eigen_decompose,
    unstable_eigenvalues,
)
from .operators import Grid, Scheme, assemble_coupled, assemble_schrodinger, build_grid
from .scan import (
    BifurcationEvent,
    BifurcationKind,
    BranchPath,
    detect_bifurcations,
    rho_scan,
    track_all_branches,
    track_branch,
)
from .semiclassical import (
    E0,
    E1,
    MODE0,
    MODE1,
    MODES,
    AsymptoticEstimate,
    SemiclassicalSolution,
    asymptotic_growth_rate,
    compare_routes,
    epsilon_to_rho,
    fourier_integral_closed_form,
    fourier_integral_quadrature,
    golden_rule_im,
    lyapunov_schmidt_solve,
    sommerfeld_solve,
)
from .specfun import abs_gamma_sq, log_gamma, sech_pow

__version__ = "0.1.0"
