"""Short-wave analysis of the line-soliton stability problem.

For transverse wavenumbers rho = sqrt(1 + 1/eps^2) the coupled stability
problem reduces, in the small parameter eps, to a bound state of the well
L0 = -d^2/dx^2 - 4 sech^2(x) weakly coupled to a radiation channel at
wavenumber k ~ sqrt(2)/eps.  This module implements

  * the radiating (outgoing-wave) solve for the channel component,
  * the Lyapunov-Schmidt fixed point producing the complex frequency
    correction curlyE (omega = 1 + eps^2 E + eps^2 curlyE),
  * the golden-rule quadrature for Im(curlyE),
  * the closed-form Fourier integrals over the bound-state profiles, and
  * the asymptotic growth-rate formulas, including a re-derived variant of
    the odd-mode coefficient (the printed coefficient and its
    self-consistent re-derivation differ by a factor of 2; both are exposed
    and the comparison harness reports which one the quadrature supports).

Growth rates are reported as |Im omega| / eps^2; the quartet symmetry of the
full problem makes the sign of Im omega immaterial.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np
import scipy.linalg
from scipy.linalg import solve_banded

from .operators import Grid, Scheme, assemble_schrodinger, build_grid
from .specfun import log_gamma

__all__ = [
    "SQRT17", "E0", "E1", "P_EXP", "Q_EXP",
    "Mode", "MODE0", "MODE1", "MODES",
    "ResolutionError", "NonContractionError",
    "SemiclassicalSolution", "AsymptoticEstimate", "CompareRow",
    "epsilon_to_rho", "radiation_wavenumber", "mode_profile",
    "sommerfeld_solve", "lyapunov_schmidt_solve", "golden_rule_im",
    "fourier_integral_closed_form", "fourier_integral_quadrature",
    "asymptotic_growth_rate", "compare_routes",
]

SQRT17 = math.sqrt(17.0)
E0 = ((SQRT17 - 1.0) / 2.0) ** 2  # 2.438447...
E1 = ((SQRT17 - 3.0) / 2.0) ** 2  # 0.315342...
P_EXP = 2.0 + math.sqrt(E0)       # (sqrt(17)+3)/2
Q_EXP = 2.0 + math.sqrt(E1)       # (sqrt(17)+1)/2

EPSILON_CAP = 0.6                 # validity cap of the fixed-point regime
OSCILLATION_BOUND = 0.5           # max k*h before quadrature is undersampled
QUAD_K_SWITCH = 15.0              # above this, extended precision takes over


class ResolutionError(RuntimeError):
    """The grid undersamples the radiation oscillation (k*h too large)."""


class NonContractionError(RuntimeError):
    """The fixed-point iteration stopped contracting (eps too large)."""


@dataclass(frozen=True)
class Mode:
    """One of the two bound states of the limiting well L0."""

    index: int
    name: str
    energy: float        # E with L0 phi = -E phi
    exponent: float      # decay exponent, also 2 + sqrt(E)
    parity: int          # +1 even, -1 odd (the radiation sign sigma)


MODE0 = Mode(index=0, name="mode0", energy=E0, exponent=P_EXP, parity=+1)
MODE1 = Mode(index=1, name="mode1", energy=E1, exponent=Q_EXP, parity=-1)
MODES = {m.name: m for m in (MODE0, MODE1)}


def epsilon_to_rho(epsilon: float) -> float:
    """Transverse wavenumber rho = sqrt(1 + 1/eps^2)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    return math.sqrt(1.0 + 1.0 / epsilon**2)


def radiation_wavenumber(epsilon: float, mode: Mode, curly_e: complex = 0.0) -> complex:
    """k = sqrt(2 + eps^2 E + eps^2 curlyE)/eps on the branch Re k > 0, Im k >= 0."""
    k = np.sqrt(complex(2.0 + epsilon**2 * (mode.energy + curly_e))) / epsilon
    if k.real < 0:
        k = -k
    if k.imag < 0:
        k = k.conjugate()
    return k


def mode_profile(x: np.ndarray, mode: Mode, normalized: bool = False,
                 spacing: float | None = None) -> np.ndarray:
    """Bound-state profile of L0: sech^sqrt(E0) (even) or tanh sech^sqrt(E1) (odd)."""
    ax = np.abs(x)
    log_sech = -ax + math.log(2.0) - np.log1p(np.exp(-2.0 * ax))
    prof = np.exp(math.sqrt(mode.energy) * log_sech)
    if mode.parity < 0:
        prof = np.tanh(x) * prof
    if normalized:
        if spacing is None:
            raise ValueError("normalization requires the grid spacing")
        prof = prof / math.sqrt(spacing * float(np.sum(prof**2)))
    return prof


def _cumtrapz(vals: np.ndarray, h: float) -> np.ndarray:
    out = np.empty_like(vals)
    out[0] = 0.0
    np.cumsum((vals[1:] + vals[:-1]) * (h / 2.0), out=out[1:])
    return out


def sommerfeld_solve(grid: Grid, f: np.ndarray, k: complex, parity: str | None = None):
    """Outgoing-wave solution of psi'' + k^2 psi = f and its tail amplitude.

    psi(x) = (1/2ik) [ e^{ikx} int_{-L}^{x} e^{-iky} f dy
                     + e^{-ikx} int_{x}^{L} e^{iky} f dy ],
    a = (1/2ik) int e^{-iky} f dy.

    Requires Re k > 0, Im k >= 0 and f decaying at the grid ends.  The
    solution inherits the parity of f; `parity` ("even"/"odd") is accepted
    for interface clarity and not used numerically.
    """
    if k.real <= 0 or k.imag < 0:
        raise ValueError(f"need Re k > 0 and Im k >= 0, got k = {k}")
    if abs(k) * grid.spacing > OSCILLATION_BOUND:
        raise ResolutionError(
            f"k*h = {abs(k) * grid.spacing:.3f} exceeds {OSCILLATION_BOUND}; "
            f"refine the grid")
    x = grid.nodes
    h = grid.spacing
    em = np.exp(-1j * k * x) * f
    ep = np.exp(1j * k * x) * f
    left = _cumtrapz(em, h)
    right_total = _cumtrapz(ep, h)
    right = right_total[-1] - right_total
    psi = (np.exp(1j * k * x) * left + np.exp(-1j * k * x) * right) / (2j * k)
    a = left[-1] / (2j * k)
    return psi, complex(a)


# --- phi solve: bordered tridiagonal systems after a one-time reduction ----

_REDUCTION_CACHE: dict[tuple[float, int], tuple] = {}
_REDUCTION_CACHE_MAX = 2


def _l0_reduction(grid: Grid):
    """Orthogonal tridiagonalization of the dense L0 matrix, cached per grid."""
    key = (grid.half_length, grid.n_points)
    hit = _REDUCTION_CACHE.get(key)
    if hit is not None:
        return hit
    l0 = assemble_schrodinger(grid, 4.0, 0.0).entries
    hmat, q = scipy.linalg.hessenberg(l0, calc_q=True)
    red = (q, hmat.diagonal().copy(), hmat.diagonal(1).copy(), hmat.diagonal(-1).copy())
    if len(_REDUCTION_CACHE) >= _REDUCTION_CACHE_MAX:
        _REDUCTION_CACHE.pop(next(iter(_REDUCTION_CACHE)))
    _REDUCTION_CACHE[key] = red
    return red


def _phi_solve(grid: Grid, shift: complex, rhs: np.ndarray, phi0: np.ndarray) -> np.ndarray:
    """Solve (L0 + shift) phi = rhs restricted to the complement of phi0.

    Bordered elimination: two tridiagonal solves in the reduced coordinates,
    combined to enforce <phi0, phi> = 0.
    """
    q, d, eu, el = _l0_reduction(grid)
    n = grid.n_points
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = eu
    ab[1, :] = d + shift
    ab[2, :-1] = el
    c = q.T @ phi0
    y1 = solve_banded((1, 1), ab, q.T @ rhs)
    y2 = solve_banded((1, 1), ab, c)
    alpha = (c @ y1) / (c @ y2)
    phi = q @ (y1 - alpha * y2)
    # remove roundoff leakage along phi0
    phi -= (grid.spacing * (phi0 @ phi)) * phi0
    return phi


def semiclassical_grid(epsilon: float, mode: Mode, half_length: float = 40.0,
                       hmax: float = 0.1, oscillation_factor: float = 0.45) -> Grid:
    """Grid fine enough for the radiation oscillation at this epsilon.

    h <= oscillation_factor / k keeps k*h well under the resolution bound;
    n is rounded up to a multiple of 64 so nearby epsilons share grids (and
    the cached tridiagonal reduction).
    """
    k0 = abs(radiation_wavenumber(epsilon, mode))
    h = min(hmax, oscillation_factor / k0)
    n = int(np.ceil(2.0 * half_length / h))
    n = ((n + 63) // 64) * 64
    return build_grid(half_length, n, Scheme.FOURIER)


@dataclass
class SemiclassicalSolution:
    """Converged output of the Lyapunov-Schmidt fixed point."""

    epsilon: float
    mode: Mode
    curly_e: complex
    omega: complex
    k: complex
    phi: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    tail_amplitude: complex
    iterations: int
    residual: float
    grid: Grid = field(repr=False)
    im_noise_floor: float

    @property
    def psi_inf(self) -> float:
        return float(np.max(np.abs(self.psi)))

    @property
    def growth_rate(self) -> float:
        """|Im omega| / eps^2 (= |Im curlyE|)."""
        return abs(self.omega.imag) / self.epsilon**2

    @property
    def omega_defect_scale(self) -> float:
        """|omega - 1 - eps^2 E| / eps^3, the recorded bound constant."""
        return abs(self.omega - 1.0 - self.epsilon**2 * self.mode.energy) / self.epsilon**3


def lyapunov_schmidt_solve(
    epsilon: float,
    mode: Mode,
    grid: Grid | None = None,
    *,
    tol: float = 1e-12,
    max_iter: int = 400,
    non_contraction_window: int = 50,
) -> SemiclassicalSolution:
    """Successive substitution on (curlyE, phi, psi) from the zero initial guess.

    Each sweep: radiating solve for psi with the current source, projection
    onto the bound state for curlyE, then the deflated linear solve for the
    profile correction phi.  Converged when the relative change of curlyE
    drops below `tol`.
    """
    if not (0.0 < epsilon <= EPSILON_CAP):
        raise ValueError(f"epsilon must lie in (0, {EPSILON_CAP}], got {epsilon}")
    if grid is None:
        grid = semiclassical_grid(epsilon, mode)
    x = grid.nodes
    h = grid.spacing
    phi0 = mode_profile(x, mode, normalized=True, spacing=h)
    s2 = grid.sech() ** 2
    proj_weight = s2 * phi0
    e_mode = mode.energy

    curly_e = 0.0 + 0.0j
    phi = np.zeros(grid.n_points, dtype=complex)
    psi = np.zeros(grid.n_points, dtype=complex)
    a = 0.0 + 0.0j
    residual = np.inf
    worst_run = 0
    best_res = np.inf
    parity = "even" if mode.parity > 0 else "odd"

    for it in range(1, max_iter + 1):
        k = radiation_wavenumber(epsilon, mode, curly_e)
        f = -2.0 * s2 * (phi0 + phi + 2.0 * psi)
        psi, a = sommerfeld_solve(grid, f, k, parity)
        new_e = 2.0 * h * complex(np.sum(proj_weight * psi))
        rhs = 2.0 * s2 * psi - new_e * phi0
        phi = _phi_solve(grid, e_mode + new_e, rhs, phi0)
        residual = abs(new_e - curly_e) / max(abs(new_e), 1e-300)
        curly_e = new_e
        if residual <= tol:
            break
        if residual >= best_res:
            worst_run += 1
            if worst_run >= non_contraction_window:
                raise NonContractionError(
                    f"residual stopped decreasing for {non_contraction_window} "
                    f"sweeps at epsilon = {epsilon} ({mode.name})")
        else:
            best_res = residual
            worst_run = 0

    omega = 1.0 + epsilon**2 * e_mode + epsilon**2 * curly_e
    if omega.imag < 0:
        # quartet symmetry: report the first-quadrant member
        omega = omega.conjugate()
        curly_e = curly_e.conjugate()
        k = radiation_wavenumber(epsilon, mode, curly_e)
    noise = 64.0 * np.finfo(float).eps * float(h * np.sum(np.abs(proj_weight)))
    return SemiclassicalSolution(
        epsilon=epsilon, mode=mode, curly_e=curly_e, omega=omega, k=k,
        phi=phi, psi=psi, tail_amplitude=a, iterations=it, residual=residual,
        grid=grid, im_noise_floor=noise,
    )


# --- Fourier integrals over the bound-state profiles -----------------------

def _gamma_real(x: float) -> float:
    return math.exp(log_gamma(complex(x, 0.0)).real)


def fourier_integral_closed_form(k: float, mode: Mode) -> complex:
    """Exact value of int sech^2(x) phi_mode(x) e^{-ikx} dx via Gamma factors.

    Even mode: 2^(p-1)/Gamma(p) |Gamma((p+ik)/2)|^2, real and positive.
    Odd mode: -(i k 2^(q-1))/(q Gamma(q)) |Gamma((q+ik)/2)|^2, purely
    imaginary.  p and q are the profile decay exponents.
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    e = mode.exponent
    g2 = math.exp(2.0 * log_gamma(complex(e / 2.0, k / 2.0)).real)
    if mode.parity > 0:
        return complex(2.0 ** (e - 1.0) / _gamma_real(e) * g2)
    return -1j * k * 2.0 ** (e - 1.0) / (e * _gamma_real(e)) * g2


def _quadrature_double(k: float, mode: Mode, half_length: float, h: float) -> complex:
    n = int(np.ceil(half_length / h))
    x = h * np.arange(n + 1)
    prof = mode_profile(x, mode) / np.cosh(x) ** 2
    if mode.parity > 0:
        w = prof * np.cos(k * x)
        w[0] *= 0.5
        return complex(2.0 * h * (np.sum(w) - 0.5 * w[-1]))
    w = prof * np.sin(k * x)
    w[0] *= 0.5
    return complex(-2j * h * (np.sum(w) - 0.5 * w[-1]))


def _quadrature_mp(k: float, mode: Mode) -> complex:
    # cancellation burns ~pi*k/(2 ln 10) digits; pad generously
    dps = 28 + int(0.70 * k)
    with mp.workdps(dps):
        kk = mp.mpf(repr(float(k)))
        e = (mp.sqrt(17) + (3 if mode.parity > 0 else 1)) / 2
        h = 2 * mp.pi / (kk + mp.mpf('0.75') * dps + 12)
        half_length = max(mp.mpf(30), (mp.pi * kk / 2 + dps * mp.log(10)) / 2)
        n = int(mp.ceil(half_length / h))
        total = mp.mpf(0)
        if mode.parity > 0:
            for j in range(n + 1):
                xj = j * h
                w = mp.sech(xj) ** e * mp.cos(kk * xj)
                total += w / 2 if j in (0, n) else w
            return complex(2 * h * total)
        for j in range(n + 1):
            xj = j * h
            w = mp.tanh(xj) * mp.sech(xj) ** e * mp.sin(kk * xj)
            total += w / 2 if j in (0, n) else w
        return complex(-2j * h * total)


def fourier_integral_quadrature(k: float, mode: Mode, *, grid: Grid | None = None) -> complex:
    """Trapezoid evaluation of int sech^2(x) phi_mode(x) e^{-ikx} dx.

    The integrand is smooth and exponentially decaying, so the trapezoid rule
    is spectrally accurate; the only real enemy is cancellation, which costs
    about pi*k/2 digits.  Above k = 15 the sum therefore runs in extended
    precision (the value is ~1e-11 and falling).
    """
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if grid is not None:
        if k * grid.spacing > OSCILLATION_BOUND:
            raise ResolutionError(
                f"k*h = {k * grid.spacing:.3f} exceeds {OSCILLATION_BOUND}")
        return _quadrature_double(k, mode, grid.half_length, grid.spacing)
    if k <= QUAD_K_SWITCH:
        h = min(0.02, 0.4 / max(k, 1.0))
        return _quadrature_double(k, mode, 40.0, h)
    return _quadrature_mp(k, mode)


def golden_rule_im(epsilon: float, mode: Mode, grid: Grid | None = None) -> float:
    """Leading-order Im(curlyE): (2/k) |int sech^2 phi_mode e^{-ikx} dx|^2.

    k = sqrt(2 + eps^2 E)/eps (the radiation wavenumber at curlyE = 0); the
    integral is evaluated by quadrature, independent of the closed form.
    Strictly positive.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    k = radiation_wavenumber(epsilon, mode).real
    val = abs(fourier_integral_quadrature(k, mode, grid=grid)) ** 2 * 2.0 / k
    return float(val)


@dataclass(frozen=True)
class AsymptoticEstimate:
    """Growth-rate predictions at one epsilon (rates are |Im omega|/eps^2)."""

    epsilon: float
    mode: Mode
    growth_rate_formula: float
    growth_rate_quadrature: float
    im_omega: float
    # self-consistent re-derivation of the odd-mode coefficient (differs from
    # the printed one by a factor of 2); None for the even mode
    growth_rate_formula_variant: float | None = None


def asymptotic_growth_rate(epsilon: float, mode: Mode) -> AsymptoticEstimate:
    """Closed-form asymptotic growth rate and its quadrature companion.

    Formula route: Re(lambda) ~ 2^(p+3/2) pi^2 / Gamma(p)^2 * eps^(3-2p)
    * exp(-sqrt(2) pi / eps) for the even mode, with the analogous odd-mode
    coefficient 2^(p+5/2) pi^2 / (q^2 Gamma(q)^2) and power eps^(1-2q)
    (its re-derived variant carries 2^(q+5/2)).  Quadrature route:
    Im omega = sqrt(2) eps^3 |I(sqrt(2)/eps)|^2 with the integral evaluated
    numerically at the leading-order wavenumber.
    """
    if not (0.0 < epsilon <= EPSILON_CAP):
        raise ValueError(f"epsilon must lie in (0, {EPSILON_CAP}], got {epsilon}")
    expo = math.exp(-math.sqrt(2.0) * math.pi / epsilon)
    if mode.parity > 0:
        coeff = 2.0 ** (P_EXP + 1.5) * math.pi**2 / _gamma_real(P_EXP) ** 2
        rate = coeff * epsilon ** (3.0 - 2.0 * P_EXP) * expo
        variant = None
    else:
        base = math.pi**2 / (Q_EXP**2 * _gamma_real(Q_EXP) ** 2)
        power = epsilon ** (1.0 - 2.0 * Q_EXP) * expo
        rate = 2.0 ** (P_EXP + 2.5) * base * power
        variant = 2.0 ** (Q_EXP + 2.5) * base * power
    k_lead = math.sqrt(2.0) / epsilon
    quad = math.sqrt(2.0) * epsilon * abs(fourier_integral_quadrature(k_lead, mode)) ** 2
    return AsymptoticEstimate(
        epsilon=epsilon, mode=mode,
        growth_rate_formula=rate,
        growth_rate_quadrature=float(quad),
        im_omega=epsilon**2 * rate,
        growth_rate_formula_variant=variant,
    )


# --- multi-route comparison -------------------------------------------------

@dataclass(frozen=True)
class CompareRow:
    epsilon: float
    rho: float
    mode: str
    route: str
    growth_rate: float
    im_omega: float
    status: str


ROUTES = ("dense", "lyapunov_schmidt", "quadrature", "formula")
DENSE_MIN_EPSILON = 0.35


def compare_routes(
    epsilons: list[float],
    grid: Grid | None = None,
    modes: tuple[Mode, ...] = (MODE0, MODE1),
    *,
    dense_min_epsilon: float = DENSE_MIN_EPSILON,
) -> list[CompareRow]:
    """Growth rates per (epsilon, mode) from the four routes, one row each.

    Routes: "dense" (full eigensolver at rho(eps); only attempted for
    eps >= dense_min_epsilon, where the exponentially small real parts are
    above the double-precision noise of the dense method), "lyapunov_schmidt"
    (converged fixed point), "quadrature" (golden-rule integral), "formula"
    (closed-form asymptotics).  Failures annotate the row instead of
    aborting the table.
    """
    from .eigensolver import classify_spectrum, eigen_decompose
    from .operators import assemble_coupled

    rows: list[CompareRow] = []
    for eps in epsilons:
        rho = epsilon_to_rho(eps)
        dense_matches: dict[str, float] = {}
        dense_status = "ok"
        if eps < dense_min_epsilon:
            dense_status = "unresolvable"
        else:
            dgrid = grid if grid is not None else build_grid(40.0, 1024, Scheme.FOURIER)
            try:
                op = assemble_coupled(dgrid, rho)
                lam, vec = eigen_decompose(op)
                sl = classify_spectrum(lam, vec, dgrid, rho, matrix=op.entries)
                lams = sl.localized()
                for mode in modes:
                    target = (1.0 + eps**2 * mode.energy) / eps**2
                    # nearest localized eigenvalue in the mode's frequency band,
                    # regardless of how small its real part came out
                    cand = [l for l in lams
                            if abs(abs(l.imag) - target) < 0.4 * target]
                    if cand:
                        best = max(cand, key=lambda l: abs(l.real))
                        dense_matches[mode.name] = abs(float(best.real))
            except Exception as exc:  # pragma: no cover - defensive
                dense_status = f"error:{exc.__class__.__name__}"
        for mode in modes:
            if dense_status != "ok":
                rows.append(CompareRow(eps, rho, mode.name, "dense",
                                       float("nan"), float("nan"), dense_status))
            elif mode.name in dense_matches:
                g = dense_matches[mode.name]
                rows.append(CompareRow(eps, rho, mode.name, "dense",
                                       g, eps**2 * g, "ok"))
            else:
                rows.append(CompareRow(eps, rho, mode.name, "dense",
                                       float("nan"), float("nan"), "unresolvable"))
            try:
                sol = lyapunov_schmidt_solve(eps, mode)
                g = sol.growth_rate
                rows.append(CompareRow(eps, rho, mode.name, "lyapunov_schmidt",
                                       g, eps**2 * g, "ok"))
            except (NonContractionError, ValueError, ResolutionError) as exc:
                rows.append(CompareRow(eps, rho, mode.name, "lyapunov_schmidt",
                                       float("nan"), float("nan"),
                                       f"error:{exc.__class__.__name__}"))
            g = golden_rule_im(eps, mode)
            rows.append(CompareRow(eps, rho, mode.name, "quadrature",
                                   g, eps**2 * g, "ok"))
            est = asymptotic_growth_rate(eps, mode)
            rows.append(CompareRow(eps, rho, mode.name, "formula",
                                   est.growth_rate_formula, est.im_omega, "ok"))
    return rows
