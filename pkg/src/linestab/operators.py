"""Grid construction and dense assembly of the line-soliton stability operators.

The linearization around the soliton couples two Schrodinger operators with
sech^2 wells,

    L_plus  = -d^2/dx^2 + 1 - 6 sech^2(x),
    L_minus = -d^2/dx^2 + 1 - 2 sech^2(x),

into the block eigenvalue problem

    [[0, L_minus - rho^2], [-(L_plus - rho^2), 0]] (U, V)^T = lambda (U, V)^T,

with rho the transverse wavenumber.  The auxiliary well
L0 = -d^2/dx^2 - 4 sech^2(x) governs the short-wave limit.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

__all__ = [
    "Scheme",
    "Grid",
    "OperatorMatrix",
    "build_grid",
    "second_derivative_matrix",
    "assemble_schrodinger",
    "assemble_coupled",
    "continuum_locus",
    "LPLUS_WELL",
    "LMINUS_WELL",
    "L0_WELL",
]

# (well depth c, shift s) for -d2/dx2 + s - c sech^2(x)
LPLUS_WELL = (6.0, 1.0)
LMINUS_WELL = (2.0, 1.0)
L0_WELL = (4.0, 0.0)


class Scheme(str, enum.Enum):
    FOURIER = "fourier_collocation"
    FD4 = "finite_difference_4"


@dataclass(frozen=True)
class Grid:
    """Uniform symmetric grid on [-L, L), periodic convention."""

    half_length: float
    n_points: int
    scheme: Scheme
    nodes: np.ndarray = field(repr=False)
    spacing: float

    def sech(self) -> np.ndarray:
        return 1.0 / np.cosh(self.nodes)


@dataclass(frozen=True)
class OperatorMatrix:
    entries: np.ndarray
    grid: Grid
    label: str


def build_grid(half_length: float, n_points: int, scheme: Scheme | str = Scheme.FOURIER) -> Grid:
    """Uniform nodes x_j = -L + j h, h = 2L/N, j = 0..N-1.

    N must be even and >= 16; the last node is L - h (periodic convention).
    """
    scheme = Scheme(scheme)
    if not half_length > 0:
        raise ValueError(f"half_length must be positive, got {half_length}")
    if n_points < 16 or n_points % 2 != 0:
        raise ValueError(f"n_points must be even and >= 16, got {n_points}")
    h = 2.0 * half_length / n_points
    nodes = -half_length + h * np.arange(n_points)
    return Grid(half_length=float(half_length), n_points=int(n_points),
                scheme=scheme, nodes=nodes, spacing=h)


def second_derivative_matrix(grid: Grid) -> np.ndarray:
    """Dense d^2/dx^2 under the grid's scheme.

    Fourier collocation: the standard periodic spectral matrix, scaled from
    [0, 2pi).  FD4: fourth-order central stencil with Dirichlet ends (stencil
    entries beyond the boundary are dropped, i.e. the function is extended
    by zero).  Both are symmetric.
    """
    n = grid.n_points
    if grid.scheme is Scheme.FOURIER:
        h = 2.0 * np.pi / n
        j = np.arange(1, n)
        col = np.empty(n)
        col[0] = -np.pi**2 / (3.0 * h**2) - 1.0 / 6.0
        col[1:] = -((-1.0) ** j) / (2.0 * np.sin(j * h / 2.0) ** 2)
        return (np.pi / grid.half_length) ** 2 * toeplitz(col)
    h2 = grid.spacing**2
    d = np.zeros((n, n))
    i = np.arange(n)
    d[i, i] = -2.5
    for off, w in ((1, 4.0 / 3.0), (2, -1.0 / 12.0)):
        d[i[:-off], i[:-off] + off] = w
        d[i[off:], i[off:] - off] = w
    return d / h2


def assemble_schrodinger(grid: Grid, well_depth: float, shift: float) -> OperatorMatrix:
    """Dense matrix for -d^2/dx^2 + shift - well_depth * sech^2(x)."""
    d2 = second_derivative_matrix(grid)
    pot = shift - well_depth * grid.sech() ** 2
    m = -d2
    m[np.diag_indices_from(m)] += pot
    label = {LPLUS_WELL: "Lplus", LMINUS_WELL: "Lminus", L0_WELL: "L0"}.get(
        (well_depth, shift), "schrodinger"
    )
    return OperatorMatrix(entries=m, grid=grid, label=label)


def assemble_coupled(
    grid: Grid,
    rho: float,
    well_depths: tuple[float, float] = (LPLUS_WELL[0], LMINUS_WELL[0]),
) -> OperatorMatrix:
    """2N x 2N stability matrix [[0, Lm - rho^2], [-(Lp - rho^2), 0]].

    `well_depths` = (c_plus, c_minus); passing (0, 0) removes the potentials
    (free-space test hook).
    """
    if rho < 0:
        raise ValueError(f"rho must be nonnegative, got {rho}")
    n = grid.n_points
    cp, cm = well_depths
    lp = assemble_schrodinger(grid, cp, 1.0).entries
    lm = assemble_schrodinger(grid, cm, 1.0).entries
    r2 = rho**2
    i = np.diag_indices(n)
    lp[i] -= r2
    lm[i] -= r2
    m = np.zeros((2 * n, 2 * n))
    m[:n, n:] = lm
    m[n:, :n] = -lp
    return OperatorMatrix(entries=m, grid=grid, label="coupled")


def continuum_locus(grid: Grid, rho: float) -> np.ndarray:
    """Discretized continuum eigenvalue positions +-i(k_m^2 + 1 - rho^2).

    k_m = pi m / L for m = 0..N/2 are the grid's resolvable wavenumbers.
    Returns the nonnegative imaginary parts (one sign representative).
    """
    m = np.arange(grid.n_points // 2 + 1)
    k = np.pi * m / grid.half_length
    return k**2 + 1.0 - rho**2
