"""Dense nonsymmetric eigendecomposition and continuum/localized classification.

Discretizing on a finite box renders the continuous spectrum as finitely many
"continuum-like" eigenvalues near the locus +-i(k^2 + 1 - rho^2); genuine
discrete modes are separated from them by an eigenvector localization measure
combined with the distance to that locus.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .operators import Grid, OperatorMatrix, assemble_coupled, continuum_locus

__all__ = [
    "EigenConvergenceError",
    "SpectrumSlice",
    "eigen_decompose",
    "localization_measure",
    "classify_spectrum",
    "unstable_eigenvalues",
    "quartet_representative",
    "LOCALIZED",
    "CONTINUUM_LIKE",
]

LOCALIZED = "localized"
CONTINUUM_LIKE = "continuum_like"

RESIDUAL_BOUND = 1e-8
DEFAULT_LOCALIZATION_THRESHOLD = 0.9
# absolute distance from the discretized continuum locus below which an
# eigenvalue cannot count as localized; large enough to suppress slowly
# varying band-edge lattice modes (which shift from the locus by a few times
# the edge spacing (pi/L)^2), small enough to admit discrete branches soon
# after they detach from the band edge
DEFAULT_CONTINUUM_MARGIN = 0.03
DEFAULT_RE_THRESHOLD = 1e-6


class EigenConvergenceError(RuntimeError):
    """QR iteration failed; carries the number of unconverged eigenvalues."""

    def __init__(self, unconverged: int, message: str = ""):
        self.unconverged = unconverged
        super().__init__(message or f"{unconverged} eigenvalue(s) failed to converge")


@dataclass
class SpectrumSlice:
    """All eigenvalues of the coupled problem at one rho, with classification."""

    rho: float
    eigenvalues: np.ndarray
    residuals: np.ndarray
    localization: np.ndarray
    labels: list[str] = field(repr=False)

    def localized(self) -> np.ndarray:
        mask = np.fromiter((lb == LOCALIZED for lb in self.labels), bool,
                           count=len(self.labels))
        return self.eigenvalues[mask]

    def unstable(self, re_threshold: float = DEFAULT_RE_THRESHOLD) -> np.ndarray:
        lam = self.localized()
        lam = lam[lam.real > re_threshold]
        return lam[np.argsort(-lam.real, kind="stable")]


def eigen_decompose(matrix: OperatorMatrix | np.ndarray):
    """Full dense eigendecomposition (LAPACK balanced Hessenberg + shifted QR).

    Returns (eigenvalues, eigenvectors) with eigenvectors in columns,
    each of unit 2-norm.  Raises EigenConvergenceError if QR fails.
    """
    m = matrix.entries if isinstance(matrix, OperatorMatrix) else np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"square matrix required, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    try:
        lam, vec = scipy.linalg.eig(m)
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise EigenConvergenceError(m.shape[0], str(exc)) from exc
    return lam, vec


def residual_norms(m: np.ndarray, lam: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Columnwise ||M v - lambda v||_2 / ||v||_2."""
    r = m @ vec - vec * lam[np.newaxis, :]
    return np.linalg.norm(r, axis=0) / np.linalg.norm(vec, axis=0)


def localization_measure(vec: np.ndarray, grid: Grid) -> np.ndarray:
    """Fraction of eigenvector 2-norm carried by the central half |x| <= L/2.

    Works for N-vectors and stacked 2N-vectors of the coupled problem.
    """
    core = np.abs(grid.nodes) <= grid.half_length / 2.0
    reps = vec.shape[0] // grid.n_points
    mask = np.tile(core, reps)
    num = np.linalg.norm(vec[mask, :], axis=0)
    den = np.linalg.norm(vec, axis=0)
    return num / den


def classify_spectrum(
    eigs: np.ndarray,
    vectors: np.ndarray,
    grid: Grid,
    rho: float,
    *,
    matrix: np.ndarray | None = None,
    localization_threshold: float = DEFAULT_LOCALIZATION_THRESHOLD,
    continuum_margin: float = DEFAULT_CONTINUUM_MARGIN,
) -> SpectrumSlice:
    """Label each eigenpair localized / continuum-like.

    Localized requires the localization measure above the threshold AND the
    distance from the discretized continuum locus {+-i(k^2+1-rho^2)} above the
    margin.  Eigenvalues are sorted by descending real part, then imaginary
    part, for deterministic output.
    """
    eigs = np.asarray(eigs)
    if vectors.shape[1] != eigs.shape[0]:
        raise ValueError("eigenvalue/eigenvector count mismatch")
    order = np.lexsort((eigs.imag, -eigs.real))
    eigs = eigs[order]
    vectors = vectors[:, order]

    loc = localization_measure(vectors, grid)
    mu = continuum_locus(grid, rho)
    # distance to the set {i mu} U {-i mu}: minimized over sign by |Im|
    d = np.abs(eigs.real[:, None] + 1j * (np.abs(eigs.imag)[:, None] - mu[None, :]))
    dist = d.min(axis=1)

    if matrix is not None:
        res = residual_norms(matrix, eigs, vectors)
    else:
        res = np.zeros_like(loc)
    labels = [
        LOCALIZED if (lc > localization_threshold and dd > continuum_margin)
        else CONTINUUM_LIKE
        for lc, dd in zip(loc, dist)
    ]
    return SpectrumSlice(rho=float(rho), eigenvalues=eigs, residuals=res,
                         localization=loc, labels=labels)


def quartet_representative(lam: complex | np.ndarray) -> np.ndarray:
    """Map to the closed first quadrant: |Re| + i |Im|."""
    lam = np.asarray(lam)
    return np.abs(lam.real) + 1j * np.abs(lam.imag)


def unstable_eigenvalues(
    grid: Grid,
    rho: float,
    *,
    re_threshold: float = DEFAULT_RE_THRESHOLD,
    localization_threshold: float = DEFAULT_LOCALIZATION_THRESHOLD,
    continuum_margin: float = DEFAULT_CONTINUUM_MARGIN,
    collapse_quartets: bool = False,
) -> np.ndarray:
    """Localized eigenvalues with Re > re_threshold, sorted by descending Re.

    With collapse_quartets, one representative per symmetry orbit
    {lambda, -lambda, conj, -conj} is kept (the closed-first-quadrant member).
    """
    op = assemble_coupled(grid, rho)
    lam, vec = eigen_decompose(op)
    sl = classify_spectrum(lam, vec, grid, rho, matrix=op.entries,
                           localization_threshold=localization_threshold,
                           continuum_margin=continuum_margin)
    out = sl.unstable(re_threshold)
    if collapse_quartets and out.size:
        reps = quartet_representative(out)
        keep: list[complex] = []
        for r in reps:
            if not any(abs(r - k) < 1e-6 for k in keep):
                keep.append(complex(r))
        out = np.array(keep)
        out = out[np.argsort(-out.real, kind="stable")]
    return out
