"""Transverse-wavenumber sweeps, branch tracking, and bifurcation detection.

A scan produces one classified spectrum slice per rho.  Localized eigenvalues
are tracked across slices (after folding to the closed first quadrant, which
removes the Hamiltonian symmetry orbit) and the tracked branches are searched
for the bifurcation sequence: collisions of same-axis pairs that produce
complex quartets, and new branches detaching from the continuum.
"""

from __future__ import annotations

import enum
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .eigensolver import (
    DEFAULT_CONTINUUM_MARGIN,
    DEFAULT_LOCALIZATION_THRESHOLD,
    DEFAULT_RE_THRESHOLD,
    SpectrumSlice,
    classify_spectrum,
    eigen_decompose,
    quartet_representative,
)
from .operators import Grid, Scheme, assemble_coupled, build_grid

__all__ = [
    "BifurcationKind",
    "BifurcationEvent",
    "BranchPath",
    "SeedNotFoundError",
    "ScanFailure",
    "rho_scan",
    "track_branch",
    "track_all_branches",
    "detect_bifurcations",
]

DEFAULT_JUMP_BOUND = 0.05
DEFAULT_SCAN_STEP = 0.01
# |Re| (resp. |Im|) below which an eigenvalue counts as sitting on an axis
AXIS_TOL = 1e-4


def _match_radius(bound: float, drho: float, lam: complex) -> float:
    # Near a collision the eigenvalue velocity has a square-root singularity;
    # the continuity scale 10*step*max(1,|lambda|) keeps branches matched
    # through it, while `bound` is the floor for slow branches.
    return max(bound, 10.0 * drho * max(1.0, abs(lam)))


class BifurcationKind(str, enum.Enum):
    ONSET_FROM_ZERO = "onset_from_zero"
    HOPF_COLLISION = "hopf_collision"
    EDGE_EMERGENCE = "edge_emergence"
    SECOND_COLLISION = "second_collision"


@dataclass(frozen=True)
class BifurcationEvent:
    kind: BifurcationKind
    rho_estimate: float
    bracket: tuple[float, float]


@dataclass
class BranchPath:
    """One folded eigenvalue branch over a contiguous rho range."""

    rho_values: list[float] = field(default_factory=list)
    lambda_values: list[complex] = field(default_factory=list)
    birth_event: BifurcationEvent | None = None
    death_event: BifurcationEvent | None = None

    def value_at(self, rho: float) -> complex | None:
        for r, l in zip(self.rho_values, self.lambda_values):
            if abs(r - rho) < 1e-12:
                return l
        return None


class SeedNotFoundError(ValueError):
    pass


class ScanFailure(RuntimeError):
    """Eigensolve failed mid-scan; completed slices ride along."""

    def __init__(self, rho: float, partial: list, cause: Exception):
        self.rho = rho
        self.partial = partial
        super().__init__(f"eigensolve failed at rho = {rho}: {cause}")


def _rho_nodes(rho_start: float, rho_end: float, step: float) -> np.ndarray:
    n = int(np.floor((rho_end - rho_start) / step + 1e-9)) + 1
    nodes = rho_start + step * np.arange(n)
    if nodes[-1] < rho_end - 1e-9 * max(1.0, abs(rho_end)):
        nodes = np.append(nodes, rho_end)
    return nodes


def _slice_task(args) -> SpectrumSlice:
    (half_length, n_points, scheme, rho, loc_thr, margin) = args
    grid = build_grid(half_length, n_points, scheme)
    op = assemble_coupled(grid, rho)
    lam, vec = eigen_decompose(op)
    return classify_spectrum(lam, vec, grid, rho, matrix=op.entries,
                             localization_threshold=loc_thr,
                             continuum_margin=margin)


def rho_scan(
    grid: Grid,
    rho_start: float,
    rho_end: float,
    step: float = DEFAULT_SCAN_STEP,
    *,
    localization_threshold: float = DEFAULT_LOCALIZATION_THRESHOLD,
    continuum_margin: float = DEFAULT_CONTINUUM_MARGIN,
    workers: int = 1,
) -> list[SpectrumSlice]:
    """One classified SpectrumSlice per rho node; deterministic given config.

    Slices at distinct rho are independent; `workers > 1` computes them in
    separate processes (results are returned in input order regardless).
    """
    if not (0 <= rho_start < rho_end):
        raise ValueError(f"need 0 <= rho_start < rho_end, got [{rho_start}, {rho_end}]")
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    nodes = _rho_nodes(rho_start, rho_end, step)
    tasks = [
        (grid.half_length, grid.n_points, grid.scheme.value, float(r),
         localization_threshold, continuum_margin)
        for r in nodes
    ]
    if workers <= 1:
        out = []
        for t in tasks:
            try:
                out.append(_slice_task(t))
            except Exception as exc:
                raise ScanFailure(t[3], out, exc) from exc
        return out
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_slice_task, tasks))


def _folded_localized(sl: SpectrumSlice, dedupe_tol: float = 1e-9) -> list[complex]:
    reps: list[complex] = []
    for lam in sl.localized():
        r = complex(quartet_representative(lam))
        if not any(abs(r - k) <= dedupe_tol * max(1.0, abs(r)) for k in reps):
            reps.append(r)
    return sorted(reps, key=lambda z: (-abs(z), z.imag))


def track_branch(
    slices: list[SpectrumSlice],
    seed: complex,
    seed_rho: float,
    continuation_jump_bound: float = DEFAULT_JUMP_BOUND,
) -> BranchPath:
    """Greedy nearest-eigenvalue continuation from a seed, in both directions.

    Matching happens in the folded (closed first quadrant) representation;
    the path terminates where no localized eigenvalue lies within the jump
    bound (including the branch merging into the continuum, where the
    localized label disappears).
    """
    rhos = [sl.rho for sl in slices]
    i0 = int(np.argmin([abs(r - seed_rho) for r in rhos]))
    if abs(rhos[i0] - seed_rho) > 1e-9 + 1e-9 * abs(seed_rho):
        raise SeedNotFoundError(f"no scan slice at rho = {seed_rho}")
    seed_rep = complex(quartet_representative(seed))
    cands = _folded_localized(slices[i0])
    if not cands:
        raise SeedNotFoundError(f"no localized eigenvalue at rho = {seed_rho}")
    d = [abs(c - seed_rep) for c in cands]
    j = int(np.argmin(d))
    if d[j] > continuation_jump_bound:
        raise SeedNotFoundError(
            f"seed {seed} not within {continuation_jump_bound} of a localized "
            f"eigenvalue at rho = {seed_rho}")
    start = cands[j]

    def extend(direction: int) -> tuple[list[float], list[complex]]:
        rs, ls = [], []
        cur = start
        i = i0 + direction
        while 0 <= i < len(slices):
            cands_i = _folded_localized(slices[i])
            if not cands_i:
                break
            dd = [abs(c - cur) for c in cands_i]
            jj = int(np.argmin(dd))
            if dd[jj] > _match_radius(continuation_jump_bound,
                                      abs(rhos[i] - rhos[i - direction]), cur):
                break
            cur = cands_i[jj]
            rs.append(rhos[i])
            ls.append(cur)
            i += direction
        return rs, ls

    back_r, back_l = extend(-1)
    fwd_r, fwd_l = extend(+1)
    return BranchPath(
        rho_values=back_r[::-1] + [rhos[i0]] + fwd_r,
        lambda_values=back_l[::-1] + [start] + fwd_l,
    )


def track_all_branches(
    slices: list[SpectrumSlice],
    continuation_jump_bound: float = DEFAULT_JUMP_BOUND,
) -> list[BranchPath]:
    """Track every folded localized eigenvalue through the scan.

    Active branches extend to their nearest candidate in the next slice
    (ambiguous near-collision pairs are resolved by minimizing the summed
    assignment distance); unclaimed candidates start new branches.  Two
    branches may land on the same candidate: that is a collision and both
    paths continue with the merged value.
    """
    branches: list[BranchPath] = []
    active: list[BranchPath] = []
    prev_rho: float | None = None
    for sl in slices:
        cands = _folded_localized(sl)
        drho = abs(sl.rho - prev_rho) if prev_rho is not None else DEFAULT_SCAN_STEP
        prev_rho = sl.rho
        dist = {}
        assigned: dict[int, int] = {}
        for bi, b in enumerate(active):
            cur = b.lambda_values[-1]
            radius = _match_radius(continuation_jump_bound, drho, cur)
            best, best_d = None, radius
            for ci, c in enumerate(cands):
                d = abs(c - cur)
                dist[bi, ci] = d
                if d <= best_d:
                    best, best_d = ci, d
            if best is not None:
                assigned[bi] = best
        # near-collision ambiguity: swap assignments pairwise when that
        # lowers the summed matching distance
        improved = True
        while improved:
            improved = False
            items = list(assigned.items())
            for i in range(len(items)):
                for j in range(i + 1, len(items)):
                    (b1, c1), (b2, c2) = items[i], items[j]
                    if c1 == c2:
                        continue
                    cur_sum = dist[b1, c1] + dist[b2, c2]
                    swap_sum = dist.get((b1, c2), np.inf) + dist.get((b2, c1), np.inf)
                    if swap_sum < cur_sum - 1e-15:
                        assigned[b1], assigned[b2] = c2, c1
                        items = list(assigned.items())
                        improved = True
        claimed = [False] * len(cands)
        next_active: list[BranchPath] = []
        for bi, b in enumerate(active):
            ci = assigned.get(bi)
            if ci is None:
                branches.append(b)  # branch dies here
                continue
            claimed[ci] = True
            b.rho_values.append(sl.rho)
            b.lambda_values.append(cands[ci])
            next_active.append(b)
        for ci, c in enumerate(cands):
            if not claimed[ci]:
                nb = BranchPath(rho_values=[sl.rho], lambda_values=[c])
                next_active.append(nb)
        active = next_active
    branches.extend(active)
    branches.sort(key=lambda b: (b.rho_values[0], -abs(b.lambda_values[0])))
    return branches


def _axis_kind(lam: complex) -> str | None:
    if abs(lam.imag) <= AXIS_TOL and lam.real > AXIS_TOL:
        return "real"
    if abs(lam.real) <= AXIS_TOL and lam.imag > AXIS_TOL:
        return "imag"
    return None


def detect_bifurcations(
    branches: list[BranchPath],
    *,
    scan_start: float | None = None,
    re_threshold: float = DEFAULT_RE_THRESHOLD,
) -> list[BifurcationEvent]:
    """Locate collisions and edge detachments on a family of tracked branches.

    A collision is bracketed between consecutive scan nodes where two distinct
    branches sitting on a common axis (both real or both imaginary) meet and
    continue as one genuinely complex value.  The first collision is reported
    as hopf_collision, later ones as second_collision.  A branch born on the
    real axis in the interior of the scan is an edge_emergence; a branch
    already present at the scan start with |lambda| within 10x re_threshold
    is an onset_from_zero.
    """
    if not branches:
        return []
    if scan_start is None:
        scan_start = min(b.rho_values[0] for b in branches)

    events: list[BifurcationEvent] = []

    # collisions: pairs of same-axis branches merging into one complex value
    collision_brackets: list[tuple[float, float]] = []
    for i, b1 in enumerate(branches):
        for b2 in branches[i + 1:]:
            common = sorted(set(b1.rho_values) & set(b2.rho_values))
            for ra, rb in zip(common, common[1:]):
                v1a, v2a = b1.value_at(ra), b2.value_at(ra)
                v1b, v2b = b1.value_at(rb), b2.value_at(rb)
                if None in (v1a, v2a, v1b, v2b):
                    continue
                k1, k2 = _axis_kind(v1a), _axis_kind(v2a)
                if k1 is None or k1 != k2:
                    continue
                if abs(v1a - v2a) <= AXIS_TOL:
                    continue
                merged = abs(v1b - v2b) <= AXIS_TOL
                complex_now = (v1b.real > AXIS_TOL and v1b.imag > AXIS_TOL)
                if merged and complex_now:
                    br = (ra, rb)
                    if not any(abs(br[0] - c[0]) < 1e-12 for c in collision_brackets):
                        collision_brackets.append(br)
    collision_brackets.sort()
    for idx, (ra, rb) in enumerate(collision_brackets):
        kind = BifurcationKind.HOPF_COLLISION if idx == 0 else BifurcationKind.SECOND_COLLISION
        events.append(BifurcationEvent(kind=kind, rho_estimate=0.5 * (ra + rb),
                                       bracket=(ra, rb)))

    first_rho = min(b.rho_values[0] for b in branches)
    for b in branches:
        born = b.rho_values[0]
        lam0 = b.lambda_values[0]
        if abs(born - first_rho) < 1e-12:
            if abs(lam0) <= 10.0 * re_threshold:
                ev = BifurcationEvent(kind=BifurcationKind.ONSET_FROM_ZERO,
                                      rho_estimate=born, bracket=(born, born))
                events.append(ev)
                b.birth_event = ev
            continue
        if _axis_kind(lam0) == "real":
            prev = max((r for br in branches for r in br.rho_values if r < born),
                       default=born)
            ev = BifurcationEvent(kind=BifurcationKind.EDGE_EMERGENCE,
                                  rho_estimate=0.5 * (prev + born),
                                  bracket=(prev, born))
            events.append(ev)
            b.birth_event = ev
    events.sort(key=lambda e: e.rho_estimate)
    return events
