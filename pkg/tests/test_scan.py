import numpy as np
import pytest

from linestab.eigensolver import LOCALIZED, SpectrumSlice
from linestab.scan import (
    BifurcationKind,
    SeedNotFoundError,
    detect_bifurcations,
    rho_scan,
    track_all_branches,
    track_branch,
)


def synthetic_slice(rho, lams):
    lams = np.asarray(lams, dtype=complex)
    return SpectrumSlice(
        rho=rho,
        eigenvalues=lams,
        residuals=np.zeros(len(lams)),
        localization=np.ones(len(lams)),
        labels=[LOCALIZED] * len(lams),
    )


class TestRhoScan:
    def test_degenerate_range_two_slices(self, small_grid):
        slices = rho_scan(small_grid, 1.0, 1.05, 0.05)
        assert len(slices) == 2
        assert slices[0].rho == pytest.approx(1.0)
        assert slices[1].rho == pytest.approx(1.05)

    def test_rejects_bad_range(self, small_grid):
        with pytest.raises(ValueError):
            rho_scan(small_grid, 0.5, 0.3, 0.01)
        with pytest.raises(ValueError):
            rho_scan(small_grid, 0.1, 0.5, -0.01)

    def test_pre_collision_real_leading(self, hopf_window_slices):
        for sl in hopf_window_slices[:4]:  # rho in [0.26, 0.29]
            lam = sl.unstable()
            assert lam.size >= 1
            assert abs(lam[0].imag) < 1e-6

    def test_post_collision_complex_pair(self, hopf_window_slices):
        for sl in hopf_window_slices[-4:]:  # rho in [0.37, 0.40]
            lam = sl.unstable()
            pair = lam[np.abs(lam.imag) > 1e-4]
            assert pair.size >= 2
            lead = pair[0]
            assert np.min(np.abs(pair - np.conj(lead))) < 1e-6


class TestTrackBranch:
    def test_constant_synthetic_slices(self):
        slices = [synthetic_slice(r, [0.3 + 0.1j, 1.0j]) for r in
                  (0.1, 0.11, 0.12, 0.13)]
        b = track_branch(slices, 0.3 + 0.1j, 0.11)
        assert len(b.rho_values) == 4
        assert all(abs(l - (0.3 + 0.1j)) < 1e-12 for l in b.lambda_values)

    def test_seed_not_found(self):
        slices = [synthetic_slice(0.1, [1.0j]), synthetic_slice(0.11, [1.0j])]
        with pytest.raises(SeedNotFoundError):
            track_branch(slices, 5.0 + 5.0j, 0.1)
        with pytest.raises(SeedNotFoundError):
            track_branch(slices, 1.0j, 0.5)  # no slice at that rho

    def test_real_branch_through_window(self, hopf_window_slices):
        seed = hopf_window_slices[4].unstable()[0]  # real branch at rho=0.30
        b = track_branch(hopf_window_slices, seed, 0.30)
        assert b.rho_values[0] == pytest.approx(0.26)
        assert b.rho_values[-1] == pytest.approx(0.40)

    def test_complex_branch_post_collision(self, hopf_window_slices):
        sl = hopf_window_slices[-1]
        lam = sl.unstable()
        seed = lam[np.abs(lam.imag) > 1e-4][0]
        b = track_branch(hopf_window_slices, seed, 0.40)
        # the quartet exists back to its birth and stays complex
        post = [l for r, l in zip(b.rho_values, b.lambda_values) if r >= 0.33]
        assert all(l.imag > 1e-4 for l in post)
        assert all(l.real > 1e-4 for l in post)

    def test_branch_continuity_bound(self, hopf_window_slices):
        branches = track_all_branches(hopf_window_slices)
        step = 0.01
        for b in branches:
            for l0, l1 in zip(b.lambda_values, b.lambda_values[1:]):
                assert abs(l1 - l0) <= 10.0 * step * max(1.0, abs(l0))


class TestDetectBifurcations:
    def test_empty_branches(self):
        assert detect_bifurcations([]) == []

    def test_hopf_in_window(self, hopf_window_slices):
        branches = track_all_branches(hopf_window_slices)
        events = detect_bifurcations(branches, scan_start=0.26)
        hopf = [e for e in events if e.kind is BifurcationKind.HOPF_COLLISION]
        assert len(hopf) == 1
        assert 0.29 <= hopf[0].rho_estimate <= 0.33
        lo, hi = hopf[0].bracket
        assert lo <= hopf[0].rho_estimate <= hi
        assert hi - lo <= 0.01 + 1e-12

    def test_event_reproducibility_on_coarser_step(self, hopf_window_slices):
        fine = detect_bifurcations(track_all_branches(hopf_window_slices),
                                   scan_start=0.26)
        coarse_slices = hopf_window_slices[::2]  # step 0.02
        coarse = detect_bifurcations(track_all_branches(coarse_slices),
                                     scan_start=0.26)
        f = [e for e in fine if e.kind is BifurcationKind.HOPF_COLLISION][0]
        c = [e for e in coarse if e.kind is BifurcationKind.HOPF_COLLISION][0]
        assert abs(f.rho_estimate - c.rho_estimate) < 0.02

    def test_quiet_window_has_no_events(self, small_grid):
        slices = rho_scan(small_grid, 2.5, 2.6, 0.05)
        events = detect_bifurcations(track_all_branches(slices), scan_start=2.5)
        assert events == []

    def test_synthetic_onset_from_zero(self):
        slices = [synthetic_slice(0.0, [1e-6 + 0j]),
                  synthetic_slice(0.01, [0.01 + 0j]),
                  synthetic_slice(0.02, [0.02 + 0j])]
        events = detect_bifurcations(track_all_branches(slices), scan_start=0.0)
        assert [e.kind for e in events] == [BifurcationKind.ONSET_FROM_ZERO]

    def test_synthetic_edge_emergence(self):
        slices = [synthetic_slice(1.0, [0.5 + 0j]),
                  synthetic_slice(1.05, [0.5 + 0j, 0.05 + 0j]),
                  synthetic_slice(1.10, [0.5 + 0j, 0.09 + 0j])]
        events = detect_bifurcations(track_all_branches(slices), scan_start=1.0)
        kinds = [e.kind for e in events]
        assert BifurcationKind.EDGE_EMERGENCE in kinds
        ev = events[kinds.index(BifurcationKind.EDGE_EMERGENCE)]
        assert 1.0 <= ev.rho_estimate <= 1.05

    def test_synthetic_second_collision_labeling(self):
        # two successive pair collisions: first is hopf, second is labeled
        # second_collision
        slices = [
            synthetic_slice(0.1, [0.4j, 0.5j, 0.2 + 0j, 0.3 + 0j]),
            synthetic_slice(0.11, [0.02 + 0.45j, 0.2 + 0j, 0.3 + 0j]),
            synthetic_slice(0.12, [0.03 + 0.45j, 0.25 + 0j, 0.26 + 0j]),
            synthetic_slice(0.13, [0.04 + 0.45j, 0.255 + 0.02j]),
        ]
        events = detect_bifurcations(track_all_branches(slices), scan_start=0.1)
        kinds = [e.kind for e in events]
        assert kinds == [BifurcationKind.HOPF_COLLISION,
                         BifurcationKind.SECOND_COLLISION]
