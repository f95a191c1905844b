import math

import numpy as np
import pytest

from linestab.operators import (
    Grid,
    Scheme,
    assemble_coupled,
    assemble_schrodinger,
    build_grid,
    second_derivative_matrix,
)
from linestab.semiclassical import E0, E1


class TestBuildGrid:
    def test_node_layout(self):
        g = build_grid(10.0, 16, Scheme.FD4)
        assert g.spacing == pytest.approx(1.25)
        assert np.allclose(g.nodes, -10.0 + 1.25 * np.arange(16))
        assert g.nodes[-1] == pytest.approx(10.0 - 1.25)  # periodic convention

    def test_spacing_fourier(self):
        g = build_grid(40.0, 1024, Scheme.FOURIER)
        assert g.spacing == pytest.approx(0.078125)

    @pytest.mark.parametrize("n", [4, 15, 17, 0])
    def test_rejects_odd_or_tiny_n(self, n):
        with pytest.raises(ValueError):
            build_grid(10.0, n)

    def test_rejects_nonpositive_length(self):
        with pytest.raises(ValueError):
            build_grid(0.0, 64)

    def test_fourier_d2_exact_on_grid_mode(self):
        # sin(pi x / 20) is an exact eigenfunction of the periodic Laplacian
        g = build_grid(20.0, 512, Scheme.FOURIER)
        d2 = second_derivative_matrix(g)
        u = np.sin(np.pi * g.nodes / 20.0)
        err = np.max(np.abs(d2 @ u + (np.pi / 20.0) ** 2 * u))
        assert err < 1e-10


class TestSchrodingerAssembly:
    def test_free_laplacian_spectrum(self):
        g = build_grid(20.0, 128, Scheme.FOURIER)
        w = np.linalg.eigvalsh(assemble_schrodinger(g, 0.0, 0.0).entries)
        assert w[0] > -1e-10
        expected = sorted((np.pi * m / 20.0) ** 2 for m in range(-64, 64))
        assert np.allclose(w, expected[:128], atol=1e-9)

    def test_lminus_zero_mode(self, std_grid):
        w, v = np.linalg.eigh(assemble_schrodinger(std_grid, 2.0, 1.0).entries)
        i = int(np.argmin(np.abs(w)))
        assert abs(w[i]) < 1e-8
        ref = std_grid.sech()
        ref /= np.linalg.norm(ref)
        assert abs(ref @ v[:, i]) > 1.0 - 1e-8

    def test_lplus_zero_mode(self, std_grid):
        w, v = np.linalg.eigh(assemble_schrodinger(std_grid, 6.0, 1.0).entries)
        i = int(np.argmin(np.abs(w)))
        assert abs(w[i]) < 1e-8
        ref = std_grid.sech() * np.tanh(std_grid.nodes)
        ref /= np.linalg.norm(ref)
        assert abs(ref @ v[:, i]) > 1.0 - 1e-8

    def test_l0_bound_states_closed_form(self, std_grid):
        w = np.linalg.eigvalsh(assemble_schrodinger(std_grid, 4.0, 0.0).entries)
        assert w[0] == pytest.approx(-E0, abs=1e-6)
        assert w[1] == pytest.approx(-E1, abs=1e-6)
        assert w[2] > 0  # only two bound states

    def test_matrices_symmetric(self, small_grid):
        for grid in (small_grid, build_grid(30.0, 256, Scheme.FD4)):
            m = assemble_schrodinger(grid, 4.0, 0.0).entries
            assert np.max(np.abs(m - m.T)) < 1e-12

    def test_potential_parity_commutes(self, small_grid):
        # parity permutation on [-L, L): x_j -> -x_j is j -> (N - j) mod N
        n = small_grid.n_points
        perm = (-np.arange(n)) % n
        m = assemble_schrodinger(small_grid, 6.0, 1.0).entries
        pm = m[np.ix_(perm, perm)]
        assert np.max(np.abs(pm - m)) < 1e-12 * np.max(np.abs(m))

    def test_bound_state_grid_convergence(self):
        vals = []
        for n in (512, 1024):
            g = build_grid(40.0, n, Scheme.FOURIER)
            w = np.linalg.eigvalsh(assemble_schrodinger(g, 4.0, 0.0).entries)
            vals.append(w[:2])
        assert np.max(np.abs(vals[0] - vals[1])) < 1e-8


class TestCoupledAssembly:
    def test_free_space_dispersion(self):
        g = build_grid(20.0, 128, Scheme.FOURIER)
        m = assemble_coupled(g, 2.0, well_depths=(0.0, 0.0)).entries
        lam = np.linalg.eigvals(m)
        assert np.max(np.abs(lam.real)) < 1e-9
        expect = {abs((np.pi * k / 20.0) ** 2 + 1.0 - 4.0) for k in range(0, 65)}
        got = np.abs(lam.imag)
        missing = [e for e in expect if np.min(np.abs(got - e)) > 1e-6]
        assert not missing

    def test_blocks_match_separate_assembly(self, small_grid):
        rho = 1.3
        m = assemble_coupled(small_grid, rho).entries
        n = small_grid.n_points
        lp = assemble_schrodinger(small_grid, 6.0, 1.0).entries - rho**2 * np.eye(n)
        lm = assemble_schrodinger(small_grid, 2.0, 1.0).entries - rho**2 * np.eye(n)
        assert np.array_equal(m[:n, n:], lm)
        assert np.array_equal(m[n:, :n], -lp)
        assert not m[:n, :n].any() and not m[n:, n:].any()

    def test_rho_zero_fourfold_kernel(self, std_grid):
        m = assemble_coupled(std_grid, 0.0).entries
        n = std_grid.n_points
        # exact kernel directions: (sech tanh, 0) and (0, sech)
        sech = std_grid.sech()
        v1 = np.concatenate([sech * np.tanh(std_grid.nodes), np.zeros(n)])
        v2 = np.concatenate([np.zeros(n), sech])
        for v in (v1, v2):
            assert np.linalg.norm(m @ v) < 1e-8 * np.linalg.norm(v)
        lam = np.linalg.eigvals(m)
        assert np.sum(np.abs(lam) < 1e-4) >= 4  # algebraic multiplicity >= 4

    def test_rejects_negative_rho(self, small_grid):
        with pytest.raises(ValueError):
            assemble_coupled(small_grid, -0.5)

    def test_spectral_symmetry(self, small_grid):
        lam = np.linalg.eigvals(assemble_coupled(small_grid, 0.7).entries)
        for target in (-lam, np.conj(lam)):
            d = np.abs(lam[:, None] - target[None, :]).min(axis=1)
            assert np.max(d) < 1e-6
