"""Mode bases: analytic periodic/PEC, numerical eigenproblem, couplings."""

import numpy as np
import pytest

from cavqed1d.atom import TwoLevelAtom
from cavqed1d.errors import ConfigurationError
from cavqed1d.modes import (
    SpatialGrid,
    analytic_modes_pec,
    analytic_modes_periodic,
    assemble_eigenproblem,
    calibrate_dipole,
    coupling_coefficients,
    load_permittivity_profile,
    numerical_modes,
    slab_profile,
    solve_modes,
    uniform_profile,
)

OMEGA_A = 1.0
PEC_L = np.pi
PBC_L = 2.0 * np.pi


def pbc_grid(n=400):
    return SpatialGrid(PBC_L, n, periodic=True)


def pec_grid(n=401):
    return SpatialGrid(PEC_L, n)


def gram_defect(basis):
    dx = basis.grid.spacing
    funcs = basis.eigenfunctions
    gram = (funcs * basis.weights) @ funcs.T * dx / basis.grid.length
    return np.max(np.abs(gram - np.eye(len(basis))))


def test_periodic_frequency_pairs():
    basis = analytic_modes_periodic(3, OMEGA_A, pbc_grid())
    assert np.allclose(basis.frequencies, [1, 1, 2, 2, 3, 3])


def test_periodic_values_at_origin():
    basis = analytic_modes_periodic(2, OMEGA_A, pbc_grid())
    assert basis.evaluate(0, 0.0) == pytest.approx(np.sqrt(2.0), abs=1e-9)
    assert basis.evaluate(1, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_periodic_normalization():
    assert gram_defect(analytic_modes_periodic(4, OMEGA_A, pbc_grid())) < 1e-8


def test_periodic_wrong_length_rejected():
    with pytest.raises(ConfigurationError):
        analytic_modes_periodic(2, OMEGA_A, SpatialGrid(1.5 * PBC_L, 100, periodic=True))


def test_pec_frequencies():
    basis = analytic_modes_pec(5, OMEGA_A, pec_grid())
    assert np.allclose(basis.frequencies, [1, 2, 3, 4, 5])


def test_pec_center_values():
    basis = analytic_modes_pec(2, OMEGA_A, pec_grid())
    assert basis.evaluate(0, 0.0) == pytest.approx(np.sqrt(2.0), abs=1e-9)
    assert basis.evaluate(1, 0.0) == pytest.approx(0.0, abs=1e-9)


def test_pec_endpoint_nodes_and_normalization():
    basis = analytic_modes_pec(4, OMEGA_A, pec_grid())
    assert np.max(np.abs(basis.eigenfunctions[:, 0])) == 0.0
    assert np.max(np.abs(basis.eigenfunctions[:, -1])) == 0.0
    assert gram_defect(basis) < 1e-8


def test_stiffness_stencil_and_mass_identity():
    grid = pec_grid(101)
    K, M = assemble_eigenproblem(uniform_profile(grid), grid, "pec")
    dx2 = grid.spacing**2
    n = grid.n_points - 2
    assert np.allclose(np.diag(K), 2.0 / dx2)
    assert np.allclose(np.diag(K, 1), -1.0 / dx2)
    assert np.allclose(M, np.eye(n))
    assert np.array_equal(K, K.T)


def test_slab_mass_entries():
    grid = pec_grid(801)
    profile = slab_profile(grid, -0.25 * PEC_L, PEC_L / 8.0, 4.0)
    _, M = assemble_eigenproblem(profile, grid, "pec")
    diag = np.diag(M)
    x = grid.points[1:-1]
    inside = np.abs(x + 0.25 * PEC_L) <= PEC_L / 16.0
    assert np.all(diag[inside] == 4.0)
    assert np.all(diag[~inside] == 1.0)


def test_numerical_homogeneous_pec_frequencies():
    grid = pec_grid(1001)
    basis = numerical_modes(uniform_profile(grid), grid, "pec", 5)
    exact = OMEGA_A * np.arange(1, 6)
    assert np.max(np.abs(basis.frequencies - exact) / exact) < 1e-3


def test_numerical_eigen_residual():
    grid = pec_grid(301)
    K, M = assemble_eigenproblem(uniform_profile(grid), grid, "pec")
    basis = solve_modes(K, M, 4, grid, "pec")
    for k in range(4):
        phi = basis.eigenfunctions[k][1:-1]
        resid = K @ phi - basis.frequencies[k] ** 2 * (M @ phi)
        assert np.linalg.norm(resid) <= 1e-8 * np.linalg.norm(K @ phi)


def test_slab_lowers_fundamental_and_orthonormal():
    grid = pec_grid(1001)
    hom = numerical_modes(uniform_profile(grid), grid, "pec", 5)
    slab = numerical_modes(
        slab_profile(grid, -0.25 * PEC_L, PEC_L / 8.0, 4.0), grid, "pec", 5
    )
    assert slab.frequencies[0] < hom.frequencies[0]
    assert gram_defect(slab) < 1e-8


def test_grid_convergence_second_order():
    exact = OMEGA_A * np.arange(1, 4)

    def err(n):
        grid = pec_grid(n)
        basis = numerical_modes(uniform_profile(grid), grid, "pec", 3)
        return np.max(np.abs(basis.frequencies - exact))

    assert err(201) / err(401) >= 3.0


def test_couplings_center_parity():
    basis = analytic_modes_pec(6, OMEGA_A, pec_grid())
    atom = TwoLevelAtom(OMEGA_A, 0.7, 0.0)
    c = coupling_coefficients(basis, atom)
    assert np.all(np.abs(c.g_D[1::2]) < 1e-12)  # even-k modes uncoupled
    assert np.all(np.abs(c.g_D[0::2]) > 0)


def test_gauge_coupling_relation():
    basis = analytic_modes_pec(6, OMEGA_A, pec_grid())
    c = coupling_coefficients(basis, TwoLevelAtom(OMEGA_A, 0.7, 0.1))
    assert np.max(np.abs(c.g_C * c.omega - c.g_D * OMEGA_A)) <= 1e-12 * np.max(
        np.abs(c.g_D)
    )


def test_calibrate_dipole_hits_target():
    basis = analytic_modes_pec(6, OMEGA_A, pec_grid())
    atom = calibrate_dipole(basis, TwoLevelAtom(OMEGA_A, 1.0, 0.0), 0.6)
    c = coupling_coefficients(basis, atom)
    k0 = np.nonzero(c.coupled_mask)[0][0]
    assert c.g_D[k0] / c.omega[k0] == pytest.approx(0.6, abs=1e-12)


def test_calibrate_zero_and_linearity():
    basis = analytic_modes_pec(4, OMEGA_A, pec_grid())
    base = TwoLevelAtom(OMEGA_A, 1.0, 0.0)
    assert calibrate_dipole(basis, base, 0.0).dipole == 0.0
    c1 = coupling_coefficients(basis, calibrate_dipole(basis, base, 0.3))
    c2 = coupling_coefficients(basis, calibrate_dipole(basis, base, 0.6))
    assert np.allclose(2.0 * c1.g_D, c2.g_D, atol=1e-14)


def test_calibrate_uncoupled_position_fails():
    basis = analytic_modes_pec(1, OMEGA_A, pec_grid())
    # node of the fundamental: the cavity edge
    atom = TwoLevelAtom(OMEGA_A, 1.0, -0.5 * PEC_L)
    with pytest.raises(ConfigurationError):
        calibrate_dipole(basis, atom, 0.6)


def test_position_outside_domain_rejected():
    basis = analytic_modes_pec(2, OMEGA_A, pec_grid())
    with pytest.raises(ConfigurationError):
        coupling_coefficients(basis, TwoLevelAtom(OMEGA_A, 1.0, PEC_L))


def test_permittivity_file_loading(tmp_path):
    grid = pec_grid(101)
    path = tmp_path / "slab.txt"
    xs = np.linspace(-PEC_L / 2, PEC_L / 2, 40)
    eps = np.where(np.abs(xs + PEC_L / 4) <= PEC_L / 16, 4.0, 1.0)
    np.savetxt(path, np.column_stack([xs, eps]))
    profile = load_permittivity_profile(path, grid)
    assert profile.eps_r.min() >= 1.0
    assert profile.eps_r.max() == pytest.approx(4.0)
