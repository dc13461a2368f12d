"""Populations, photon numbers, and field-correlation maps."""

import numpy as np
import pytest

from cavqed1d.chainmap import chain_map
from cavqed1d.errors import ConfigurationError
from cavqed1d.hamiltonians import FockTruncation, build_chain_dense
from cavqed1d.modes import SpatialGrid, analytic_modes_pec
from cavqed1d.mps import (
    TruncationPolicy,
    build_gates,
    correlation_matrix,
    product_state,
    tebd_step,
    to_dense,
)
from cavqed1d.observables import (
    CorrelationMatrix,
    FieldMap,
    excited_population,
    field_correlation,
    photon_numbers,
    wavefront_positions,
)

from conftest import make_couplings


def chain_setting(pec_basis, target=0.5, m=3):
    atom, coup = make_couplings(pec_basis, target)
    omega, g_D, _ = coup.coupled()
    ct = chain_map(omega[:m], g_D[:m])
    idx = np.nonzero(coup.coupled_mask)[0][:m]
    return atom, coup, ct, pec_basis.subset(idx)


def test_photon_numbers_vacuum(pec_basis):
    _, _, ct, _ = chain_setting(pec_basis)
    assert np.array_equal(photon_numbers(np.zeros((3, 3)), ct), np.zeros(3))


def test_photon_numbers_single_chain_boson(pec_basis):
    _, coup, ct, _ = chain_setting(pec_basis)
    b = np.zeros((3, 3))
    b[0, 0] = 1.0
    nk = photon_numbers(b, ct)
    omega, g_D, _ = coup.coupled()
    expect = g_D[:3] ** 2 / ct.rho**2
    assert np.allclose(nk, expect, atol=1e-14)
    assert np.sum(nk) == pytest.approx(1.0, abs=1e-12)


def test_field_correlation_vacuum(pec_basis):
    _, _, ct, sub = chain_setting(pec_basis)
    xs = np.linspace(-0.4, 0.4, 11) * np.pi
    g1 = field_correlation(np.zeros((3, 3)), ct, sub, xs)
    assert np.max(np.abs(g1)) == 0.0


def test_field_correlation_brute_force(pec_basis):
    rng = np.random.default_rng(2)
    _, _, ct, sub = chain_setting(pec_basis, m=2)
    raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = raw @ raw.conj().T  # Hermitian PSD
    xs = np.linspace(-0.45, 0.45, 7) * np.pi
    got = field_correlation(CorrelationMatrix(b, 0.0), ct, sub, xs)
    L = sub.grid.length
    for i, x in enumerate(xs):
        acc = 0.0
        for k in range(2):
            for kp in range(2):
                for n in range(2):
                    for npr in range(2):
                        acc += (
                            np.sqrt(sub.frequencies[k] * sub.frequencies[kp])
                            * sub.evaluate(k, x)
                            * sub.evaluate(kp, x)
                            * ct.U[n, k]
                            * ct.U[npr, kp]
                            * b[n, npr]
                        )
        assert got[i] == pytest.approx(acc.real / (2.0 * L), abs=1e-12)


def test_field_correlation_nonnegative_from_states(pec_basis):
    atom, coup, ct, sub = chain_setting(pec_basis)
    gs = build_gates(atom, ct, 2 * np.pi / 200.0, 4)
    st = product_state("e", ct.M_c, 4)
    policy = TruncationPolicy(max_bond=16)
    xs = np.linspace(-0.5, 0.5, 41) * np.pi
    for _ in range(60):
        st, _ = tebd_step(st, gs, policy)
    g1 = field_correlation(correlation_matrix(st), ct, sub, xs)
    assert np.min(g1) > -1e-12


def test_field_correlation_position_check(pec_basis):
    _, _, ct, sub = chain_setting(pec_basis)
    with pytest.raises(ConfigurationError):
        field_correlation(np.zeros((3, 3)), ct, sub, [np.pi])


def test_field_correlation_basis_mismatch(pec_basis):
    _, _, ct, _ = chain_setting(pec_basis, m=3)
    with pytest.raises(ConfigurationError):
        field_correlation(np.zeros((3, 3)), ct, pec_basis, [0.0])


def test_excited_population_product_states():
    assert excited_population(product_state("e", 2, 3)) == pytest.approx(1.0)
    assert excited_population(product_state("g", 2, 3)) == pytest.approx(0.0)


def test_photon_numbers_match_dense_oracle(pec_basis):
    # evolve a small chain, compare Eq.-(33)-style numbers against a dense
    # mode-basis expectation computed from the contracted state vector
    atom, coup, ct, sub = chain_setting(pec_basis, target=0.4, m=2)
    N = 4
    gs = build_gates(atom, ct, 2 * np.pi / 300.0, N)
    st = product_state("e", ct.M_c, N)
    policy = TruncationPolicy(max_bond=32, svd_cutoff=0.0)
    for _ in range(90):
        st, _ = tebd_step(st, gs, policy)
    nk = photon_numbers(correlation_matrix(st), ct)

    vec = to_dense(st)
    b = np.diag(np.sqrt(np.arange(1, float(N))), 1)
    num = b.T @ b

    def chain_num(j):
        mats = [np.eye(2)] + [np.eye(N)] * ct.M_c
        mats[j + 1] = num
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        return out

    # mode-basis numbers from the chain-basis dense state via U
    bmat = np.zeros((ct.M_c, ct.M_c), dtype=complex)
    bop = [None] * ct.M_c
    for j in range(ct.M_c):
        mats = [np.eye(2)] + [np.eye(N)] * ct.M_c
        mats[j + 1] = b
        out = mats[0]
        for m in mats[1:]:
            out = np.kron(out, m)
        bop[j] = out
    for mth in range(ct.M_c):
        for nth in range(ct.M_c):
            bmat[mth, nth] = vec.conj() @ bop[mth].conj().T @ bop[nth] @ vec
    expect = np.real(np.einsum("nk,nm,mk->k", ct.U, bmat, ct.U))
    assert np.max(np.abs(nk - expect)) < 1e-10


def test_wavefront_tracker():
    xs = np.linspace(0.0, 1.0, 101)
    times = np.arange(5)
    vals = np.zeros((5, 101))
    for i, t in enumerate(times):
        vals[i, 10 + 5 * i] = 1.0
    fm = FieldMap(times, xs, vals)
    fronts = wavefront_positions(fm, x_min=0.0)
    assert np.allclose(np.diff(fronts), 0.05)
