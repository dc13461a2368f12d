"""Dense Hamiltonians on truncated atom (x) Fock spaces.

Six variants are built for the gauge-invariance study: the two full
(untruncated-atom) Hamiltonians in the Coulomb and dipole gauges, the
two directly truncated Rabi Hamiltonians (gauge breaking), and the two
properly truncated ones (gauge preserving), plus the chain form used by
the time evolution.

Basis ordering is atom-major: |atom> (x) |mode 1> (x) ... (x) |mode M>
with the Fock index of the last mode fastest. Mode slots are filled with
the coupled modes of the supplied coefficients (first trunc.M of them);
if no mode couples at all, the first trunc.M modes are used unchanged.

Every builder accepts real_form=True, which conjugates by strictly local
phase unitaries (|e> -> i|e> on the atom and/or a_k -> i a_k per mode,
chosen per variant) so the matrix comes out real symmetric with exactly
the same spectrum; that roughly quarters the diagonalization cost, which
matters for the photon-cutoff convergence sweeps.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .atom import position_matrix
from .errors import CapacityError, ConfigurationError, NumericError

DEFAULT_MAX_DIM = 1 << 15

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]])
SIGMA_Y = np.array([[0.0, 1.0j], [-1.0j, 0.0]])  # i(sigma_- - sigma_+), basis [g, e]
SIGMA_Z = np.array([[-1.0, 0.0], [0.0, 1.0]])
SIGMA_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]])  # |e><g|


@dataclass
class FockTruncation:
    """M modes with N Fock states (0..N-1) each."""

    M: int
    N: int

    def __post_init__(self):
        if self.M < 1 or self.N < 2:
            raise ConfigurationError("need M >= 1 modes and N >= 2 photon states")

    @property
    def boson_dim(self):
        return self.N**self.M


@dataclass
class DenseHamiltonian:
    matrix: np.ndarray
    variant: str
    labels: dict

    @property
    def dim(self):
        return self.matrix.shape[0]


def annihilation(N):
    return np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)


def kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def mode_operator(op, k, M, N):
    """op acting on mode slot k (0-based), identity on the others."""
    mats = [np.eye(N)] * M
    mats[k] = op
    return kron_all(mats)


def _select_modes(couplings, M):
    """First M coupled modes, or the first M modes if nothing couples."""
    if np.any(couplings.coupled_mask):
        omega, g_D, g_C = couplings.coupled()
    else:
        omega, g_D, g_C = couplings.omega, couplings.g_D, couplings.g_C
    if len(omega) < M:
        raise ConfigurationError(f"need {M} coupled modes, only {len(omega)} available")
    return omega[:M], g_D[:M], g_C[:M]


def _guard(dim, max_dim):
    limit = DEFAULT_MAX_DIM if max_dim is None else max_dim
    if dim > limit:
        raise CapacityError(
            f"matrix dimension {dim} exceeds the guard {limit}; lower M or N "
            "or raise max_dim"
        )


def _sum_xq(amps, trunc):
    """sum_k amps[k] (a_k + a_k^dag): real symmetric."""
    a = annihilation(trunc.N)
    return sum(
        amps[k] * mode_operator(a + a.T, k, trunc.M, trunc.N) for k in range(trunc.M)
    )


def _sum_pq(amps, trunc):
    """sum_k amps[k] (a_k - a_k^dag): real antisymmetric."""
    a = annihilation(trunc.N)
    return sum(
        amps[k] * mode_operator(a - a.T, k, trunc.M, trunc.N) for k in range(trunc.M)
    )


def _free_field(omega, trunc):
    a = annihilation(trunc.N)
    num = a.T @ a
    out = np.zeros((trunc.boson_dim, trunc.boson_dim))
    for k in range(trunc.M):
        out += omega[k] * mode_operator(num, k, trunc.M, trunc.N)
    return out


def _labels(omega, trunc, real_form, extra=None):
    lab = {
        "ordering": "atom (x) mode1..modeM, last mode fastest",
        "omega": np.asarray(omega, float).copy(),
        "omega_ref": float(omega[0]),
        "M": trunc.M,
        "N": trunc.N,
        "real_form": bool(real_form),
    }
    if extra:
        lab.update(extra)
    return lab


def build_rabi_dipole_proper(
    atom, couplings, trunc, drop_self_energy=False, real_form=False, max_dim=None
):
    """Properly truncated dipole-gauge Rabi Hamiltonian.

    H = (w_a/2) sz + sum_k [w_k n_k - i g_k sx (a_k - a_k^dag) + (g_k^2/w_k) I],
    with the identity shift optional. real_form rotates each mode phase,
    turning the coupling into +g_k sx (a_k + a_k^dag).
    """
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    bdim = trunc.boson_dim
    _guard(2 * bdim, max_dim)
    if real_form:
        coup = np.kron(SIGMA_X, _sum_xq(g_D, trunc))
    else:
        coup = np.kron(SIGMA_X, -1.0j * _sum_pq(g_D, trunc))
    h = coup.astype(float if real_form else complex)
    h += 0.5 * atom.omega_a * np.kron(SIGMA_Z, np.eye(bdim))
    h += np.kron(np.eye(2), _free_field(omega, trunc))
    if not drop_self_energy:
        h += np.sum(g_D**2 / omega) * np.eye(2 * bdim)
    return DenseHamiltonian(h, "rabi_D_proper", _labels(omega, trunc, real_form))


def _cos_sin(xt):
    vals, vecs = scipy.linalg.eigh(xt)
    cosx = (vecs * np.cos(vals)) @ vecs.T
    sinx = (vecs * np.sin(vals)) @ vecs.T
    return cosx, sinx


def build_rabi_coulomb_proper(atom, couplings, trunc, real_form=False, max_dim=None):
    """Properly truncated Coulomb-gauge Rabi Hamiltonian (cos/sin form).

    H = sum_k w_k n_k + (w_a/2) {sz cos Xt + sy sin Xt} with
    Xt = sum_k (2 g_k / w_k)(a_k + a_k^dag); the operator cosine and sine
    come from an eigendecomposition of Xt. real_form rotates the atom
    phase, mapping sy -> sx.
    """
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    bdim = trunc.boson_dim
    _guard(2 * bdim, max_dim)
    xt = _sum_xq(2.0 * g_D / omega, trunc)
    cosx, sinx = _cos_sin(xt)
    sy = SIGMA_X if real_form else SIGMA_Y
    h = np.kron(np.eye(2), _free_field(omega, trunc)).astype(
        float if real_form else complex
    )
    h += 0.5 * atom.omega_a * (np.kron(SIGMA_Z, cosx) + np.kron(sy, sinx))
    return DenseHamiltonian(h, "rabi_C_proper", _labels(omega, trunc, real_form))


def build_rabi_coulomb_proper_conjugated(atom, couplings, trunc, max_dim=None):
    """Same physics via explicit conjugation W (w_a/2 sz) W^dag + H_F.

    W = exp(i sx (x) Xt / 2) is the truncated minimal-coupling unitary;
    this independent construction validates the cos/sin assembly.
    """
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    bdim = trunc.boson_dim
    _guard(2 * bdim, max_dim)
    xt = _sum_xq(2.0 * g_D / omega, trunc)
    arg = 0.5 * np.kron(SIGMA_X, xt)
    vals, vecs = scipy.linalg.eigh(arg)
    w = (vecs * np.exp(1.0j * vals)) @ vecs.conj().T
    bare = 0.5 * atom.omega_a * np.kron(SIGMA_Z, np.eye(bdim))
    h = w @ bare @ w.conj().T + np.kron(np.eye(2), _free_field(omega, trunc))
    return DenseHamiltonian(h, "rabi_C_proper_conjugated", _labels(omega, trunc, False))


def diamagnetic_collective_mode(couplings, trunc):
    """X_C = sum_k g_C,k (a_k + a_k^dag); the diamagnetic term is X_C^2 / w_a."""
    omega, _, g_C = _select_modes(couplings, trunc.M)
    return _sum_xq(g_C, trunc)


def build_rabi_coulomb_direct(atom, couplings, trunc, real_form=False, max_dim=None):
    """Directly truncated Coulomb-gauge Rabi Hamiltonian (gauge breaking).

    H = (w_a/2) sz + sum_k [w_k n_k + g_C,k sy (a_k + a_k^dag)]
        + (1/w_a) [sum_k g_C,k (a_k + a_k^dag)]^2.
    """
    omega, _, g_C = _select_modes(couplings, trunc.M)
    bdim = trunc.boson_dim
    _guard(2 * bdim, max_dim)
    xc = _sum_xq(g_C, trunc)
    sy = SIGMA_X if real_form else SIGMA_Y
    h = np.kron(sy, xc).astype(float if real_form else complex)
    h += 0.5 * atom.omega_a * np.kron(SIGMA_Z, np.eye(bdim))
    h += np.kron(np.eye(2), _free_field(omega, trunc))
    h += np.kron(np.eye(2), (xc @ xc) / atom.omega_a)
    return DenseHamiltonian(h, "rabi_C_direct", _labels(omega, trunc, real_form))


def build_rabi_dipole_direct(spec, basis, couplings, trunc, real_form=False, max_dim=None):
    """Directly truncated dipole-gauge Rabi Hamiltonian.

    The dipole self-energy P (d A_k)^2 P cannot be written with Pauli
    operators: it is assembled from the position matrix over all retained
    atom levels, squared, and then projected onto the lowest doublet.
    """
    n_levels = len(spec.energies)
    if n_levels < 10:
        raise ConfigurationError("dipole-gauge direct truncation needs >= 10 levels")
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    bdim = trunc.boson_dim
    _guard(2 * bdim, max_dim)
    omega_a = spec.energies[1] - spec.energies[0]

    x_mat = position_matrix(spec)
    x01 = x_mat[0, 1]
    if abs(x01) < 1e-12:
        raise ConfigurationError("atom has no dipole-allowed 0-1 transition")
    proj_xsq = (x_mat @ x_mat)[:2, :2] / x01**2

    if real_form:
        coup = np.kron(SIGMA_X, _sum_xq(g_D, trunc))
    else:
        coup = np.kron(SIGMA_X, -1.0j * _sum_pq(g_D, trunc))
    h = coup.astype(float if real_form else complex)
    h += 0.5 * omega_a * np.kron(SIGMA_Z, np.eye(bdim))
    h += np.kron(np.eye(2), _free_field(omega, trunc))
    h += np.sum(g_D**2 / omega) * np.kron(proj_xsq, np.eye(bdim))
    return DenseHamiltonian(
        h,
        "rabi_D_direct",
        _labels(omega, trunc, real_form, {"n_atom_levels": n_levels}),
    )


def _full_atom_data(spec, couplings, trunc, n_atom_levels):
    if n_atom_levels < 2:
        raise ConfigurationError("full Hamiltonians need at least two atom levels")
    if n_atom_levels > len(spec.energies):
        raise ConfigurationError("spectrum retains fewer levels than requested")
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    e = spec.energies[:n_atom_levels] - spec.energies[0]
    x_full = position_matrix(spec)[:n_atom_levels, :n_atom_levels]
    x01 = x_full[0, 1]
    if abs(x01) < 1e-12:
        raise ConfigurationError("atom has no dipole-allowed 0-1 transition")
    return omega, g_D, e, x_full, x01


def build_full_coulomb(
    spec, basis, couplings, trunc, n_atom_levels, real_form=False, max_dim=None
):
    """Untruncated-atom Coulomb-gauge Hamiltonian (p.A and A^2 terms).

    Momentum matrix elements come from p_mn = (m/i)(E_n - E_m) x_mn and
    the inverse mass in the A^2 coefficient from the position-operator
    sum rule 1/(2m) = sum_l (E_l - E_0) x_0l^2, both evaluated on the
    retained levels; charge enters only through the calibrated couplings,
    as q A(r0) = sum_k [g_k / (w_k x_01)] (a_k + a_k^dag).
    """
    omega, g_D, e, x_full, x01 = _full_atom_data(spec, couplings, trunc, n_atom_levels)
    dim = n_atom_levels * trunc.boson_dim
    _guard(dim, max_dim)

    amp = g_D / (omega * x01)
    p_tilde = (e[None, :] - e[:, None]) * x_full  # real antisymmetric
    inv_2m = float(np.sum(e * x_full[0] ** 2))

    if real_form:
        g_op = _sum_pq(amp, trunc)  # rotated image of q A(r0) is i * g_op
        h = -np.kron(p_tilde, g_op)
        h += inv_2m * np.kron(np.eye(n_atom_levels), -(g_op @ g_op))
    else:
        f_op = _sum_xq(amp, trunc)
        h = 1.0j * np.kron(p_tilde, f_op)
        h += inv_2m * np.kron(np.eye(n_atom_levels), f_op @ f_op)
    h += np.kron(np.diag(e), np.eye(trunc.boson_dim))
    h += np.kron(np.eye(n_atom_levels), _free_field(omega, trunc))
    return DenseHamiltonian(
        h, "full_C", _labels(omega, trunc, real_form, {"n_atom_levels": n_atom_levels})
    )


def build_full_dipole(
    spec, basis, couplings, trunc, n_atom_levels, real_form=False, max_dim=None
):
    """Untruncated-atom dipole-gauge Hamiltonian (d.E and self-energy terms).

    The interaction is -d . E(r0) with per-mode field amplitude
    e_k = g_k / x_01 and the multilevel self-energy
    sum_k (e_k^2 / w_k) x^2 (x) I built from the full position matrix.
    """
    omega, g_D, e, x_full, x01 = _full_atom_data(spec, couplings, trunc, n_atom_levels)
    dim = n_atom_levels * trunc.boson_dim
    _guard(dim, max_dim)

    e_amp = g_D / x01
    if real_form:
        h = np.kron(x_full, _sum_xq(e_amp, trunc))
    else:
        h = np.kron(x_full, -1.0j * _sum_pq(e_amp, trunc))
        h = h.astype(complex)
    h += np.kron(np.diag(e), np.eye(trunc.boson_dim))
    h += np.kron(np.eye(n_atom_levels), _free_field(omega, trunc))
    h += float(np.sum(e_amp**2 / omega)) * np.kron(
        x_full @ x_full, np.eye(trunc.boson_dim)
    )
    return DenseHamiltonian(
        h, "full_D", _labels(omega, trunc, real_form, {"n_atom_levels": n_atom_levels})
    )


def build_chain_dense(atom, chain, trunc, real_form=False, max_dim=None):
    """Dense chain Hamiltonian (atom + M_c oscillators, hoppings t_n)."""
    if chain.M_c > trunc.M:
        raise ConfigurationError("chain longer than the mode truncation")
    mc, n = chain.M_c, trunc.N
    bdim = n**mc
    _guard(2 * bdim, max_dim)
    a = annihilation(n)
    num = a.T @ a
    hf = np.zeros((bdim, bdim))
    for j in range(mc):
        hf += chain.xi[j] * mode_operator(num, j, mc, n)
    for j in range(mc - 1):
        hop = mode_operator(a.T, j, mc, n) @ mode_operator(a, j + 1, mc, n)
        hf += chain.t[j] * (hop + hop.T)
    if real_form:
        coup = chain.rho * np.kron(SIGMA_X, mode_operator(a + a.T, 0, mc, n))
    else:
        coup = chain.rho * np.kron(SIGMA_X, -1.0j * mode_operator(a - a.T, 0, mc, n))
    h = coup.astype(float if real_form else complex)
    h += 0.5 * atom.omega_a * np.kron(SIGMA_Z, np.eye(bdim))
    h += np.kron(np.eye(2), hf)
    lab = {
        "ordering": "atom (x) chain site 1..M_c, last site fastest",
        "omega": chain.xi.copy(),
        "omega_ref": float(chain.xi[0]),
        "M": mc,
        "N": n,
        "real_form": bool(real_form),
    }
    return DenseHamiltonian(h, "chain", lab)


def eigenvalues(H, n_levels=None):
    """Ascending eigenvalues; sparse Lanczos for big sparse-friendly matrices."""
    mat = H.matrix if isinstance(H, DenseHamiltonian) else H
    dim = mat.shape[0]
    if n_levels is None:
        n_levels = dim
    if n_levels > dim:
        raise ConfigurationError("requested more levels than the dimension")
    density = np.count_nonzero(mat) / mat.size
    if dim > 2500 and n_levels <= 24 and density < 0.05:
        try:
            sp = scipy.sparse.csr_matrix(mat)
            # fixed generic start vector keeps repeated runs byte-identical
            v0 = np.random.default_rng(42).standard_normal(dim)
            vals = scipy.sparse.linalg.eigsh(
                sp, k=n_levels, which="SA", return_eigenvectors=False, tol=1e-12, v0=v0
            )
            return np.sort(vals)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise NumericError(f"Lanczos eigensolver failed: {exc}") from exc
    if n_levels < dim:
        return scipy.linalg.eigh(
            mat, eigvals_only=True, subset_by_index=(0, n_levels - 1)
        )
    return scipy.linalg.eigvalsh(mat)


def spectrum_gaps(H, n_levels):
    """(E_i - E_0) / w_ref for the lowest n_levels, w_ref the first mode."""
    vals = eigenvalues(H, n_levels)
    omega_ref = H.labels["omega_ref"] if isinstance(H, DenseHamiltonian) else 1.0
    return (vals - vals[0]) / omega_ref


def converge_photon_cutoff(build, n_gaps=8, tol=1e-6, start=6, step=2, max_cutoff=12):
    """Raise N until the lowest n_gaps move < tol relative; return (N, gaps).

    build(N) must return a DenseHamiltonian at photon cutoff N.
    """
    prev = None
    n = start
    while True:
        gaps = spectrum_gaps(build(n), n_gaps + 1)[1:]
        if prev is not None:
            denom = np.maximum(np.abs(prev), 1e-30)
            if np.max(np.abs(gaps - prev) / denom) < tol:
                return n, gaps
        if n >= max_cutoff:
            return n, gaps
        prev = gaps
        n += step


def trk_selfenergy_check(atom, couplings, trunc):
    """Sum-rule check of the dipole self-energy coefficient, per mode.

    Evaluates sum_{n_k} |<n_k| P d P . E_k(r0) |0_k>|^2 / (w_k n_k) in the
    truncated Fock space (an operator on the two-level atom) and returns
    it next to (g_k^2 / w_k) sigma_x^2. Only n_k = 1 contributes, so the
    two agree identically.
    """
    omega, g_D, _ = _select_modes(couplings, trunc.M)
    a = annihilation(trunc.N)
    quad = a - a.T  # (a - a^dag) matrix elements
    pairs = []
    for k in range(trunc.M):
        lhs = np.zeros((2, 2), dtype=complex)
        for n in range(1, trunc.N):
            elem = 1.0j * g_D[k] * quad[n, 0] * SIGMA_X  # <n| PdP.E_k |0>
            lhs += (elem.conj().T @ elem) / (omega[k] * n)
        rhs = (g_D[k] ** 2 / omega[k]) * (SIGMA_X @ SIGMA_X)
        pairs.append((lhs, rhs))
    return pairs


def minkowski_spectrum(atom_levels, omega, N, count):
    """Lowest eigenvalues of a fully decoupled atom + photon-ladder system."""
    total = np.sort(np.asarray(atom_levels, dtype=float))
    for w in omega:
        ladder = w * np.arange(N)
        total = (total[:, None] + ladder[None, :]).ravel()
        total.sort()
        total = total[: max(count * 4, 64)]
    return total[:count]


VARIANTS = (
    "full_C",
    "full_D",
    "rabi_C_direct",
    "rabi_D_direct",
    "rabi_C_proper",
    "rabi_D_proper",
)
