"""Matrix product state representation and TEBD time evolution.

The chain-basis state |atom, b_1, ..., b_Mc> is stored as one order-3
tensor per site with index order (left bond, physical, right bond); the
atom sits at site 0 with physical dimension 2 (basis [g, e]), chain
oscillators follow with physical dimension N.

Time stepping is first-order Trotter: the chain Hamiltonian is split
into odd- and even-bond parts (bond j joins sites j and j+1), the
odd-bond gates act first, and every two-site gate application is
followed by an SVD truncation controlled by a TruncationPolicy. On-site
terms are absorbed into the bond gate to the left of the site (site 0's
term joins bond 0), so each appears exactly once per step.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import CapacityError, ConfigurationError

ATOM_DIM = 2
EXCITED = np.array([[0.0, 0.0], [0.0, 1.0]])  # sigma_+ sigma_- in basis [g, e]


@dataclass
class TruncationPolicy:
    max_bond: int = 32
    svd_cutoff: float = 1e-10
    use_randomized_svd: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.max_bond < 1:
            raise ConfigurationError("max_bond must be >= 1")
        if not (0.0 <= self.svd_cutoff < 1.0):
            raise ConfigurationError("svd_cutoff must lie in [0, 1)")
        self._rng = np.random.default_rng(self.seed)


@dataclass
class GateSet:
    """Two-site unitaries per bond, shaped (d_l*d_r, d_l*d_r).

    order 1 holds full-step gates everywhere (odd applied before even);
    order 2 (Strang) holds half-step gates on the odd bonds, which are
    applied before and after the even sweep.
    """

    gates: list
    dims: list
    dt: float
    order: int = 1

    @property
    def odd_bonds(self):
        return list(range(1, len(self.gates), 2))

    @property
    def even_bonds(self):
        return list(range(0, len(self.gates), 2))


@dataclass
class MpsState:
    tensors: list
    center: int
    photon_cutoff: int

    @property
    def n_sites(self):
        return len(self.tensors)

    @property
    def bond_dims(self):
        return [t.shape[2] for t in self.tensors[:-1]]

    def copy(self):
        return MpsState([t.copy() for t in self.tensors], self.center, self.photon_cutoff)


def product_state(atom_level, M_c, N):
    """|atom, 0, ..., 0> with all bond dimensions 1 and norm exactly 1."""
    if M_c < 1 or N < 2:
        raise ConfigurationError("need M_c >= 1 oscillators and N >= 2 photon states")
    if atom_level not in ("g", "e"):
        raise ConfigurationError("atom_level must be 'g' or 'e'")
    a0 = np.zeros((1, ATOM_DIM, 1), dtype=complex)
    a0[0, 0 if atom_level == "g" else 1, 0] = 1.0
    tensors = [a0]
    for _ in range(M_c):
        t = np.zeros((1, N, 1), dtype=complex)
        t[0, 0, 0] = 1.0
        tensors.append(t)
    return MpsState(tensors, 0, N)


def to_dense(state):
    """Contract to the full state vector (small systems only)."""
    dim = ATOM_DIM * state.photon_cutoff ** (state.n_sites - 1)
    if dim > 1 << 20:
        raise CapacityError("state too large to contract densely")
    vec = state.tensors[0]
    for t in state.tensors[1:]:
        vec = np.tensordot(vec, t, axes=(vec.ndim - 1, 0))
    return vec.reshape(-1)


def norm(state):
    """sqrt(<psi|psi>) by exact transfer contraction."""
    env = np.ones((1, 1), dtype=complex)
    for t in state.tensors:
        env = np.einsum("ab,aps,bpt->st", env, t.conj(), t, optimize=True)
    return float(np.sqrt(np.abs(env[0, 0])))


def _qr_step_right(tensors, i):
    dl, d, dr = tensors[i].shape
    q, r = np.linalg.qr(tensors[i].reshape(dl * d, dr))
    k = q.shape[1]
    tensors[i] = q.reshape(dl, d, k)
    tensors[i + 1] = np.tensordot(r, tensors[i + 1], axes=(1, 0))


def _qr_step_left(tensors, i):
    dl, d, dr = tensors[i].shape
    mat = tensors[i].reshape(dl, d * dr).T
    q, r = np.linalg.qr(mat)
    k = q.shape[1]
    tensors[i] = q.T.reshape(k, d, dr)
    tensors[i - 1] = np.tensordot(tensors[i - 1], r.T, axes=(2, 0))


def canonicalize(state, center):
    """Return an equivalent state with the orthogonality center at `center`."""
    if not (0 <= center < state.n_sites):
        raise ConfigurationError("center out of range")
    out = state.copy()
    for i in range(center):
        _qr_step_right(out.tensors, i)
    for i in range(out.n_sites - 1, center, -1):
        _qr_step_left(out.tensors, i)
    out.center = center
    return out


def expectation_site(state, operator, site):
    """<psi| op_site |psi> by exact contraction (no normalization applied)."""
    operator = np.asarray(operator)
    d = state.tensors[site].shape[1]
    if operator.shape != (d, d):
        raise ConfigurationError("operator does not match the site dimension")
    st = canonicalize(state, site)
    t = st.tensors[site]
    return complex(np.einsum("lpr,pq,lqr->", t.conj(), operator, t, optimize=True))


def expectation_bond(state, operator, bond):
    """Two-site expectation on (bond, bond+1); operator is (dl*dr, dl*dr)."""
    st = canonicalize(state, bond)
    a, b = st.tensors[bond], st.tensors[bond + 1]
    theta = np.tensordot(a, b, axes=(2, 0))  # (Dl, d1, d2, Dr)
    dl, d1, d2, dr = theta.shape
    op = np.asarray(operator).reshape(d1, d2, d1, d2)
    val = np.einsum("lpqr,pqst,lstr->", theta.conj(), op, theta, optimize=True)
    return complex(val)


def _transfer(env, bra, ket, op=None):
    if op is None:
        return np.einsum("ab,aps,bpt->st", env, bra.conj(), ket, optimize=True)
    return np.einsum("ab,aps,pq,bqt->st", env, bra.conj(), op, ket, optimize=True)


def correlation_matrix(state):
    """Chain-basis two-point matrix B[m, m'] = <b_m^dag b_m'>.

    One left-to-right sweep with cached environments; rows/columns index
    the oscillator sites 1..M_c (0-based in the returned array).
    """
    mc = state.n_sites - 1
    n = state.photon_cutoff
    b_op = np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)
    num_op = b_op.T @ b_op
    B = np.zeros((mc, mc), dtype=complex)

    st = canonicalize(state, 0)
    tensors = st.tensors
    # plain left environments up to each site
    left = [np.ones((1, 1), dtype=complex)]
    for t in tensors[:-1]:
        left.append(_transfer(left[-1], t, t))

    for m in range(1, mc + 1):
        tm = tensors[m]
        B[m - 1, m - 1] = np.einsum(
            "ab,aps,pq,bqs->", left[m], tm.conj(), num_op, tm, optimize=True
        )
        env = _transfer(left[m], tm, tm, b_op.T)  # b_m^dag inserted
        for mp in range(m + 1, mc + 1):
            tmp = tensors[mp]
            val = np.einsum(
                "ab,aps,pq,bqs->", env, tmp.conj(), b_op, tmp, optimize=True
            )
            B[m - 1, mp - 1] = val
            B[mp - 1, m - 1] = np.conj(val)
            if mp < mc:
                env = _transfer(env, tmp, tmp)
    return B


def _bond_hamiltonians(atom, chain, N):
    b = np.diag(np.sqrt(np.arange(1, N, dtype=float)), 1)
    num = b.T @ b
    sz = np.diag([-1.0, 1.0])
    sx = np.array([[0.0, 1.0], [1.0, 0.0]])
    eye_a = np.eye(ATOM_DIM)
    eye_b = np.eye(N)
    hams = []
    # bond 0: atom coupling + atom on-site + first oscillator on-site
    h0 = -1.0j * chain.rho * np.kron(sx, b - b.T)
    h0 += 0.5 * atom.omega_a * np.kron(sz, eye_b)
    h0 += chain.xi[0] * np.kron(eye_a, num)
    hams.append(h0)
    for j in range(1, chain.M_c):
        hop = np.kron(b.T, b)
        h = chain.t[j - 1] * (hop + hop.conj().T)
        h += chain.xi[j] * np.kron(eye_b, num)
        hams.append(h)
    return hams


def build_gates(atom, chain, dt, N, order=1):
    """Exponentiated bond Hamiltonians exp(-i h_bond dt) for one chain.

    order=1 is the default first-order splitting; order=2 requests the
    symmetric (Strang) variant, realized with half-step odd-bond gates.
    """
    if dt <= 0:
        raise ConfigurationError("dt must be positive")
    if order not in (1, 2):
        raise ConfigurationError("Trotter order must be 1 or 2")
    gates = []
    for j, h in enumerate(_bond_hamiltonians(atom, chain, N)):
        step = 0.5 * dt if (order == 2 and j % 2 == 1) else dt
        vals, vecs = scipy.linalg.eigh(h)
        gates.append((vecs * np.exp(-1.0j * vals * step)) @ vecs.conj().T)
    dims = [ATOM_DIM] + [N] * chain.M_c
    return GateSet(gates, dims, dt, order)


def _svd_truncate(theta, policy):
    """SVD of theta with policy truncation; returns (u, s, vh, discarded)."""
    if policy.use_randomized_svd and min(theta.shape) > 4 * policy.max_bond:
        u, s, vh = _randomized_svd(theta, policy.max_bond + 8, policy._rng)
    else:
        try:
            u, s, vh = scipy.linalg.svd(theta, full_matrices=False)
        except scipy.linalg.LinAlgError:  # pragma: no cover - gesdd fallback
            u, s, vh = scipy.linalg.svd(theta, full_matrices=False, lapack_driver="gesvd")
    total = float(np.sum(s**2))
    if total == 0.0:
        return u[:, :1], s[:1], vh[:1], 0.0
    keep = min(policy.max_bond, len(s))
    if policy.svd_cutoff > 0.0:
        tail = np.cumsum((s**2)[::-1])[::-1] / total  # tail[k] = fraction from k on
        small = np.nonzero(tail <= policy.svd_cutoff)[0]
        if len(small):
            keep = min(keep, max(int(small[0]), 1))
    discarded = float(np.sum(s[keep:] ** 2))
    if keep < len(s) and policy.svd_cutoff == 0.0 and discarded > 0.0:
        raise CapacityError(
            "bond dimension exceeded max_bond with svd_cutoff = 0 (lossless mode)"
        )
    return u[:, :keep], s[:keep], vh[:keep], discarded


def _randomized_svd(a, k, rng, n_iter=2):
    m, n = a.shape
    k = min(k, min(m, n))
    q = rng.standard_normal((n, k)) + 1.0j * rng.standard_normal((n, k))
    q = np.linalg.qr(a @ q)[0]
    for _ in range(n_iter):
        q = np.linalg.qr(a.conj().T @ q)[0]
        q = np.linalg.qr(a @ q)[0]
    u, s, vh = scipy.linalg.svd(q.conj().T @ a, full_matrices=False)
    return q @ u, s, vh


def _apply_gate(tensors, gate, j, policy):
    """Apply gate at bond j (center must sit at j or j+1); center -> j+1."""
    a, b = tensors[j], tensors[j + 1]
    dl, d1, _ = a.shape
    _, d2, dr = b.shape
    theta = np.tensordot(a, b, axes=(2, 0))  # (dl, d1, d2, dr)
    g = gate.reshape(d1, d2, d1, d2)
    theta = np.einsum("pqst,lstr->lpqr", g, theta, optimize=True)
    theta = theta.reshape(dl * d1, d2 * dr)
    u, s, vh, discarded = _svd_truncate(theta, policy)
    k = len(s)
    tensors[j] = u.reshape(dl, d1, k)
    tensors[j + 1] = (s[:, None] * vh).reshape(k, d2, dr)
    return discarded


def tebd_step(state, gates, policy):
    """One Trotter step: odd-bond gates, then even-bond gates.

    For order-2 gate sets the (half-step) odd sweep repeats after the
    even one. Returns (new_state, report) where report maps bond index
    -> discarded weight accumulated during this step. The state is not
    renormalized, so truncation shows up as norm loss.
    """
    if [t.shape[1] for t in state.tensors] != gates.dims:
        raise ConfigurationError("state and gate dimensions differ")
    out = canonicalize(state, min(1, state.n_sites - 1))
    tensors = out.tensors
    report = {j: 0.0 for j in range(len(gates.gates))}

    def sweep(bonds):
        # bonds ascending; move the center right between gates
        pos = out.center
        for j in bonds:
            while pos < j:
                _qr_step_right(tensors, pos)
                pos += 1
            report[j] += _apply_gate(tensors, gates.gates[j], j, policy)
            pos = j + 1
        return pos

    def rewind():
        for i in range(out.center, 0, -1):
            _qr_step_left(tensors, i)
        out.center = 0

    out.center = sweep(gates.odd_bonds)
    rewind()
    out.center = sweep(gates.even_bonds)
    if gates.order == 2:
        rewind()
        out.center = sweep(gates.odd_bonds)
    return out, report


def max_bond_dim(state):
    return max(state.bond_dims) if state.n_sites > 1 else 1
