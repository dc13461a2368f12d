"""Star-to-chain transform of the multimode Rabi Hamiltonian.

The qubit couples simultaneously to every cavity mode; an orthogonal
change of bosonic basis b_n = sum_k U_{n,k} a_k lumps the coupling into
the first chain oscillator and leaves a nearest-neighbor tight-binding
chain with frequencies xi_n and hoppings t_n. The rows of U follow a
three-term recursion (Lanczos on diag(omega) started from the coupling
vector); the stabilized variant reorthogonalizes every new row with
modified Gram-Schmidt, the naive variant runs the bare recursion and is
kept for instability demonstrations.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError

TERMINATION_FACTOR = 1e-12


@dataclass
class ChainTransform:
    """Orthogonal chain map: rows of U index chain sites, columns modes."""

    U: np.ndarray
    rho: float
    xi: np.ndarray
    t: np.ndarray  # length M_c with t[-1] == 0
    M_c: int

    def columns(self):
        """u_k vectors of the mode-basis reconstruction a_k = sum_n U_{n,k} b_n."""
        return self.U.T


def _run_recursion(omega, g, stabilize):
    omega = np.asarray(omega, dtype=float)
    g = np.asarray(g, dtype=float)
    if omega.shape != g.shape or omega.ndim != 1 or len(omega) < 1:
        raise DegenerateInputError("omega and g_D must be equal-length 1D arrays")
    if np.any(omega <= 0):
        raise DegenerateInputError("mode frequencies must be positive")
    m = len(omega)
    rho = float(np.linalg.norm(g))
    if rho == 0.0 or np.any(g == 0.0):
        raise DegenerateInputError("zero coupling: filter uncoupled modes upstream")

    U = np.zeros((m, m))
    xi = np.zeros(m)
    t = np.zeros(m)
    U[0] = g / rho
    xi[0] = np.sum(omega * U[0] ** 2)
    t_stop = TERMINATION_FACTOR * np.max(omega)

    rows = 1
    for n in range(m - 1):
        r = (omega - xi[n]) * U[n]
        if n > 0:
            r -= t[n - 1] * U[n - 1]
        if stabilize:
            # two mGS sweeps against all previous rows ("twice is enough")
            for _ in range(2):
                for j in range(rows):
                    r -= np.dot(U[j], r) * U[j]
        tn = float(np.linalg.norm(r))
        if tn < t_stop:
            break  # degenerate exhaustion: chain ends early
        t[n] = tn
        U[n + 1] = r / tn
        xi[n + 1] = np.sum(omega * U[n + 1] ** 2)
        rows += 1

    return ChainTransform(U[:rows].copy(), rho, xi[:rows].copy(), t[:rows].copy(), rows)


def chain_map(omega, g_D, stabilize=True):
    """Stabilized chain transform (mGS reorthogonalization of every row)."""
    return _run_recursion(omega, g_D, stabilize)


def naive_chain_map(omega, g_D):
    """Bare three-term recursion; orthogonality degrades for long chains."""
    return _run_recursion(omega, g_D, stabilize=False)


def orthogonality_defect(U):
    """max |U U^T - I| over the rows actually present."""
    U = getattr(U, "U", U)
    gram = U @ U.T
    return float(np.max(np.abs(gram - np.eye(U.shape[0]))))


def tridiagonal_matrix(transform):
    """Symmetric tridiagonal T(xi, t) the transform maps diag(omega) onto."""
    T = np.diag(transform.xi)
    off = transform.t[: transform.M_c - 1]
    T += np.diag(off, 1) + np.diag(off, -1)
    return T


def to_mode_basis(B, U):
    """Chain-basis two-point matrix -> mode basis: A_kk' = u_k^T B u_k'."""
    U = getattr(U, "U", U)
    B = np.asarray(B)
    if B.shape != (U.shape[0], U.shape[0]):
        raise ValueError("correlation matrix does not match the chain length")
    return U.T @ B @ U


def reference_chain_map(omega, g_D, dps=100):
    """Extended-precision bare recursion; the in-repo oracle for xi and t.

    Runs the same three-term recursion in mpmath arithmetic with dps
    decimal digits, enough head-room that no reorthogonalization is
    needed at chain lengths of a few hundred.
    """
    import mpmath as mp

    with mp.workdps(dps):
        m = len(omega)
        om = [mp.mpf(repr(float(w))) for w in omega]
        gv = [mp.mpf(repr(float(x))) for x in g_D]
        rho = mp.sqrt(mp.fsum(x * x for x in gv))
        u_prev = None
        u = [x / rho for x in gv]
        xi = [mp.fsum(om[k] * u[k] * u[k] for k in range(m))]
        ts = []
        for n in range(m - 1):
            r = [(om[k] - xi[n]) * u[k] for k in range(m)]
            if u_prev is not None:
                r = [r[k] - ts[n - 1] * u_prev[k] for k in range(m)]
            tn = mp.sqrt(mp.fsum(x * x for x in r))
            if tn < mp.mpf("1e-40") * max(om):
                break
            ts.append(tn)
            u_prev = u
            u = [x / tn for x in r]
            xi.append(mp.fsum(om[k] * u[k] * u[k] for k in range(m)))
        xi_f = np.array([float(v) for v in xi])
        t_f = np.array([float(v) for v in ts] + [0.0])
    return xi_f, t_f
