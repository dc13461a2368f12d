"""Physical outputs: populations, photon numbers, field correlation maps.

Everything is computed from the chain-basis two-point matrix
B[m, m'] = <b_m^dag b_m'> plus the orthogonal chain transform and the
mode basis; the vectorized quadratic forms here replace the quadruple
mode sums of the direct expressions.

The first-order correlation G1(x) = <E^(-)(x) E^(+)(x)> is reported in
units of hbar omega_a / (2 eps0 L), i.e. with the prefactor
hbar/(2 eps0 V0) written as 1/(2L) in natural units.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .mps import EXCITED, expectation_site


@dataclass
class CorrelationMatrix:
    """Chain-basis two-point matrix with its time stamp (units of T)."""

    B: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        self.B = np.asarray(self.B, dtype=complex)
        if self.B.ndim != 2 or self.B.shape[0] != self.B.shape[1]:
            raise ConfigurationError("correlation matrix must be square")


@dataclass
class FieldMap:
    """G1(x, t) sampled on a space-time grid; times in T, positions in L."""

    times: np.ndarray
    positions: np.ndarray
    values: np.ndarray  # shape (n_times, n_positions)


def _chain_matrix(B):
    return B.B if isinstance(B, CorrelationMatrix) else np.asarray(B, dtype=complex)


def photon_numbers(B, transform):
    """<a_k^dag a_k> per mode: the diagonal of U^T B U.

    Tiny negative values (round-off) are clipped to zero for reporting.
    """
    U = getattr(transform, "U", transform)
    mat = _chain_matrix(B)
    if mat.shape[0] != U.shape[0]:
        raise ConfigurationError("correlation matrix does not match the chain")
    nk = np.einsum("nk,nm,mk->k", U, mat, U, optimize=True).real
    return np.clip(nk, 0.0, None)


def mode_correlations(B, transform):
    """Full mode-basis matrix <a_k^dag a_k'> = u_k^T B u_k'."""
    U = getattr(transform, "U", transform)
    return U.T @ _chain_matrix(B) @ U


def field_correlation(B, transform, basis, positions):
    """G1 at each position: (1/2L) sum_kk' sqrt(w_k w_k') A_k A_k' <a_k^dag a_k'>.

    `basis` must contain exactly the modes the chain was built from (the
    coupled ones); uncoupled modes stay in vacuum and contribute nothing.
    """
    U = getattr(transform, "U", transform)
    mat = _chain_matrix(B)
    if len(basis) != U.shape[0]:
        raise ConfigurationError(
            "mode basis does not match the chain transform; pass the coupled subset"
        )
    positions = np.atleast_1d(np.asarray(positions, dtype=float))
    amps = np.array(
        [np.sqrt(basis.frequencies[k]) * basis.evaluate(k, positions) for k in range(len(basis))]
    )  # (M_c, n_pos)
    a_modes = U.T @ mat @ U
    g1 = np.einsum("kx,kl,lx->x", amps, a_modes, amps, optimize=True)
    if np.max(np.abs(g1.imag)) > 1e-10 * max(1.0, np.max(np.abs(g1.real))):
        raise ConfigurationError("correlation matrix is not Hermitian enough")
    return g1.real / (2.0 * basis.grid.length)


def excited_population(state):
    """<sigma_+ sigma_-> of the atom site."""
    return float(expectation_site(state, EXCITED, 0).real)


def wavefront_positions(fieldmap, x_min=0.0):
    """argmax_x G1(x, t) restricted to x >= x_min, per time sample."""
    sel = fieldmap.positions >= x_min
    xs = fieldmap.positions[sel]
    vals = fieldmap.values[:, sel]
    return xs[np.argmax(vals, axis=1)]
