"""Cavity electromagnetic mode bases for 1D lattices and cavities.

Analytic bases cover the periodic lattice and the homogeneous
perfect-electric-conductor (PEC) cavity; inhomogeneous permittivity
profiles are handled by assembling and solving the generalized
eigenproblem K Phi = w^2 M Phi on a finite-difference grid.

Natural units are used throughout the package: hbar = c = eps0 = 1 and
the 1D mode volume is the cavity length L.
"""

from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, NumericError

SIGN_TOL = 1e-8


@dataclass
class SpatialGrid:
    """Uniform 1D grid on [-L/2, L/2].

    Bounded grids include both endpoints (spacing L/(n_points-1));
    periodic grids exclude the right endpoint (spacing L/n_points).
    """

    length: float
    n_points: int
    periodic: bool = False

    def __post_init__(self):
        if self.n_points < 3:
            raise ConfigurationError("grid needs at least 3 points")
        if self.length <= 0:
            raise ConfigurationError("grid length must be positive")

    @property
    def spacing(self):
        if self.periodic:
            return self.length / self.n_points
        return self.length / (self.n_points - 1)

    @property
    def points(self):
        x0 = -0.5 * self.length
        if self.periodic:
            return x0 + self.spacing * np.arange(self.n_points)
        return np.linspace(x0, 0.5 * self.length, self.n_points)


@dataclass
class PermittivityProfile:
    """Relative permittivity eps_r(x) sampled on a grid (node values)."""

    grid: SpatialGrid
    eps_r: np.ndarray

    def __post_init__(self):
        self.eps_r = np.asarray(self.eps_r, dtype=float)
        if self.eps_r.shape != (self.grid.n_points,):
            raise ConfigurationError("eps_r sample count does not match grid")
        if np.any(self.eps_r < 1.0):
            raise ConfigurationError("relative permittivity must be >= 1 everywhere")


def uniform_profile(grid):
    return PermittivityProfile(grid, np.ones(grid.n_points))


def slab_profile(grid, center, thickness, eps_inside):
    """Piecewise-constant slab: eps_inside for |x - center| <= thickness/2."""
    x = grid.points
    eps = np.ones(grid.n_points)
    eps[np.abs(x - center) <= 0.5 * thickness] = eps_inside
    return PermittivityProfile(grid, eps)


def load_permittivity_profile(path, grid):
    """Load a two-column (x, eps_r) text file, linearly resampled onto grid."""
    data = np.loadtxt(path)
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigurationError(f"{path}: expected two columns (x, eps_r)")
    xs, eps = data[:, 0], data[:, 1]
    order = np.argsort(xs)
    eps_grid = np.interp(grid.points, xs[order], eps[order])
    return PermittivityProfile(grid, eps_grid)


@dataclass
class ModeBasis:
    """Cavity mode frequencies and grid-sampled spatial eigenfunctions.

    eigenfunctions[k] holds mode k on grid.points; weights stores the
    eps_r samples entering the discrete normalization
    (1/L) sum_j Phi_k(j) eps_r(j) Phi_k'(j) dx = delta_kk'.
    """

    boundary: str
    frequencies: np.ndarray
    eigenfunctions: np.ndarray
    grid: SpatialGrid
    weights: np.ndarray = field(default=None)

    def __post_init__(self):
        self.frequencies = np.asarray(self.frequencies, dtype=float)
        self.eigenfunctions = np.asarray(self.eigenfunctions, dtype=float)
        if self.weights is None:
            self.weights = np.ones(self.grid.n_points)

    def __len__(self):
        return len(self.frequencies)

    def subset(self, indices):
        """New basis holding only the selected modes (order preserved)."""
        idx = np.asarray(indices, dtype=int)
        return ModeBasis(
            self.boundary,
            self.frequencies[idx],
            self.eigenfunctions[idx],
            self.grid,
            weights=self.weights,
        )

    def evaluate(self, k, x):
        """Mode k at position(s) x by linear interpolation between samples."""
        x = np.asarray(x, dtype=float)
        half = 0.5 * self.grid.length
        if np.any(x < -half - 1e-12) or np.any(x > half + 1e-12):
            raise ConfigurationError("position outside the cavity domain")
        pts = self.grid.points
        prof = self.eigenfunctions[k]
        if self.grid.periodic:
            # wrap: append the left sample at x = +L/2
            pts = np.append(pts, half)
            prof = np.append(prof, prof[0])
        return np.interp(x, pts, prof)


@dataclass
class Couplings:
    """Gauge-specific light-matter coupling coefficients per mode.

    g_D follows g_{D,k} = d A_k(r0) sqrt(w_k / 2 L) and the Coulomb-gauge
    partner obeys g_{C,k} = g_{D,k} w_a / w_k. omega is a convenience
    snapshot of the mode frequencies.
    """

    omega: np.ndarray
    g_D: np.ndarray
    g_C: np.ndarray
    coupled_mask: np.ndarray

    def coupled(self):
        """(omega, g_D, g_C) restricted to the coupled modes."""
        m = self.coupled_mask
        return self.omega[m], self.g_D[m], self.g_C[m]


def _check_length(grid, expected, what):
    if abs(grid.length - expected) > 1e-9 * expected:
        raise ConfigurationError(
            f"{what} requires cavity length {expected:.12g}, got {grid.length:.12g}"
        )


def _normalize(basis):
    """Enforce the discrete eps-weighted normalization exactly."""
    dx = basis.grid.spacing
    L = basis.grid.length
    for k in range(len(basis)):
        phi = basis.eigenfunctions[k]
        nrm = np.sqrt(np.sum(phi * basis.weights * phi) * dx / L)
        basis.eigenfunctions[k] = phi / nrm
    return basis


def analytic_modes_periodic(n_pairs, omega_a, grid):
    """Periodic-lattice modes, degenerate e^{+-ikx} pairs as real cos/sin.

    The lattice must have length lambda_a = 2 pi c / omega_a so the
    fundamental pair is resonant with the atom; frequencies come out as
    [1, 1, 2, 2, ...] * omega_a with the cos partner listed first.
    """
    lam = 2.0 * np.pi / omega_a
    _check_length(grid, lam, "periodic lattice")
    if not grid.periodic:
        raise ConfigurationError("periodic mode basis needs a periodic grid")
    if grid.n_points <= 2 * n_pairs:
        raise ConfigurationError("grid too coarse for the requested mode count")
    x = grid.points
    freqs, funcs = [], []
    for p in range(1, n_pairs + 1):
        kappa = 2.0 * np.pi * p / grid.length
        freqs += [p * omega_a, p * omega_a]
        funcs += [np.sqrt(2.0) * np.cos(kappa * x), np.sqrt(2.0) * np.sin(kappa * x)]
    basis = ModeBasis("periodic", np.array(freqs), np.array(funcs), grid)
    return _normalize(basis)


def analytic_modes_pec(n_modes, omega_a, grid):
    """Homogeneous PEC cavity modes, length lambda_a / 2, w_k = k omega_a."""
    lam = 2.0 * np.pi / omega_a
    _check_length(grid, 0.5 * lam, "PEC cavity")
    if grid.periodic:
        raise ConfigurationError("PEC mode basis needs a bounded grid")
    x = grid.points
    L = grid.length
    freqs = omega_a * np.arange(1, n_modes + 1, dtype=float)
    funcs = np.array(
        [np.sqrt(2.0) * np.sin(k * np.pi * (x + 0.5 * L) / L) for k in range(1, n_modes + 1)]
    )
    funcs[:, 0] = 0.0
    funcs[:, -1] = 0.0
    basis = ModeBasis("pec", freqs, funcs, grid)
    return _normalize(basis)


def assemble_eigenproblem(profile, grid, boundary):
    """Stiffness/mass pair for the 1D curl-curl eigenproblem.

    K is the central-difference -c^2 d^2/dx^2 (Dirichlet rows eliminated
    for 'pec', wrapped stencil for 'periodic'); M is the diagonal matrix
    of eps_r samples on the retained nodes.
    """
    if profile.grid is not grid and profile.grid.n_points != grid.n_points:
        raise ConfigurationError("permittivity profile not sampled on this grid")
    dx = grid.spacing
    c2 = 1.0  # c = 1 in natural units
    if boundary == "pec":
        n = grid.n_points - 2
        K = (
            np.diag(np.full(n, 2.0))
            - np.diag(np.ones(n - 1), 1)
            - np.diag(np.ones(n - 1), -1)
        ) * (c2 / dx**2)
        M = np.diag(profile.eps_r[1:-1])
    elif boundary == "periodic":
        n = grid.n_points
        K = (
            np.diag(np.full(n, 2.0))
            - np.diag(np.ones(n - 1), 1)
            - np.diag(np.ones(n - 1), -1)
        ) * (c2 / dx**2)
        K[0, -1] -= c2 / dx**2
        K[-1, 0] -= c2 / dx**2
        M = np.diag(profile.eps_r)
    else:
        raise ConfigurationError(f"unknown boundary kind {boundary!r}")
    return K, M


def solve_modes(K, M, n_modes, grid, boundary):
    """Lowest n_modes of K Phi = w^2 M Phi, eps-orthonormalized.

    Returns a ModeBasis with eigenfunctions on the full grid (zero at the
    endpoints for 'pec'); eigenvalues that are negative beyond round-off
    raise a NumericError, near-zero ones (periodic DC mode) are dropped.
    """
    vals, vecs = scipy.linalg.eigh(K, M)
    scale = max(abs(vals[0]), abs(vals[-1]))
    if vals[0] < -1e-10 * scale:
        raise NumericError(
            "generalized eigenproblem produced a negative eigenvalue",
            residual=float(vals[0]),
        )
    keep = np.nonzero(vals > 1e-10 * scale)[0]
    if len(keep) < n_modes:
        raise ConfigurationError("grid supports fewer modes than requested")
    keep = keep[:n_modes]
    omega = np.sqrt(vals[keep])

    eps_full = np.empty(grid.n_points)
    if boundary == "pec":
        eps_full[1:-1] = np.diag(M)
        eps_full[0], eps_full[-1] = eps_full[1], eps_full[-2]
        funcs = np.zeros((n_modes, grid.n_points))
        funcs[:, 1:-1] = vecs[:, keep].T
    else:
        eps_full[:] = np.diag(M)
        funcs = vecs[:, keep].T.copy()

    # deterministic sign: first sample above tolerance made positive
    for i in range(n_modes):
        phi = funcs[i]
        nz = np.nonzero(np.abs(phi) > SIGN_TOL * np.max(np.abs(phi)))[0]
        if len(nz) and phi[nz[0]] < 0:
            funcs[i] = -phi

    basis = ModeBasis(boundary, omega, funcs, grid, weights=eps_full)
    return _normalize(basis)


def numerical_modes(profile, grid, boundary, n_modes):
    """Convenience wrapper: assemble and solve in one step."""
    K, M = assemble_eigenproblem(profile, grid, boundary)
    return solve_modes(K, M, n_modes, grid, boundary)


def coupling_coefficients(basis, atom):
    """Dipole- and Coulomb-gauge coupling coefficients for every mode."""
    L = basis.grid.length
    a_at_r0 = np.array([basis.evaluate(k, atom.position) for k in range(len(basis))])
    omega = basis.frequencies
    g_D = atom.dipole * a_at_r0 * np.sqrt(omega / (2.0 * L))
    g_C = g_D * atom.omega_a / omega
    gmax = np.max(np.abs(g_D)) if len(g_D) else 0.0
    mask = np.abs(g_D) > 1e-12 * gmax if gmax > 0 else np.zeros(len(g_D), dtype=bool)
    return Couplings(omega.copy(), g_D, g_C, mask)


def calibrate_dipole(basis, atom, target_ratio):
    """Rescale the dipole so g_D,1 / w_1 = target_ratio on the lowest coupled mode."""
    if target_ratio == 0.0:
        return replace(atom, dipole=0.0)
    probe = replace(atom, dipole=1.0)
    c = coupling_coefficients(basis, probe)
    if not np.any(c.coupled_mask):
        raise ConfigurationError("atom position couples to no mode; cannot calibrate")
    k0 = np.nonzero(c.coupled_mask)[0][0]
    d = target_ratio * c.omega[k0] / c.g_D[k0]
    return replace(atom, dipole=d)
