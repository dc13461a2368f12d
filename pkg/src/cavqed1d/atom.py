"""Anharmonic atom on a spatial grid and its two-level reduction.

The untruncated atom p^2/2m + V(x) is represented with the Fourier grid
Hamiltonian (FGH) method: the kinetic operator is evaluated spectrally
on a uniform grid, giving a dense real symmetric matrix whose low
eigenpairs converge exponentially with grid resolution.

The stock anharmonic atom is a symmetric double well V = -a x^2 + b x^4
whose coefficients come from a calibration routine that enforces a
strongly anharmonic spectrum, (E2-E1)/(E1-E0) >= 5; energies are then
rescaled so the qubit gap E1-E0 is the frequency unit of the run.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConfigurationError,
    DegeneracyError,
    InvalidGridError,
    InvalidPotentialError,
    NumericError,
)
from .modes import SIGN_TOL, SpatialGrid

# Frozen output of calibrate_double_well(); see that routine for how
# these were produced. Not taken from literature.
DOUBLE_WELL_A = 7.450580596923828
DOUBLE_WELL_B = 1.0
DEFAULT_MASS = 1.0


@dataclass
class Potential:
    """Binding potential V(x), even about the origin for the stock kinds."""

    kind: str  # 'double_well' | 'harmonic' | 'custom_samples'
    parameters: dict
    samples: np.ndarray = None  # (n, 2) table of (x, V) for custom kind

    @classmethod
    def double_well(cls, a=DOUBLE_WELL_A, b=DOUBLE_WELL_B):
        return cls("double_well", {"a": float(a), "b": float(b)})

    @classmethod
    def harmonic(cls, mass=1.0, omega=1.0):
        return cls("harmonic", {"k": float(mass) * float(omega) ** 2})

    @classmethod
    def custom(cls, xs, vs):
        table = np.column_stack([np.asarray(xs, float), np.asarray(vs, float)])
        return cls("custom_samples", {}, samples=table)

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "double_well":
            return -self.parameters["a"] * x**2 + self.parameters["b"] * x**4
        if self.kind == "harmonic":
            return 0.5 * self.parameters["k"] * x**2
        if self.kind == "custom_samples":
            return np.interp(x, self.samples[:, 0], self.samples[:, 1])
        raise ConfigurationError(f"unknown potential kind {self.kind!r}")


@dataclass
class AtomSpectrum:
    """Ascending eigenpairs of the grid atom, orthonormal under grid quadrature."""

    energies: np.ndarray
    wavefunctions: np.ndarray  # shape (n_levels, n_points)
    grid: SpatialGrid


@dataclass
class TwoLevelAtom:
    """Qubit reduction: gap omega_a, real signed dipole, position in the cavity."""

    omega_a: float
    dipole: float
    position: float = 0.0

    def __post_init__(self):
        if self.omega_a <= 0:
            raise ConfigurationError("omega_a must be positive")


def build_fgh_hamiltonian(potential, grid, mass):
    """Dense FGH matrix of p^2/2m + V(x) on the grid basis.

    The grid must have an odd point count (>= 33) so a sample sits at the
    center; the kinetic block is the standard spectral form with
    k_max = pi / dx.
    """
    n = grid.n_points
    if n % 2 == 0:
        raise InvalidGridError("FGH grid must have an odd number of points")
    if n < 33:
        raise InvalidGridError("FGH grid needs at least 33 points")
    v = potential.evaluate(grid.points)
    if not np.all(np.isfinite(v)):
        raise InvalidPotentialError("potential is not finite on the grid")

    dx = grid.spacing
    kmax = np.pi / dx
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        tmat = (2.0 * kmax**2 / np.pi**2) * np.where(
            diff == 0, 0.0, ((-1.0) ** diff) / np.where(diff == 0, 1, diff) ** 2
        )
    np.fill_diagonal(tmat, kmax**2 / 3.0)
    h = tmat / (2.0 * mass) + np.diag(v)
    return 0.5 * (h + h.T)  # kill round-off asymmetry


def diagonalize_atom(H, grid, n_levels):
    """Lowest n_levels eigenpairs with the deterministic sign convention."""
    n = H.shape[0]
    if n_levels > n:
        raise ConfigurationError("n_levels exceeds the grid size")
    try:
        vals, vecs = scipy.linalg.eigh(H, subset_by_index=(0, n_levels - 1))
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover - rare
        raise NumericError(f"atom eigensolver failed: {exc}") from exc
    resid = np.linalg.norm(H @ vecs - vecs * vals, axis=0).max()
    if resid > 1e-8 * max(1.0, np.abs(vals).max()):
        raise NumericError("atom eigensolver residual too large", residual=float(resid))

    dx = grid.spacing
    psi = (vecs / np.sqrt(dx)).T  # orthonormal under grid quadrature
    for i in range(n_levels):
        amax = np.max(np.abs(psi[i]))
        nz = np.nonzero(np.abs(psi[i]) > SIGN_TOL * amax)[0]
        if len(nz) and psi[i, nz[0]] < 0:
            psi[i] = -psi[i]
    return AtomSpectrum(vals, psi, grid)


def position_matrix(spectrum):
    """Matrix elements <m| x |n> under grid quadrature (real symmetric)."""
    x = spectrum.grid.points
    dx = spectrum.grid.spacing
    psi = spectrum.wavefunctions
    return (psi * x) @ psi.T * dx


def rescale_spectrum(spectrum, gap=1.0):
    """Scale all energies so E1 - E0 equals gap (wavefunctions untouched)."""
    raw = spectrum.energies[1] - spectrum.energies[0]
    if raw <= 0:
        raise DegeneracyError("cannot rescale a degenerate lowest pair")
    s = gap / raw
    return AtomSpectrum(spectrum.energies * s, spectrum.wavefunctions, spectrum.grid)


def reduce_to_two_level(spectrum, charge, position, frequency_unit=None):
    """Project onto the lowest doublet: gap and real dipole moment.

    The gap is expressed in units of frequency_unit (default: the gap
    itself, making omega_a = 1 the unit system of the run). The dipole is
    charge * <psi0| x |psi1> under the wavefunction sign convention, which
    makes it real and its sign deterministic.
    """
    if len(spectrum.energies) < 2:
        raise ConfigurationError("need at least two levels to reduce")
    gap = spectrum.energies[1] - spectrum.energies[0]
    scale = max(abs(spectrum.energies[0]), abs(spectrum.energies[1]), 1.0)
    if gap < 1e-10 * scale:
        raise DegeneracyError("lowest atomic pair is degenerate")
    unit = gap if frequency_unit is None else frequency_unit
    x = spectrum.grid.points
    dx = spectrum.grid.spacing
    d = charge * np.sum(spectrum.wavefunctions[0] * x * spectrum.wavefunctions[1]) * dx
    return TwoLevelAtom(omega_a=gap / unit, dipole=float(d), position=position)


def suggest_grid(potential, mass, n_levels, points=None):
    """Grid wide enough for n_levels bound states of the potential.

    Extent is +-6 classical turning points of the highest requested
    level (estimated from a coarse pre-diagonalization); the point count
    keeps the grid momentum cutoff at 6x the classical momentum of that
    level and is forced odd.
    """
    # coarse passes to locate E_max and the outer classical turning point
    extent = 6.0
    for _ in range(5):
        coarse = SpatialGrid(2 * extent, 401)
        h = build_fgh_hamiltonian(potential, coarse, mass)
        vals = scipy.linalg.eigh(h, eigvals_only=True, subset_by_index=(0, n_levels - 1))
        e_max = vals[-1]
        xs = np.linspace(0, 10 * extent, 20001)
        below = np.nonzero(potential.evaluate(xs) <= e_max)[0]
        if len(below) == 0 or below[-1] == len(xs) - 1:
            break  # potential does not confine at this energy; keep extent
        new_extent = 6.0 * max(xs[below[-1]], 0.5)
        if abs(new_extent - extent) < 0.05 * extent:
            extent = new_extent
            break
        extent = new_extent
    if points is None:
        v_min = float(np.min(potential.evaluate(np.linspace(-extent, extent, 4001))))
        p_max = np.sqrt(2.0 * mass * max(e_max - v_min, 1.0))
        points = int(np.ceil(2 * extent * 6.0 * p_max / np.pi)) + 1
        points = max(points, 129)
    if points % 2 == 0:
        points += 1
    return SpatialGrid(2 * extent, points)


def calibrate_double_well(
    target_ratio=5.0, max_dipole_anisotropy=1e-3, b=1.0, mass=DEFAULT_MASS, n_levels=30
):
    """Scan the quadratic coefficient for a strongly anharmonic qubit well.

    Geometric scan a = 1.0 * 1.25^j with b fixed; the first a satisfying
    both criteria wins:
      * anharmonicity (E2-E1)/(E1-E0) >= target_ratio,
      * two-level dipole dominance: the lowest doublet of the squared
        position matrix is isotropic, |(x^2)_11 - (x^2)_00| / x_01^2 <=
        max_dipole_anisotropy, so the dipole self-energy reduces to an
        identity in the doublet.
    The frozen module defaults DOUBLE_WELL_A/B were produced by this
    routine with its default arguments.
    """
    a = 1.0
    for _ in range(40):
        pot = Potential.double_well(a, b)
        grid = suggest_grid(pot, mass, n_levels)
        h = build_fgh_hamiltonian(pot, grid, mass)
        spec = diagonalize_atom(h, grid, n_levels)
        e = spec.energies
        ratio = (e[2] - e[1]) / (e[1] - e[0])
        xsq = position_matrix(spec)
        xsq = xsq @ xsq
        aniso = abs(xsq[1, 1] - xsq[0, 0]) / position_matrix(spec)[0, 1] ** 2
        if ratio >= target_ratio and aniso <= max_dipole_anisotropy:
            return a, b, float(ratio), float(aniso)
        a *= 1.25
    raise NumericError("double-well calibration did not reach its targets")


def default_atom_spectrum(n_levels=40, mass=DEFAULT_MASS):
    """Calibrated double-well spectrum, energies rescaled so E1-E0 = 1."""
    pot = Potential.double_well()
    grid = suggest_grid(pot, mass, n_levels)
    h = build_fgh_hamiltonian(pot, grid, mass)
    spec = diagonalize_atom(h, grid, n_levels)
    return rescale_spectrum(spec, gap=1.0)


def default_two_level_atom(position=0.0, charge=1.0, n_levels=4):
    """Two-level reduction of the calibrated double well at omega_a = 1."""
    pot = Potential.double_well()
    grid = suggest_grid(pot, DEFAULT_MASS, max(n_levels, 2))
    h = build_fgh_hamiltonian(pot, grid, DEFAULT_MASS)
    spec = diagonalize_atom(h, grid, max(n_levels, 2))
    atom = reduce_to_two_level(spec, charge, position)
    return atom
