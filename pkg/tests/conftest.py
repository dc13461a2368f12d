import numpy as np
import pytest

from cavqed1d.atom import TwoLevelAtom, default_atom_spectrum
from cavqed1d.modes import (
    SpatialGrid,
    analytic_modes_pec,
    calibrate_dipole,
    coupling_coefficients,
)


@pytest.fixture(scope="session")
def atom_spectrum40():
    """Calibrated double-well spectrum, 40 levels, gap rescaled to 1."""
    return default_atom_spectrum(40)


@pytest.fixture(scope="session")
def pec_grid():
    return SpatialGrid(np.pi, 801)


@pytest.fixture(scope="session")
def pec_basis(pec_grid):
    return analytic_modes_pec(10, 1.0, pec_grid)


def make_couplings(basis, target, position=0.0):
    atom = calibrate_dipole(basis, TwoLevelAtom(1.0, 1.0, position), target)
    return atom, coupling_coefficients(basis, atom)


@pytest.fixture(scope="session")
def usc_setting(pec_basis):
    """Atom + couplings at g_D1/w1 = 0.3 in the centered PEC cavity."""
    return make_couplings(pec_basis, 0.3)
