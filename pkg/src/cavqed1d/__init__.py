"""Gauge-invariant multimode cavity QED in 1D.

Library layout mirrors the pipeline: `atom` (grid atom and two-level
reduction), `modes` (analytic and numerical cavity mode bases),
`hamiltonians` (dense gauge-variant builders and spectra),
`chainmap` (stabilized star-to-chain transform), `mps` (TEBD evolution),
`observables` (populations, photon numbers, field correlations) and
`scenarios` (end-to-end runs and CSV persistence).
"""

__version__ = "0.1.0"

from .atom import (  # noqa: F401
    AtomSpectrum,
    Potential,
    TwoLevelAtom,
    build_fgh_hamiltonian,
    diagonalize_atom,
    reduce_to_two_level,
)
from .chainmap import ChainTransform, chain_map, naive_chain_map, to_mode_basis  # noqa: F401
from .hamiltonians import DenseHamiltonian, FockTruncation, spectrum_gaps  # noqa: F401
from .modes import (  # noqa: F401
    Couplings,
    ModeBasis,
    PermittivityProfile,
    SpatialGrid,
    analytic_modes_pec,
    analytic_modes_periodic,
    calibrate_dipole,
    coupling_coefficients,
    numerical_modes,
)
from .mps import GateSet, MpsState, TruncationPolicy, build_gates, product_state, tebd_step  # noqa: F401
from .observables import (  # noqa: F401
    CorrelationMatrix,
    FieldMap,
    excited_population,
    field_correlation,
    photon_numbers,
)
from .scenarios import OutputBundle, RunConfig, parse_config, run_scenario, validate_config  # noqa: F401
