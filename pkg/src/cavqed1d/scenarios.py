"""End-to-end runs: configuration, pipeline wiring, persistence.

A scenario stitches the pipeline together:
atom -> mode basis -> couplings -> chain map -> TEBD evolution ->
observables -> CSV files. Spectra sweeps, chain-map diagnostics and
coupling-profile comparisons reuse the same configuration format.

Configuration files are flat `key = value` text with '#' comments;
unknown keys are rejected. All lengths are expressed relative to the
cavity length L and times relative to the atomic period T = 2 pi / w_a.
"""

import hashlib
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace

import numpy as np

from . import __version__
from .atom import TwoLevelAtom, default_atom_spectrum
from .chainmap import chain_map, naive_chain_map, orthogonality_defect
from .csvio import write_csv
from .errors import ConfigurationError
from .hamiltonians import (
    FockTruncation,
    build_full_coulomb,
    build_full_dipole,
    build_rabi_coulomb_direct,
    build_rabi_coulomb_proper,
    build_rabi_dipole_direct,
    build_rabi_dipole_proper,
    converge_photon_cutoff,
    spectrum_gaps,
)
from .modes import (
    SpatialGrid,
    analytic_modes_pec,
    analytic_modes_periodic,
    calibrate_dipole,
    coupling_coefficients,
    load_permittivity_profile,
    numerical_modes,
    slab_profile,
)
from .mps import TruncationPolicy, build_gates, correlation_matrix, max_bond_dim, norm, product_state, tebd_step
from .observables import FieldMap, excited_population, field_correlation, photon_numbers

SCENARIOS = (
    "periodic",
    "pec_homogeneous",
    "pec_slab_adjacent",
    "pec_slab_embedded",
    "spectra_sweep",
    "chainmap_diagnostic",
    "coupling_profile",
)

DYNAMIC_SCENARIOS = SCENARIOS[:4]

RABI_VARIANTS = ("rabi_C_direct", "rabi_D_direct", "rabi_C_proper", "rabi_D_proper")


@dataclass
class RunConfig:
    scenario: str = "periodic"
    mode_count: int = 20            # coupled modes kept in the chain / spectra
    photon_cutoff: int = 6          # N per chain site (dynamics)
    bond_cap: int = 32              # d
    svd_cutoff: float = 1e-10
    dt_over_period: float = 0.001
    periods: float = 3.0
    atom_position_over_L: float = None  # None -> scenario default
    coupling_target: float = 0.6    # g_D,1 / w_1
    grid_points: int = 1001
    slab_center_over_L: float = -0.25
    slab_thickness_over_L: float = 0.125
    slab_eps: float = 4.0
    permittivity_file: str = ""
    field_positions: int = 201
    sample_every: int = 10
    use_randomized_svd: bool = False
    seed: int = 0
    # spectra sweep
    sweep_start: float = 0.0
    sweep_stop: float = 0.6
    sweep_count: int = 4
    spectra_variants: str = "rabi_C_direct,rabi_D_direct,rabi_C_proper,rabi_D_proper"
    spectra_gap_count: int = 8
    spectra_mode_count: int = 3
    photon_cutoff_start: int = 6
    photon_cutoff_max: int = 12
    atom_levels: int = 40           # retained for multilevel self-energy / full builders
    full_mode_count: int = 2
    full_photon_cutoff: int = 8
    # chain-map diagnostic
    chain_modes: int = 100
    jobs: int = 1
    output_dir: str = "out"


_DEFAULTS = RunConfig()
_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


@dataclass
class OutputBundle:
    files: dict
    config: RunConfig
    config_hash: str
    wall_time: float
    version: str = __version__


def _coerce(key, raw, lineno):
    default = getattr(_DEFAULTS, key)
    text = raw.strip()
    try:
        if key == "atom_position_over_L":
            return None if text.lower() in ("", "none", "auto") else float(text)
        if isinstance(default, bool):
            if text.lower() in ("true", "1", "yes", "on"):
                return True
            if text.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(text)
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
        return text
    except ValueError as exc:
        raise ConfigurationError(f"line {lineno}: cannot parse {key} = {raw!r}") from exc


def parse_config(text):
    """Parse flat key = value configuration text into a RunConfig."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in body.split("=", 1))
        if key not in _FIELD_TYPES:
            raise ConfigurationError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _coerce(key, raw, lineno)
    return replace(RunConfig(), **values)


def load_config(path):
    with open(path) as fh:
        return parse_config(fh.read())


def emit_config(config):
    """Canonical text form (round-trips through parse_config)."""
    lines = []
    for f in fields(RunConfig):
        v = getattr(config, f.name)
        if v is None:
            v = "auto"
        elif isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = repr(v)
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


def config_hash(config):
    """Hash of the physics configuration (execution-only keys excluded)."""
    lines = [
        ln
        for ln in emit_config(config).splitlines()
        if not ln.startswith(("output_dir ", "jobs "))
    ]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:12]


def validate_config(config):
    """List of violated constraints (empty when the config is usable)."""
    issues = []
    if config.scenario not in SCENARIOS:
        issues.append(f"scenario: unknown value {config.scenario!r}")
    positive = (
        "mode_count", "photon_cutoff", "bond_cap", "dt_over_period", "periods",
        "grid_points", "field_positions", "sample_every", "slab_eps",
        "spectra_gap_count", "spectra_mode_count", "photon_cutoff_start",
        "photon_cutoff_max", "atom_levels", "full_mode_count",
        "full_photon_cutoff", "chain_modes", "jobs", "sweep_count",
        "slab_thickness_over_L",
    )
    for key in positive:
        if getattr(config, key) <= 0:
            issues.append(f"{key}: must be positive")
    if config.photon_cutoff < 2:
        issues.append("photon_cutoff: must be >= 2")
    if not (0.0 <= config.svd_cutoff < 1.0):
        issues.append("svd_cutoff: must lie in [0, 1)")
    if config.coupling_target < 0:
        issues.append("coupling_target: must be >= 0")
    if config.sweep_stop < config.sweep_start:
        issues.append("sweep_stop: must be >= sweep_start")
    if config.atom_position_over_L is not None and not (
        -0.5 <= config.atom_position_over_L <= 0.5
    ):
        issues.append("atom_position_over_L: must lie in [-0.5, 0.5]")
    if not (-0.5 <= config.slab_center_over_L <= 0.5):
        issues.append("slab_center_over_L: must lie in [-0.5, 0.5]")
    for v in config.spectra_variants.split(","):
        if v.strip() not in RABI_VARIANTS + ("full_C", "full_D"):
            issues.append(f"spectra_variants: unknown variant {v.strip()!r}")
    if config.permittivity_file and not os.path.exists(config.permittivity_file):
        issues.append(f"permittivity_file: {config.permittivity_file!r} not found")
    return issues


def _require_valid(config):
    issues = validate_config(config)
    if issues:
        raise ConfigurationError("invalid configuration: " + "; ".join(issues))


def _atom_position(config, length):
    if config.atom_position_over_L is not None:
        return config.atom_position_over_L * length
    if config.scenario == "pec_slab_embedded":
        return config.slab_center_over_L * length
    return 0.0


def _build_setting(config):
    """Mode basis + calibrated atom + couplings for a dynamic scenario."""
    omega_a = 1.0
    lam = 2.0 * np.pi  # c = omega_a = 1
    if config.scenario == "periodic":
        grid = SpatialGrid(lam, config.grid_points, periodic=True)
        basis = analytic_modes_periodic(config.mode_count + 2, omega_a, grid)
    else:
        grid = SpatialGrid(0.5 * lam, config.grid_points)
        if config.scenario == "pec_homogeneous":
            basis = analytic_modes_pec(2 * config.mode_count + 2, omega_a, grid)
        else:
            if config.permittivity_file:
                profile = load_permittivity_profile(config.permittivity_file, grid)
            else:
                profile = slab_profile(
                    grid,
                    config.slab_center_over_L * grid.length,
                    config.slab_thickness_over_L * grid.length,
                    config.slab_eps,
                )
            basis = numerical_modes(
                profile, grid, "pec", min(2 * config.mode_count + 5, grid.n_points // 4)
            )
    r0 = _atom_position(config, grid.length)
    atom = TwoLevelAtom(omega_a, 1.0, r0)
    atom = calibrate_dipole(basis, atom, config.coupling_target)
    couplings = coupling_coefficients(basis, atom)
    coupled_idx = np.nonzero(couplings.coupled_mask)[0][: config.mode_count]
    if len(coupled_idx) < config.mode_count:
        raise ConfigurationError(
            f"only {len(coupled_idx)} coupled modes available; lower mode_count"
        )
    return basis, atom, couplings, coupled_idx


def _meta(config, extra=None):
    meta = {
        "config_hash": config_hash(config),
        "scenario": config.scenario,
        "version": __version__,
        "units": "t_in_T;x_in_L;G1_in_hw_a_over_2e0L",
    }
    if extra:
        meta.update(extra)
    return meta


def _run_dynamics(config, outdir):
    basis, atom, couplings, coupled_idx = _build_setting(config)
    omega_c = couplings.omega[coupled_idx]
    g_c = couplings.g_D[coupled_idx]
    chain = chain_map(omega_c, g_c)
    sub_basis = basis.subset(coupled_idx[: chain.M_c])

    period = 2.0 * np.pi / atom.omega_a
    dt = config.dt_over_period * period
    n_steps = int(round(config.periods / config.dt_over_period))
    gates = build_gates(atom, chain, dt, config.photon_cutoff)
    policy = TruncationPolicy(
        max_bond=config.bond_cap,
        svd_cutoff=config.svd_cutoff,
        use_randomized_svd=config.use_randomized_svd,
        seed=config.seed,
    )
    state = product_state("e", chain.M_c, config.photon_cutoff)

    positions = np.linspace(-0.5, 0.5, config.field_positions) * basis.grid.length
    pop_rows = [(0.0, excited_population(state))]
    diag_rows = [(0, 0.0, 1.0, 1, 0.0)]
    photon_rows = []
    field_rows = []
    field_values = []
    sample_times = []

    def sample(step, t_over_T):
        B = correlation_matrix(state)
        nk = photon_numbers(B, chain)
        for k in range(chain.M_c):
            photon_rows.append((t_over_T, k + 1, omega_c[k], nk[k]))
        g1 = field_correlation(B, chain, sub_basis, positions)
        for x, v in zip(positions / basis.grid.length, g1):
            field_rows.append((t_over_T, x, v))
        field_values.append(g1)
        sample_times.append(t_over_T)

    sample(0, 0.0)
    total_discarded = 0.0
    for step in range(1, n_steps + 1):
        state, report = tebd_step(state, gates, policy)
        total_discarded += sum(report.values())
        t_over_T = step * config.dt_over_period
        pop_rows.append((t_over_T, excited_population(state)))
        diag_rows.append((step, t_over_T, norm(state), max_bond_dim(state), total_discarded))
        if step % config.sample_every == 0:
            sample(step, t_over_T)

    meta = _meta(config, {"coupled_modes": chain.M_c, "g1_prefactor": "1/(2L)"})
    if config.scenario.startswith("pec_slab"):
        meta["slab_center_over_L"] = config.slab_center_over_L
        meta["slab_thickness_over_L"] = config.slab_thickness_over_L
        meta["slab_eps"] = config.slab_eps
    files = {}
    files["population.csv"] = _write(outdir, "population.csv", ("time_over_T", "pop"), pop_rows, meta)
    files["photons.csv"] = _write(
        outdir, "photons.csv", ("time_over_T", "k", "omega_k_over_wa", "n_k"), photon_rows, meta
    )
    files["fieldmap.csv"] = _write(
        outdir, "fieldmap.csv", ("time_over_T", "x_over_L", "g1"), field_rows, meta
    )
    files["tebd_diagnostics.csv"] = _write(
        outdir,
        "tebd_diagnostics.csv",
        ("step", "time_over_T", "norm", "max_bond", "total_discarded_weight"),
        diag_rows,
        meta,
    )
    fieldmap = FieldMap(np.array(sample_times), positions, np.array(field_values))
    return files, {"fieldmap": fieldmap, "chain": chain, "population": np.array(pop_rows)}


def _spectra_point(args):
    (target, variants, config, spec_data) = args
    omega_a = 1.0
    grid = SpatialGrid(np.pi, 257)
    basis = analytic_modes_pec(
        2 * max(config.spectra_mode_count, config.full_mode_count) + 1, omega_a, grid
    )
    atom = calibrate_dipole(basis, TwoLevelAtom(omega_a, 1.0, 0.0), target)
    couplings = coupling_coefficients(basis, atom)
    n_gaps = config.spectra_gap_count

    if any(v in RABI_VARIANTS for v in variants):
        def build12(N):
            return build_rabi_dipole_proper(
                atom, couplings, FockTruncation(config.spectra_mode_count, N), real_form=True
            )
        n_conv, _ = converge_photon_cutoff(
            build12,
            n_gaps=n_gaps - 1,
            start=config.photon_cutoff_start,
            max_cutoff=config.photon_cutoff_max,
        )
        trunc = FockTruncation(config.spectra_mode_count, n_conv)

    def gaps_for(variant):
        if variant in ("full_C", "full_D"):
            tr_full = FockTruncation(config.full_mode_count, config.full_photon_cutoff)
            build = build_full_coulomb if variant == "full_C" else build_full_dipole
            h = build(spec_data, basis, couplings, tr_full, config.atom_levels, real_form=True)
            return spectrum_gaps(h, n_gaps)
        builders = {
            "rabi_C_direct": lambda: build_rabi_coulomb_direct(atom, couplings, trunc, real_form=True),
            "rabi_D_direct": lambda: build_rabi_dipole_direct(spec_data, basis, couplings, trunc, real_form=True),
            "rabi_C_proper": lambda: build_rabi_coulomb_proper(atom, couplings, trunc, real_form=True),
            "rabi_D_proper": lambda: build_rabi_dipole_proper(atom, couplings, trunc, real_form=True),
        }
        return spectrum_gaps(builders[variant](), n_gaps)

    rows = []
    for variant in variants:
        for i, gap in enumerate(gaps_for(variant)):
            rows.append((target, variant, i, gap))
    return rows


def _run_spectra(config, outdir):
    variants = [v.strip() for v in config.spectra_variants.split(",") if v.strip()]
    needs_spec = any(v in ("full_C", "full_D", "rabi_D_direct") for v in variants)
    spec_data = default_atom_spectrum(config.atom_levels) if needs_spec else None
    targets = np.linspace(config.sweep_start, config.sweep_stop, config.sweep_count)
    args = [(float(t), variants, config, spec_data) for t in targets]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_spectra_point, args))
    else:
        results = [_spectra_point(a) for a in args]
    rows = [row for chunk in results for row in chunk]
    meta = _meta(config, {"gap_normalization": "omega_1"})
    files = {
        "spectra.csv": _write(
            outdir, "spectra.csv", ("g_over_w1", "variant", "level_index", "gap"), rows, meta
        )
    }
    return files, {"rows": rows}


def _chain_rows(transform, omega_a):
    rows = []
    U = transform.U
    gram = np.zeros((transform.M_c, transform.M_c))
    for n in range(transform.M_c):
        gram[n, : n + 1] = U[: n + 1] @ U[n]
        gram[: n + 1, n] = gram[n, : n + 1]
        defect = float(np.max(np.abs(gram[: n + 1, : n + 1] - np.eye(n + 1))))
        rows.append((n + 1, transform.xi[n] / omega_a, transform.t[n] / omega_a, defect))
    return rows


def _run_chainmap(config, outdir):
    omega_a = 1.0
    omega = omega_a * np.arange(1, config.chain_modes + 1, dtype=float)
    g = config.coupling_target * omega_a / np.sqrt(omega / omega_a)
    stab = chain_map(omega, g)
    naive = naive_chain_map(omega, g)
    meta = _meta(
        config,
        {
            "profile": "omega_k=k*wa;g_k~1/sqrt(omega_k)",
            "stabilized_defect": f"{orthogonality_defect(stab):.3e}",
            "naive_defect": f"{orthogonality_defect(naive):.3e}",
        },
    )
    files = {
        "chainmap_stabilized.csv": _write(
            outdir,
            "chainmap_stabilized.csv",
            ("n", "xi_over_wa", "t_over_wa", "orthogonality_defect"),
            _chain_rows(stab, omega_a),
            meta,
        ),
        "chainmap_naive.csv": _write(
            outdir,
            "chainmap_naive.csv",
            ("n", "xi_over_wa", "t_over_wa", "orthogonality_defect"),
            _chain_rows(naive, omega_a),
            meta,
        ),
    }
    return files, {"stabilized": stab, "naive": naive}


def _run_coupling_profile(config, outdir):
    omega_a = 1.0
    grid = SpatialGrid(np.pi, config.grid_points)
    profile = slab_profile(
        grid,
        config.slab_center_over_L * grid.length,
        config.slab_thickness_over_L * grid.length,
        config.slab_eps,
    )
    basis = numerical_modes(profile, grid, "pec", 2 * config.mode_count + 5)
    ratios = {}
    for name, pos in (
        ("adjacent", 0.0),
        ("embedded", config.slab_center_over_L * grid.length),
    ):
        atom = TwoLevelAtom(omega_a, 1.0, pos)
        atom = calibrate_dipole(basis, atom, config.coupling_target)
        c = coupling_coefficients(basis, atom)
        ratios[name] = np.abs(c.g_D / c.omega)
    rows = []
    for k in range(min(config.mode_count, len(basis))):
        rows.append(
            (k + 1, basis.frequencies[k] / omega_a, ratios["adjacent"][k], ratios["embedded"][k])
        )
    meta = _meta(config, {"normalization": "abs(g_D_k/omega_k);dipole_recalibrated_per_placement"})
    files = {
        "coupling_profile.csv": _write(
            outdir,
            "coupling_profile.csv",
            ("k", "omega_k_over_wa", "g_over_w_adjacent", "g_over_w_embedded"),
            rows,
            meta,
        )
    }
    return files, {"rows": rows, "basis": basis}


def _write(outdir, name, columns, rows, meta):
    path = os.path.join(outdir, name)
    write_csv(path, columns, rows, meta)
    return path


def run_scenario(config, out_dir=None, return_extras=False):
    """Execute one scenario end to end; emits CSVs and returns the bundle."""
    _require_valid(config)
    outdir = out_dir or config.output_dir
    os.makedirs(outdir, exist_ok=True)
    start = time.perf_counter()

    if config.scenario in DYNAMIC_SCENARIOS:
        files, extras = _run_dynamics(config, outdir)
    elif config.scenario == "spectra_sweep":
        files, extras = _run_spectra(config, outdir)
    elif config.scenario == "chainmap_diagnostic":
        files, extras = _run_chainmap(config, outdir)
    elif config.scenario == "coupling_profile":
        files, extras = _run_coupling_profile(config, outdir)
    else:  # pragma: no cover - guarded by validation
        raise ConfigurationError(f"unhandled scenario {config.scenario!r}")

    echo_path = os.path.join(outdir, "config_echo.cfg")
    with open(echo_path, "w") as fh:
        fh.write(emit_config(config))
    files["config_echo.cfg"] = echo_path

    manifest_rows = [(name, path) for name, path in sorted(files.items())]
    manifest_path = os.path.join(outdir, "manifest.csv")
    write_csv(manifest_path, ("file", "path"), manifest_rows, _meta(config))
    files["manifest.csv"] = manifest_path

    bundle = OutputBundle(
        files=files,
        config=config,
        config_hash=config_hash(config),
        wall_time=time.perf_counter() - start,
    )
    if return_extras:
        return bundle, extras
    return bundle
