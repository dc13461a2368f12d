"""Space-time map of the emitted field and its light-cone wavefront.

Runs a short periodic emission and prints a coarse ASCII rendering of
G1(x, t) together with the tracked wavefront position, which advances
one lattice circumnavigation per atomic period (speed c). The static
blob at x = 0 is the virtual-photon cloud bound to the ultrastrongly
coupled atom; the moving ridge is the emitted light.

Run:  python3 demos/field_correlation_map.py    (about a minute)
"""

from dataclasses import replace

import numpy as np

from cavqed1d.observables import wavefront_positions
from cavqed1d.scenarios import RunConfig, run_scenario

config = replace(
    RunConfig(),
    scenario="periodic",
    mode_count=10,
    photon_cutoff=5,
    bond_cap=16,
    periods=0.5,
    dt_over_period=0.002,
    field_positions=61,
    sample_every=10,
    output_dir="demo_out/fieldmap",
)
bundle, extras = run_scenario(config, return_extras=True)
fm = extras["fieldmap"]
L = 2.0 * np.pi

glyphs = " .:-=+*#%@"
peak = fm.values.max()
print("t/T   G1(x, t) for x/L in [-1/2, 1/2]")
for i in range(0, len(fm.times), 4):
    row = fm.values[i]
    line = "".join(glyphs[min(int(np.sqrt(v / peak) * (len(glyphs) - 1)), 9)] for v in row)
    print(f"{fm.times[i]:4.2f}  |{line}|")

fronts = wavefront_positions(fm, x_min=0.05 * L)
sel = fm.times >= 0.1
print("\nwavefront position (right-moving pulse):")
for t, x in zip(fm.times[sel][::4], fronts[sel][::4]):
    print(f"  t/T = {t:4.2f}   x/L = {x / L:+.3f}")
print(f"\nfull map: {bundle.files['fieldmap.csv']}")
