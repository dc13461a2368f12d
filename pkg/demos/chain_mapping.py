"""Why the chain recursion needs stabilization.

Maps 100 linearly spaced modes onto a nearest-neighbor chain twice: with
the bare three-term recursion and with modified Gram-Schmidt applied to
every new row. The bare variant loses orthogonality catastrophically
around row ~40; the stabilized one tracks a 100-digit reference to
machine precision.

Run:  python3 demos/chain_mapping.py
"""

import numpy as np

from cavqed1d.chainmap import (
    chain_map,
    naive_chain_map,
    orthogonality_defect,
    reference_chain_map,
)

M = 100
omega = np.arange(1, M + 1, dtype=float)
g = 0.6 / np.sqrt(omega)

stab = chain_map(omega, g)
naive = naive_chain_map(omega, g)
xi_ref, t_ref = reference_chain_map(omega, g)

print(f"lumped coupling rho = {stab.rho:.6f}")
print(f"stabilized: defect {orthogonality_defect(stab):.2e}, "
      f"max |xi - xi_ref| = {np.max(np.abs(stab.xi - xi_ref)):.2e}")
print(f"naive:      defect {orthogonality_defect(naive):.2e}, "
      f"max |xi - xi_ref| = {np.max(np.abs(naive.xi - xi_ref)):.2e}")

print("\n   n   xi_stab   xi_naive   xi_ref")
for n in (0, 19, 39, 59, 79, 99):
    print(f"{n + 1:4d}  {stab.xi[n]:8.3f}  {naive.xi[n]:9.3f}  {xi_ref[n]:8.3f}")
print("\nthe naive column drifts off the reference once orthogonality is "
      "lost; the stabilized one never does.")
