"""Largest stable timestep of each scheme for the fastest wave on the grid.

The fastest resolvable inertia-gravity wave sits at the corner of the index
box.  Explicit schemes are limited by it; the implicit and exponential ones
are not.
"""

import math

from rswe_triads.spectral_core import GridSpec, PhysicalParams, frequency_grid
from rswe_triads.stability import Scheme, oscillatory_stability_limit

params = PhysicalParams.nondimensional(0.1)
omega_max = float(frequency_grid(params, GridSpec.square(32)).max())
print(f"omega_max = {omega_max:.3f}")

for name in ("FE", "RK2", "RK3", "RK4", "AB3", "TRAP", "BE", "TRBDF2", "ETD"):
    dt = oscillatory_stability_limit(Scheme.parse(name), omega_max)
    label = "unconditional" if math.isinf(dt) else f"{dt:.3e}"
    print(f"{name:>7}  {label}")
