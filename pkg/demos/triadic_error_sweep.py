"""Mean triadic error against timestep for two dominant subsets.

With a cut-off of 0.1 only directly resonant fast-slow-fast triads survive;
a cut-off of 5 adds many near-resonances.  The script prints the errors on a
coarse timestep grid and locates where TR-BDF2 overtakes RK4.
"""

import numpy as np
from scipy.optimize import brentq

from rswe_triads.spectral_core import GridSpec, PhysicalParams
from rswe_triads.stability import Scheme
from rswe_triads.triadic_error import average_triadic_error
from rswe_triads.triads import enumerate_triads

params = PhysicalParams.nondimensional(0.1)
grid = GridSpec.square(32)
schemes = [Scheme.parse(s) for s in ("RK3", "RK4", "AB3", "TRAP", "TRBDF2")]
dts = [1e-4, 1e-3, 3e-3, 1e-2, 5e-2]

for cutoff in (0.1, 5.0):
    sub = enumerate_triads(params, grid, omega_cutoff=cutoff, jobs=4)
    counts = {t: n for t, n in sub.counts().items() if n}
    print(f"\ncut-off {cutoff}: {len(sub)} triads {counts}")
    print(f"{'dt':>8} " + " ".join(f"{s.name:>10}" for s in schemes))
    for dt in dts:
        print(f"{dt:8.0e} " + " ".join(f"{average_triadic_error(s, sub, dt):10.3e}" for s in schemes))

    diff = lambda dt: (average_triadic_error(Scheme.rk(4), sub, dt)
                       - average_triadic_error(Scheme("TRBDF2"), sub, dt))
    grid_dt = np.linspace(0.003, 0.01, 36)
    sign = np.sign([diff(dt) for dt in grid_dt])
    i = np.nonzero(np.diff(sign))[0][0]
    print(f"RK4 / TR-BDF2 crossover at dt = {brentq(diff, grid_dt[i], grid_dt[i + 1]):.5f}")
