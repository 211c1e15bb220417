"""Frequency ranges |Omega| of the ten interaction types at epsilon = 0.1 on a 32^2 grid.

Every resolvable triad is visited once; the slow-slow-slow type has Omega = 0
identically and the others spread over a few hundred units of frequency.
"""

import time

from rswe_triads.spectral_core import GridSpec, PhysicalParams
from rswe_triads.triads import ACRONYMS, PERMUTATION_COUNTS, frequency_ranges

params = PhysicalParams.nondimensional(0.1)
grid = GridSpec.square(32)

t0 = time.perf_counter()
ranges = frequency_ranges(params, grid, types="all", jobs=4)
print(f"{'type':>6} {'family':>6} {'perms':>5} {'min |Omega|':>12} {'max |Omega|':>12}")
for t, (lo, hi) in ranges.items():
    print(f"{t:>6} {ACRONYMS.get(t, '-'):>6} {PERMUTATION_COUNTS[t]:>5} {lo:12.2f} {hi:12.2f}")
print(f"enumerated in {time.perf_counter() - t0:.1f}s")
