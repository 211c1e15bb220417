"""Energy exchange through a directly resonant fast-slow-fast triad.

Two waves (5,0,+) and (-5,5,S) start with equal amplitude.  The triad closes
on (0,5,+), which has the same frequency as (5,0,+), so energy drains from
one fast wave into the other.  Usage: ``python3 resonant_transfer.py [dt] [t_end]``.
"""

import sys

import numpy as np

from rswe_triads.solver import integrate
from rswe_triads.spectral_core import WaveIndex, project_spectral_amplitudes
from rswe_triads.testcases import canonical_case, characteristic_velocities

dt = float(sys.argv[1]) if len(sys.argv) > 1 else 1e-3
t_end = float(sys.argv[2]) if len(sys.argv) > 2 else 50.0

case = canonical_case("case2a")
traj = integrate(case.initial_state(), case.solver_config("RK4", dt=dt, t_end=t_end), case.params, case.grid)

watch = {"psi1 (5,0,+)": WaveIndex(5, 0, 1), "psi2 (-5,5,S)": WaveIndex(-5, 5, 0),
         "psi3 (0,5,+)": WaveIndex(0, 5, 1)}
print(f"{'t':>6} " + " ".join(f"{k:>14}" for k in watch))
for n in range(0, len(traj), max(1, len(traj) // 10)):
    amps = project_spectral_amplitudes(traj.coeffs[n], case.params, case.grid)
    print(f"{traj.times[n]:6.1f} " + " ".join(f"{abs(amps[w]):14.5f}" for w in watch.values()))

amps = project_spectral_amplitudes(traj.final, case.params, case.grid)
E = np.abs(amps.sigma) ** 2
zx, zy = np.broadcast_to(case.grid.zx, case.grid.shape), np.broadcast_to(case.grid.zy, case.grid.shape)
print(f"energy on multiples of 5: {E[:, (zx % 5 == 0) & (zy % 5 == 0)].sum() / E.sum():.4f}")
_, u_max = characteristic_velocities(traj)
print(f"mean max speed {u_max:.4f}: Ro = {u_max / (case.params.f * 2 * np.pi):.5f}, Fr = {u_max / case.params.c:.5f}")
