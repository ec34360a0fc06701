"""Energy balance for the string driven by boundary velocities.

With input the boundary flow and output the boundary effort the energy
obeys dE/dt = Re <u, y>. The discrete balance holds up to a defect that
shrinks at first order in the cell size for compatible data.
"""

import numpy as np

from phbc import StateGrid, simulate
from phbc.models import energy_preserving_wave

sys = energy_preserving_wave()
rng = np.random.default_rng(4)
a = rng.standard_normal((3, 2))
k = np.arange(1, 4)[:, None]
u = lambda t: (a * np.sin(k * np.pi * t / 2)).sum(axis=0)

prev = None
for N in (50, 100, 200, 400):
    traj = simulate(sys, StateGrid.zeros(N, 2), u, 2.0)
    supplied = traj.supplied_energy()
    defect = abs(traj.energy[-1] - traj.energy[0] - supplied)
    rate = '' if prev is None else f'   order {np.log2(prev / defect):.2f}'
    print(f'N = {N:4d}   E(T) = {traj.energy[-1]:.5f}   supplied = {supplied:.5f}   '
          f'defect = {defect:.2e}{rate}')
    prev = defect
