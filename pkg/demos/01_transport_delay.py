"""Transport: a pure delay and its minimal control time.

The scalar equation x_t = x_zeta moves data leftwards at unit speed. Driving
x(1) gives transfer function e^{-s}, and any target is reachable exactly
once the horizon exceeds one travel time.
"""

import numpy as np

from phbc import StateGrid, discretize, gramian, reach_error, synthesize, transfer
from phbc.models import transport_system

sys = transport_system()

print('transfer function against e^{-s}')
for s in (1.0, 2.0, 4.0, 10.0):
    G = transfer(sys, s).G[0, 0]
    print(f'  s = {s:5.1f}   G = {G.real:.10f}   e^-s = {np.exp(-s):.10f}')

N = 200
lti = discretize(sys, N, cfl=1.0)
target = StateGrid.from_function(lambda z: [np.exp(-((z - 0.5) / 0.1) ** 2)], N)

print('\nGramian spectrum against the horizon')
for horizon in (0.5, 0.9, 1.0, 1.5):
    K = int(round(horizon / lti.dt))
    g = gramian(lti, K)
    print(f'  T = {horizon:3.1f}   lambda_min = {g.lambda_min:.2e}   lambda_max = {g.lambda_max:.2e}')

K = int(round(1.5 / lti.dt))
u = synthesize(lti, target, K)
err, traj = reach_error(sys, lti, u, target)
print(f'\nminimum-norm control over T = 1.5: relative error {err:.1e}, '
      f'control energy {u.l2_norm():.3f}')
