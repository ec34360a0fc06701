"""When does a boundary condition for the string generate dynamics?

For x = (rho w_t, w_zeta) with H = diag(1/rho, T) one boundary input per
characteristic must enter. With rho = T = 1 and W1 = I, W0 = diag(-1, 1)
both rows only see the outgoing wave, so nothing controls the incoming one.
Replacing W0 by the identity, or grading the density, fixes this.
"""

import numpy as np

from phbc import IllPosedError, StateGrid, check_generation, discretize, energy_norm, transfer
from phbc.exceptions import SpectralPointError
from phbc.models import graded_wave, uniform_wave, wave_independence

cases = {
    'uniform, W0 = diag(-1, 1)': (uniform_wave(), (1, 1, 1, 1)),
    'uniform, W0 = I': (uniform_wave(W0=np.eye(2)), (1, 1, 1, 1)),
    'graded rho = (1 + zeta)^2': (graded_wave(), (4, 1, 1, 1)),
}

for name, (sys, (rho1, T1, rho0, T0)) in cases.items():
    rep = check_generation(sys)
    closed = wave_independence(sys.WB[:, :2], sys.WB[:, 2:], rho1, T1, rho0, T0)
    print(f'{name:28s} generates: {rep.holds!s:5s}  sigma_min(T_in) = {rep.sigma_min:.2e}  '
          f'closed form agrees: {closed == rep.holds}')

# observe the traces at zeta = 0
WC = np.hstack([np.zeros((2, 2)), np.eye(2)])

print('\nconsequences for the uniform string with W0 = diag(-1, 1)')
sys = uniform_wave(WC=WC)
try:
    transfer(sys, 2.0)
except SpectralPointError as exc:
    print(f'  transfer at s = 2: {exc}')
try:
    discretize(sys, 100)
except IllPosedError as exc:
    print(f'  simulation: {exc}')

sys = uniform_wave(W0=np.eye(2), WC=WC)
G = transfer(sys, 2.0).G
print(f'\nwith W0 = I the transfer function is finite, e.g. G(2) =\n{np.round(G, 6)}')
x = StateGrid.from_function(lambda z: [np.sin(np.pi * z), 0.0], 100)
print(f'and the scheme runs with dt = {discretize(sys, 100).dt:.4f}; initial energy {energy_norm(sys, x):.4f}')
