"""Bundled example systems.

Transport
    ``dx/dt = dx/dzeta`` on (0, 1), scalar, H = 1. Information enters at
    zeta = 1, so the input ``u = x(1)`` (``WB = [1 0]``) is well posed.

Vibrating string
    State ``x = (rho w_t, w_zeta)``, ``H = diag(1/rho, T)``, ``P1 = [[0, 1], [1, 0]]``.
    ``Hx = (w_t, T w_zeta)`` is (velocity, force). With ``gamma = sqrt(T / rho)``
    the boundary condition ``W1 (Hx)(1) + W0 (Hx)(0) = u`` is well posed iff
    ``W1 [gamma(1); T(1)]`` and ``W0 [-gamma(0); T(0)]`` are linearly independent.
"""

import numpy as np

from .boundary import to_trace_matrices
from .systems import MatrixField, PHSystem

__all__ = ['transport_system', 'wave_system', 'wave_independence', 'uniform_wave',
           'graded_wave', 'energy_preserving_wave', 'SWAP', 'DEFAULT_W1', 'DEFAULT_W0']

SWAP = np.array([[0.0, 1.0], [1.0, 0.0]])
DEFAULT_W1 = np.eye(2)
DEFAULT_W0 = np.diag([-1.0, 1.0])


def transport_system(WB=(1.0, 0.0), WC=(0.0, 1.0)):
    """Scalar transport ``x_t = x_zeta`` with ``u = WB [x(1); x(0)]``, ``y = WC [x(1); x(0)]``."""
    return PHSystem(P1=np.eye(1), H=MatrixField.constant(np.eye(1)),
                    WB=np.reshape(WB, (1, 2)),
                    WC=None if WC is None else np.reshape(WC, (-1, 2)))


def _profile(p):
    return p if callable(p) else (lambda z, c=float(p): np.full_like(np.asarray(z, float), c))


def wave_system(rho=1.0, T=1.0, W1=DEFAULT_W1, W0=DEFAULT_W0, WC=None, m=201):
    """String with mass density `rho` and Young's modulus `T` (constants or callables).

    ``WB = [W1 W0]`` acts on ``[(Hx)(1); (Hx)(0)]``. Constant profiles give a
    two-sample constant H; callables are sampled at `m` points.
    """
    rho_f, T_f = _profile(rho), _profile(T)
    if callable(rho) or callable(T):
        z = np.linspace(0.0, 1.0, m)
        r, t = rho_f(z), T_f(z)
        samples = np.zeros((m, 2, 2))
        samples[:, 0, 0] = 1.0 / r
        samples[:, 1, 1] = t
        H = MatrixField(samples)
    else:
        H = MatrixField.constant(np.diag([1.0 / float(rho), float(T)]))
    WB = np.hstack([np.asarray(W1, dtype=complex), np.asarray(W0, dtype=complex)])
    return PHSystem(P1=SWAP, H=H, WB=WB, WC=WC)


def wave_independence(W1, W0, rho1, T1, rho0, T0, rtol=1e-10):
    """Closed-form well-posedness test for the string.

    True iff ``W1 [gamma(1); T(1)]`` and ``W0 [-gamma(0); T(0)]`` are linearly
    independent (relative threshold on the smaller singular value).
    """
    g1, g0 = np.sqrt(T1 / rho1), np.sqrt(T0 / rho0)
    a = np.asarray(W1, dtype=complex) @ np.array([g1, T1])
    b = np.asarray(W0, dtype=complex) @ np.array([-g0, T0])
    # normalize so the verdict does not depend on column scaling
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return False
    sv = np.linalg.svd(np.column_stack([a / na, b / nb]), compute_uv=False)
    return bool(sv[-1] > rtol)


def uniform_wave(W1=DEFAULT_W1, W0=DEFAULT_W0, WC=None):
    """String with ``rho = T = 1``."""
    return wave_system(1.0, 1.0, W1, W0, WC=WC)


def graded_wave(W1=DEFAULT_W1, W0=DEFAULT_W0, WC=None, m=201):
    """String with ``rho = (1 + zeta)^2`` and ``T = 1``.

    Speeds ``1 / (1 + zeta)``, travel time 3/2. Here ``gamma(1) = 1/2`` and
    ``gamma(0) = 1``, so the default ``W1 = I, W0 = diag(-1, 1)`` is well posed.
    """
    return wave_system(lambda z: (1.0 + z) ** 2, 1.0, W1, W0, WC=WC, m=m)


def energy_preserving_wave(system_factory=uniform_wave):
    """String whose input is the boundary flow and whose output is the boundary effort.

    Flow/effort form ``WB = [I 0]``, ``WC = [0 I]``, so ``dE/dt = Re <u, y>``.
    """
    n = 2
    WB_fe = np.hstack([np.eye(n), np.zeros((n, n))])
    WC_fe = np.hstack([np.zeros((n, n)), np.eye(n)])
    WB = to_trace_matrices(SWAP, WB_fe)
    WC = to_trace_matrices(SWAP, WC_fe)
    return system_factory(W1=WB[:, :n], W0=WB[:, n:], WC=WC)
