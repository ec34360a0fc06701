"""Time-domain simulation with boundary inputs.

Finite-volume Godunov scheme for ``dx/dt = P1 d/dzeta (Hx) + P0 Hx`` on N
uniform cells, H frozen at the cell centers. At every interface the effort
``e* = (Hx)*`` is the solution of the Riemann problem between the two cells:
the jump on the left is carried by the left cell's positive-speed
characteristics, the jump on the right by the right cell's negative-speed
characteristics. At the two ends the incoming characteristics are fixed by
the boundary condition ``WB [e*(1); e*(0)] = u``, an n x n solve with the
same matrix :func:`phbc.spectral.check_generation` inspects. The update is

    x_j <- x_j + dt/dzeta P1 (e*_{j+1/2} - e*_{j-1/2}) + (exp(dt P0 H_j) - I) x_j.

All operations are linear in ``(x, u)`` and vectorized over leading batch
axes, which :mod:`phbc.control` uses to assemble the one-step matrices.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .exceptions import CFLError, DimensionError, IllPosedError
from .spectral import hermitian_sqrt
from .systems import StateGrid, cell_centers, energy_norm

__all__ = ['Scheme', 'ControlSignal', 'Trajectory', 'step', 'simulate',
           'passivity_probe', 'energy']


@dataclass(frozen=True)
class ControlSignal:
    """Piecewise-constant input: ``samples[j]`` acts on ``[j dt, (j+1) dt)``."""

    samples: np.ndarray
    dt: float
    regularized: bool = False

    def __post_init__(self):
        s = np.array(self.samples, dtype=complex)
        if s.ndim == 1:
            s = s[:, None]
        if not np.all(np.isfinite(s)):
            raise ValueError('control samples must be finite')
        object.__setattr__(self, 'samples', s)

    @property
    def times(self):
        return np.arange(len(self.samples)) * self.dt

    def at(self, t):
        """Zero-order-hold value at times `t`; zero beyond the last sample."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = np.floor(t / self.dt + 1e-9).astype(int)
        out = np.zeros((len(t), self.samples.shape[1]), dtype=complex)
        ok = (idx >= 0) & (idx < len(self.samples))
        out[ok] = self.samples[idx[ok]]
        return out

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.samples) ** 2) * self.dt))


@dataclass
class Trajectory:
    """Recorded simulation.

    ``states[i]`` is the state at ``times[i]``; ``energy`` is half the squared
    energy norm. ``y[j]`` and ``u[j]`` are the output and input during step j.
    """

    states: np.ndarray
    times: np.ndarray
    energy: np.ndarray
    y: np.ndarray
    u: np.ndarray
    dt: float

    @property
    def final(self):
        return StateGrid(self.states[-1])

    def supplied_energy(self):
        """``int_0^T Re <u, y> dt`` (rectangle rule on the step grid)."""
        return float(np.sum(np.einsum('ki,ki->k', self.u.conj(), self.y).real) * self.dt)


def energy(sys, x):
    """Half the squared energy norm."""
    return 0.5 * energy_norm(sys, x) ** 2


class Scheme:
    """Precomputed Godunov scheme for one system on `N` cells.

    Parameters
    ----------
    sys : PHSystem
    N : int
        Number of cells.
    cfl : float
        Courant number ``dt max|lambda| / dzeta``; ignored if `dt` is given.
    dt : float, optional
        Explicit time step, must satisfy the CFL bound.
    """

    def __init__(self, sys, N, cfl=0.9, dt=None):
        if N < 2:
            raise ValueError('need at least two cells')
        self.sys = sys
        self.N = N
        n = sys.n
        self.dz = 1.0 / N
        Hc = sys.H(cell_centers(N))
        self.Hc = Hc

        lams, R = [], []
        for Hj in Hc:
            Hh, _ = hermitian_sqrt(Hj)
            C = Hh @ sys.P1 @ Hh
            lam, Q = np.linalg.eigh(0.5 * (C + C.conj().T))
            lams.append(lam[::-1])
            R.append(Hh @ Q[:, ::-1])
        lams = np.array(lams)
        R = np.array(R)
        npos = (lams > 0).sum(axis=1)
        if np.any(npos != npos[0]) or np.any(lams == 0):
            raise IllPosedError('characteristic speeds change sign along the domain')
        p = int(npos[0])
        self.n_pos = p
        self.max_speed = float(np.abs(lams).max())

        dt_max = self.dz / self.max_speed
        if dt is None:
            if not 0 < cfl <= 1:
                raise CFLError(f'cfl must lie in (0, 1], got {cfl}')
            dt = cfl * dt_max
        elif dt > dt_max * (1 + 1e-12):
            raise CFLError(f'dt={dt:.3e} exceeds CFL limit {dt_max:.3e}')
        self.dt = float(dt)
        self.dt_max = dt_max

        # interior interfaces: e* = e_L + Pi (e_R - e_L)
        U = R[:-1, :, :p]
        V = R[1:, :, p:]
        A = np.concatenate([U, -V], axis=2)
        UZ = np.concatenate([U, np.zeros_like(V)], axis=2)
        self.Pi = UZ @ np.linalg.inv(A)

        # boundary: incoming a at zeta=1 along U1, b at zeta=0 along V0
        self.U1 = R[-1, :, :p]
        self.V0 = R[0, :, p:]
        W1, W0 = sys.WB[:, :n], sys.WB[:, n:]
        T_in = np.hstack([W1 @ self.U1, W0 @ self.V0])
        sv = np.linalg.svd(T_in, compute_uv=False)
        if sv[-1] <= 1e-10 * np.linalg.norm(sys.WB, 2):
            raise IllPosedError('boundary condition does not determine the incoming '
                                f'characteristics (sigma_min={sv[-1]:.2e})')
        self.T_in_inv = np.linalg.inv(T_in)
        self.W1, self.W0 = W1, W0

        self.src = np.array([sla.expm(self.dt * sys.P0 @ Hj) for Hj in Hc]) - np.eye(n)
        self.has_src = bool(np.any(sys.P0 != 0))

    def efforts(self, x):
        return np.einsum('jab,...jb->...ja', self.Hc, x)

    def boundary_traces(self, x, u):
        """Efforts ``(e*(1), e*(0))`` at the two ends for state `x` and input `u`."""
        e = self.efforts(x)
        eR, eL = e[..., -1, :], e[..., 0, :]
        rhs = u - eR @ self.W1.T - eL @ self.W0.T
        ab = rhs @ self.T_in_inv.T
        p = self.n_pos
        return eR + ab[..., :p] @ self.U1.T, eL + ab[..., p:] @ self.V0.T

    def step(self, x, u):
        """Advance `x` (shape ``(..., N, n)``) by one step under input `u` (``(..., n)``).

        Returns ``(x_new, y)`` with ``y = WC [e*(1); e*(0)]``.
        """
        x = np.asarray(x, dtype=complex)
        u = np.asarray(u, dtype=complex)
        e = self.efforts(x)
        es = e[..., :-1, :] + np.einsum('jab,...jb->...ja', self.Pi, e[..., 1:, :] - e[..., :-1, :])
        e1, e0 = self.boundary_traces(x, u)
        F = np.concatenate([e0[..., None, :], es, e1[..., None, :]], axis=-2)
        x_new = x + (self.dt / self.dz) * (F[..., 1:, :] - F[..., :-1, :]) @ self.sys.P1.T
        if self.has_src:
            x_new = x_new + np.einsum('jab,...jb->...ja', self.src, x)
        y = np.concatenate([e1, e0], axis=-1) @ self.sys.WC.T
        return x_new, y


def step(sys, x, u_now, dt):
    """One time step of the scheme from state `x` (StateGrid or ``(N, n)`` array)."""
    v = x.values if isinstance(x, StateGrid) else np.asarray(x, dtype=complex)
    if v.ndim != 2 or v.shape[1] != sys.n:
        raise DimensionError(f'state must have shape (N, {sys.n})')
    scheme = Scheme(sys, v.shape[0], dt=dt)
    return StateGrid(scheme.step(v, np.asarray(u_now, dtype=complex))[0])


def _input_sampler(u, n):
    if u is None:
        return lambda t: np.zeros((len(t), n), dtype=complex)
    if isinstance(u, ControlSignal):
        return u.at
    if callable(u):
        return lambda t: np.array([np.atleast_1d(u(ti)) for ti in t], dtype=complex).reshape(len(t), n)
    raise TypeError('u must be a ControlSignal, a callable t -> n-vector or None')


def simulate(sys, x0, u, T, cfl=0.9, dt=None, feedback=None, scheme=None):
    """Simulate from `x0` over ``[0, T]``.

    Parameters
    ----------
    x0 : StateGrid or array, shape (N, n)
    u : ControlSignal, callable, or None
        Boundary input; sampled by zero-order hold on the step grid. If `u`
        is a :class:`ControlSignal` whose step satisfies the CFL bound, its
        step is used as the scheme step.
    T : float
        Final time; the step is shrunk so that T is hit exactly.
    feedback : array, optional
        Static output feedback ``u = v + feedback @ y``; applied by replacing
        WB with ``WB - feedback WC`` (the closed loop is again a boundary
        control system with input v).
    """
    if feedback is not None:
        from .control import output_feedback
        sys = output_feedback(sys, feedback)
    x = x0.values if isinstance(x0, StateGrid) else np.array(x0, dtype=complex)
    if x.ndim != 2 or x.shape[1] != sys.n:
        raise DimensionError(f'x0 must have shape (N, {sys.n})')
    N = x.shape[0]
    if scheme is None:
        dt_max = Scheme(sys, N, cfl=1.0).dt_max if dt is None else None
        if dt is None and isinstance(u, ControlSignal) and u.dt <= dt_max * (1 + 1e-12):
            dt = u.dt
        if dt is None:
            K = max(1, int(np.ceil(T / (cfl * dt_max) - 1e-9)))
            dt = T / K
        scheme = Scheme(sys, N, dt=dt)
    dt = scheme.dt
    K = int(round(T / dt))
    times = np.arange(K + 1) * dt
    us = _input_sampler(u, sys.n)(times[:-1])

    states = np.empty((K + 1, N, sys.n), dtype=complex)
    ys = np.empty((K, sys.k), dtype=complex)
    states[0] = x
    for j in range(K):
        x, ys[j] = scheme.step(x, us[j])
        states[j + 1] = x
    Hc = scheme.Hc
    E = 0.5 * np.einsum('kji,jil,kjl->k', states.conj(), Hc, states).real / N
    return Trajectory(states, times, E, ys, us, dt)


def _sbp_operators(M):
    """Second-order SBP first derivative on M nodes of [0, 1]: weights p and Q."""
    h = 1.0 / (M - 1)
    p = np.full(M, h)
    p[0] = p[-1] = h / 2
    Q = 0.5 * (np.eye(M, k=1) - np.eye(M, k=-1))
    Q[0, 0], Q[-1, -1] = -0.5, 0.5
    return p, Q


def passivity_probe(sys, trials=50, M=101, modes=4, seed=0):
    """Probe ``Re <A x, x> <= Re <B x, C x>`` on random smooth states.

    States are random trigonometric efforts ``e = Hx`` on M nodes; the
    left-hand side uses a summation-by-parts derivative, so its boundary
    terms are reproduced exactly at the discrete level.

    Returns
    -------
    passive : bool
    worst_violation : float
        Largest ``lhs - rhs`` over the trials, normalized by ``max |e|^2``.
    """
    if sys.k != sys.n:
        raise DimensionError(f'passivity probe needs k = n output, got k={sys.k}')
    rng = np.random.default_rng(seed)
    n = sys.n
    z = np.linspace(0.0, 1.0, M)
    p, Q = _sbp_operators(M)
    D = Q / p[:, None]
    band = 10.0 * (1.0 / (M - 1)) * np.linalg.norm(sys.P1, 2)
    worst = -np.inf
    for _ in range(trials):
        c = rng.standard_normal((modes, n)) + 1j * rng.standard_normal((modes, n))
        ph = rng.uniform(0, 2 * np.pi, (modes, n))
        k = np.arange(modes)[:, None]
        e = sum(c[i] * np.cos(np.pi * k[i] * z[:, None] + ph[i]) for i in range(modes))
        Ax = (D @ e) @ sys.P1.T + e @ sys.P0.T
        lhs = np.sum(p * np.einsum('ji,ji->j', Ax.conj(), e)).real
        tr = np.concatenate([e[-1], e[0]])
        rhs = np.vdot(sys.WB @ tr, sys.WC @ tr).real
        worst = max(worst, (lhs - rhs) / np.abs(e).max() ** 2)
    return bool(worst <= band), float(worst)
