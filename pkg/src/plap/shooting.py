"""Independent verification by shooting on the first-order system.

The state is (u, v) with v = phi_p(u'), in which the vector field

    u' = phi_p^{-1}(v),    v' = q(x) phi_p(u) - lambda m(x) f(u)

is continuous for every p > 1 (the second-order form is degenerate or
singular at critical points of u).  Integration is fixed-step RK4;
step count is the accuracy knob.  Coefficients are evaluated
analytically from their named families, never interpolated from a grid,
so results obtained here are independent of the finite-difference path.

Periodic solutions are located as zeros of the time-T mismatch
(u(T)-u(0), v(T)-v(0)).  For the homogeneous eigenvalue form the scale
invariance reduces the search to the unit circle of initial states,
leaving a one-dimensional angle search; for genuinely nonlinear f a
two-dimensional Newton iteration with finite-difference Jacobian is
used.  For p < 2 the initial value problem can lose uniqueness at
degenerate points; the oracle reports what it integrates and cannot
certify uniqueness there.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .errors import OracleFailure
from .nonlinearity import NonlinearitySpec
from .problem import CoefficientSpec, PExponent, ProblemSpec, phi_p

log = logging.getLogger("plap.shooting")

DEFAULT_STEPS = 4096
MIN_STEPS = 512


@dataclass(frozen=True)
class IvpSetup:
    p: float
    T: float
    lam: float
    q: CoefficientSpec
    m: CoefficientSpec
    nonlinearity: Optional[NonlinearitySpec] = None
    steps: int = DEFAULT_STEPS

    def __post_init__(self):
        if self.steps < MIN_STEPS:
            raise OracleFailure(f"integrator needs at least {MIN_STEPS} steps")

    @staticmethod
    def from_problem(spec: ProblemSpec, lam: float,
                     nonlinearity: Optional[NonlinearitySpec] = None,
                     steps: int = DEFAULT_STEPS) -> "IvpSetup":
        c = spec.coeffs
        if c.q_spec is None or c.m_spec is None:
            raise OracleFailure(
                "shooting needs named coefficient families; raw samples cannot "
                "be evaluated off the grid")
        return IvpSetup(p=spec.p.p, T=spec.grid.T, lam=float(lam),
                        q=c.q_spec, m=c.m_spec, nonlinearity=nonlinearity,
                        steps=steps)

    def _kernel_args(self):
        f = self.nonlinearity
        if f is None:
            fc, fp = 0, np.array([self.p])
        elif f.kernel_code is not None:
            fc, fp = f.kernel_code, np.asarray(f.kernel_params, dtype=float)
        else:
            return None
        return (self.p, self.lam, self.T, self.steps,
                self.q.kind_code, self.q.kernel_params(),
                self.m.kind_code, self.m.kernel_params(), fc, fp)


@dataclass(frozen=True)
class PeriodicityMismatch:
    du: float
    dv: float

    @property
    def norm(self) -> float:
        return math.hypot(self.du, self.dv)


@dataclass(frozen=True)
class IntegrateResult:
    u: float
    v: float
    overflow: bool


def _rk4_callback_batch(setup: IvpSetup, u0, v0):
    """Generic fallback for nonlinearities without kernel codes."""
    p = setup.p
    q = lambda x: setup.q.evaluate(x, setup.T)
    m = lambda x: setup.m.evaluate(x, setup.T)
    f = setup.nonlinearity.evaluate
    u = np.array(u0, dtype=float)
    v = np.array(v0, dtype=float)
    hstep = setup.T / setup.steps
    alive = np.ones(u.shape, dtype=bool)

    def rhs(x, uu, vv):
        du = np.sign(vv) * np.abs(vv) ** (1.0 / (p - 1.0))
        dv = q(x) * phi_p(p, uu) - setup.lam * m(x) * f(uu)
        return du, np.asarray(dv, dtype=float)

    for i in range(setup.steps):
        x = i * hstep
        k1u, k1v = rhs(x, u, v)
        k2u, k2v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k1u, v + 0.5 * hstep * k1v)
        k3u, k3v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k2u, v + 0.5 * hstep * k2v)
        k4u, k4v = rhs(x + hstep, u + hstep * k3u, v + hstep * k3v)
        un = u + hstep * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0
        vn = v + hstep * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        u = np.where(alive, un, u)
        v = np.where(alive, vn, v)
        alive &= (np.abs(u) <= _kernels.OVERFLOW_LIMIT) & (np.abs(v) <= _kernels.OVERFLOW_LIMIT)
        if not alive.any():
            break
    return u, v, ~alive


def integrate_batch(setup: IvpSetup, u0, v0):
    """End states (uT, vT, overflow) for a batch of initial states."""
    u0 = np.atleast_1d(np.asarray(u0, dtype=float))
    v0 = np.atleast_1d(np.asarray(v0, dtype=float))
    args = setup._kernel_args()
    if args is None:
        return _rk4_callback_batch(setup, u0, v0)
    return _kernels.rk4_batch(u0, v0, *args)


def integrate(setup: IvpSetup, u0: float, v0: float) -> IntegrateResult:
    """RK4 end state after one period; overflow (|state| > 1e12) is flagged
    on the result, not raised."""
    uT, vT, ov = integrate_batch(setup, [u0], [v0])
    return IntegrateResult(float(uT[0]), float(vT[0]), bool(ov[0]))


def trajectory(setup: IvpSetup, u0: float, v0: float):
    """Dense orbit sampled at every RK4 step: arrays of length steps+1."""
    args = setup._kernel_args()
    if args is None:
        hstep = setup.T / setup.steps
        us = np.empty(setup.steps + 1)
        vs = np.empty(setup.steps + 1)
        us[0], vs[0] = u0, v0
        state_u, state_v = float(u0), float(v0)
        p = setup.p
        q = lambda x: setup.q.evaluate(x, setup.T)
        m = lambda x: setup.m.evaluate(x, setup.T)
        f = setup.nonlinearity.evaluate

        def rhs(x, uu, vv):
            du = math.copysign(abs(vv) ** (1.0 / (p - 1.0)), vv) if vv else 0.0
            dv = float(q(x)) * phi_p(p, uu) - setup.lam * float(m(x)) * float(f(uu))
            return du, dv

        for i in range(setup.steps):
            x = i * hstep
            k1u, k1v = rhs(x, state_u, state_v)
            k2u, k2v = rhs(x + 0.5 * hstep, state_u + 0.5 * hstep * k1u, state_v + 0.5 * hstep * k1v)
            k3u, k3v = rhs(x + 0.5 * hstep, state_u + 0.5 * hstep * k2u, state_v + 0.5 * hstep * k2v)
            k4u, k4v = rhs(x + hstep, state_u + hstep * k3u, state_v + hstep * k3v)
            state_u += hstep * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0
            state_v += hstep * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
            if abs(state_u) > _kernels.OVERFLOW_LIMIT or abs(state_v) > _kernels.OVERFLOW_LIMIT:
                us[i + 1:] = state_u
                vs[i + 1:] = state_v
                return us, vs, True
            us[i + 1] = state_u
            vs[i + 1] = state_v
        return us, vs, False
    return _kernels.rk4_trajectory(float(u0), float(v0), *args)


def mismatch(setup: IvpSetup, u0: float, v0: float) -> PeriodicityMismatch:
    res = integrate(setup, u0, v0)
    if res.overflow:
        return PeriodicityMismatch(du=1e30, dv=1e30)
    return PeriodicityMismatch(du=res.u - u0, dv=res.v - v0)


def _golden_min(fn, a, b, xtol, max_iter=200):
    """Golden-section minimization of a unimodal function on [a, b]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iter):
        if b - a <= xtol:
            break
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = fn(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = fn(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def angle_mismatch_profile(setup: IvpSetup, n_angles: int = 48):
    """Mismatch norms over a uniform angle grid on the unit circle of
    initial states (homogeneous form)."""
    theta = np.linspace(0.0, 2.0 * np.pi, n_angles, endpoint=False)
    uT, vT, ov = integrate_batch(setup, np.cos(theta), np.sin(theta))
    du = uT - np.cos(theta)
    dv = vT - np.sin(theta)
    miss = np.hypot(du, dv)
    miss[ov] = 1e30
    return theta, miss


def min_angle_mismatch(setup: IvpSetup, n_angles: int = 48,
                       theta_hint: Optional[float] = None,
                       xtol: float = 1e-10) -> Tuple[float, float]:
    """Smallest periodicity mismatch over the initial angle, refined by
    golden section around the best coarse angle (or around a hint)."""
    if theta_hint is None:
        theta, miss = angle_mismatch_profile(setup, n_angles)
        k = int(np.argmin(miss))
        width = 2.0 * np.pi / n_angles
        center = theta[k]
    else:
        center = float(theta_hint)
        width = 2.0 * np.pi / n_angles

    def fn(t):
        return mismatch(setup, math.cos(t), math.sin(t)).norm

    t_best, f_best = _golden_min(fn, center - width, center + width, xtol)
    return t_best % (2.0 * math.pi), f_best


def find_periodic(setup: IvpSetup, seed_grid: Sequence, accept_tol: float = 1e-4,
                  dedup_tol: float = 1e-6) -> list:
    """Initial states (u0, v0) of periodic orbits found from the seeds.

    Homogeneous form (no nonlinearity, or f with unit limits named
    'phi_p'): seeds are angles and the search stays on the unit circle.
    Nonlinear form: seeds are (u0, v0) pairs polished by a 2-D damped
    Newton iteration with finite-difference Jacobian.  An empty list is a
    valid result.
    """
    homogeneous = setup.nonlinearity is None or setup.nonlinearity.name == "phi_p"
    found = []
    if homogeneous:
        for seed in seed_grid:
            t, fval = min_angle_mismatch(setup, theta_hint=float(seed))
            if fval <= accept_tol:
                found.append((math.cos(t), math.sin(t)))
    else:
        for seed in seed_grid:
            u0, v0 = float(seed[0]), float(seed[1])
            state = _newton2d(setup, u0, v0)
            if state is not None:
                found.append(state)
    unique = []
    for s in found:
        if not any(abs(s[0] - t[0]) + abs(s[1] - t[1]) < dedup_tol for t in unique):
            unique.append(s)
    return unique


def _newton2d(setup: IvpSetup, u0: float, v0: float, tol: float = 1e-10,
              max_iter: int = 50):
    """Damped 2-D Newton on the mismatch map; returns a root or None."""
    state = np.array([u0, v0], dtype=float)
    mm = mismatch(setup, state[0], state[1])
    fnorm = mm.norm
    scale = 1.0 + abs(u0) + abs(v0)
    for _ in range(max_iter):
        if fnorm <= tol * scale:
            return float(state[0]), float(state[1])
        F = np.array([mm.du, mm.dv])
        J = np.empty((2, 2))
        delta = 1e-7 * scale
        for j in range(2):
            probe = state.copy()
            probe[j] += delta
            mp = mismatch(setup, probe[0], probe[1])
            J[:, j] = (np.array([mp.du, mp.dv]) - F) / delta
        try:
            step = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        for _ in range(25):
            cand = state + t * step
            mc = mismatch(setup, cand[0], cand[1])
            if mc.norm < fnorm:
                state, mm, fnorm = cand, mc, mc.norm
                break
            t *= 0.5
        else:
            return None
        scale = 1.0 + abs(state[0]) + abs(state[1])
    return (float(state[0]), float(state[1])) if fnorm <= tol * scale else None


def refine_eigenvalue(setup: IvpSetup, lam_lo: float, lam_hi: float,
                      xtol: float = 1e-9) -> Tuple[float, float, float]:
    """Golden-section refinement of an eigenvalue bracket: minimizes the
    best-angle mismatch over lambda.  Returns (lambda, theta, mismatch)."""
    hint = {"theta": None}

    def fn(lam):
        t, fval = min_angle_mismatch(replace(setup, lam=lam), theta_hint=hint["theta"])
        hint["theta"] = t
        return fval

    lam_best, _ = _golden_min(fn, lam_lo, lam_hi, xtol * max(1.0, abs(lam_hi)))
    t_best, f_best = min_angle_mismatch(replace(setup, lam=lam_best))
    return lam_best, t_best, f_best


def count_sign_changes(values: np.ndarray, rel_floor: float = 1e-9) -> int:
    """Sign changes along a sampled orbit, ignoring near-zero samples."""
    vmax = np.max(np.abs(values))
    if vmax == 0.0:
        return 0
    mask = np.abs(values) > rel_floor * vmax
    signs = np.sign(values[mask])
    return int(np.sum(signs[1:] * signs[:-1] < 0))


def orbit_on_grid(setup: IvpSetup, u0: float, v0: float, N: int):
    """Orbit u(x) sampled at the N uniform grid nodes (steps are raised to a
    multiple of N so nodes land on integration steps exactly)."""
    steps = max(setup.steps, MIN_STEPS)
    steps = int(math.ceil(steps / N)) * N
    us, vs, ov = trajectory(replace(setup, steps=steps), u0, v0)
    if ov:
        raise OracleFailure("orbit blew up while reconstructing grid samples")
    stride = steps // N
    return us[:-1:stride].copy()
