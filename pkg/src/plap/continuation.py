"""Pseudo-arclength continuation of one-sign solution branches of

    -(phi_p(u'))' + q phi_p(u) = lambda m f(u),   u periodic.

Branches leaving the trivial line bifurcate from lambda0/f0 (principal
eigenvalue over the slope of f at zero) and are traced with a secant
predictor and a Newton corrector on the extended system [residual;
arclength hyperplane].  Branches coming down from infinite norm are
produced by the inversion w = u / ||u||^2 (natural norm): the
transformed problem has the roles of the zero and infinity limits of f
exchanged, is continued from zero like any other branch, and every
accepted point is mapped back.  Every accepted point must be one-signed
and free of double zeros (a point where both u and its derivative
vanish would force the trivial solution).
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, List, Optional

import numpy as np

from .eigen import EigenOptions, EigenPair, principal_eigen
from .errors import (ConfigError, NoConvergence, SeedCorrectionFailed)
from .linsolve import CyclicTridiag, solve_bordered
from .nonlinearity import NonlinearitySpec
from .problem import (DiscreteField, ProblemSpec, apply_operator, l2_norm,
                      p_energy, sup_norm, w_norm)
from .solver import build_jacobian

log = logging.getLogger("plap.continuation")

RESIDUAL_RTOL = 1e-8
DOUBLE_ZERO_REL = 1e-8


@dataclass(frozen=True)
class ContinuationControls:
    step0: float = 0.05
    step_min: float = 1e-6
    step_max: float = 2.0
    norm_cap: float = 50.0
    lambda_window: tuple = (-1e6, 1e6)
    max_points: int = 2000
    max_newton: int = 30
    easy_newton: int = 3
    epsilon_reg: float = 1e-10
    min_sup: float = 5.0  # validity floor for branches mapped back from infinity


@dataclass
class BranchPoint:
    lam: float
    u: DiscreteField
    sup_norm: float
    w_norm: float
    arclength: float
    newton_iters: int
    residual: float


@dataclass
class Branch:
    nu: int
    sigma: int
    seed: str  # "from-zero" | "from-infinity"
    points: List[BranchPoint]
    termination: str

    def lambda_span(self):
        lams = [pt.lam for pt in self.points]
        return (min(lams), max(lams)) if lams else (math.nan, math.nan)

    def interp_lambda_at_sup(self, target_sup: float) -> Optional[float]:
        """lambda linearly interpolated at a given sup-norm along the branch."""
        pts = sorted(self.points, key=lambda pt: pt.sup_norm)
        sups = np.array([pt.sup_norm for pt in pts])
        lams = np.array([pt.lam for pt in pts])
        if target_sup < sups[0] or target_sup > sups[-1]:
            return None
        return float(np.interp(target_sup, sups, lams))


@dataclass(frozen=True)
class ArclengthAnchor:
    """Hyperplane t_lam (lam - lam0) + <t_u, u - u0>_h = 0."""

    lam0: float
    u0: DiscreteField
    t_lam: float
    t_u: DiscreteField


# ---------------------------------------------------------------------------
# residual models (local problem and inversion-transformed problem)

class _LocalModel:
    """Residual R(lam, u) = Lop(u) - lam m f(u) with pointwise f."""

    def __init__(self, spec: ProblemSpec, f: NonlinearitySpec,
                 epsilon_reg: float = 1e-10):
        self.spec = spec
        self.f = f
        self.eps = epsilon_reg

    def residual(self, lam, u):
        return apply_operator(self.spec, u) - lam * self.spec.coeffs.m * self.f.evaluate(u)

    def rhs_scale(self, lam, u):
        lhs = l2_norm(self.spec, apply_operator(self.spec, u))
        rhs = l2_norm(self.spec, lam * self.spec.coeffs.m * self.f.evaluate(u))
        return max(lhs, rhs, 1e-300)

    def linear_parts(self, lam, u):
        extra = -lam * self.spec.coeffs.m * self.f.d(u)
        core = build_jacobian(self.spec, u, self.eps, extra_diag=extra)
        return core, None, None

    def dlam(self, lam, u):
        return -self.spec.coeffs.m * self.f.evaluate(u)

    def to_original(self, lam, u):
        return lam, u


class _InvertedModel:
    """Residual of the inversion-transformed problem in w = u / ||u||^2:

        R(lam, w) = Lop(w) - lam m s^{2(p-1)} f(w / s^2),   s = ||w||.

    The norm factor makes the nonlinearity nonlocal; its derivative
    contributes a rank-one term r g^T with g the gradient of the norm,
    handled exactly through the bordered solver.
    """

    def __init__(self, spec: ProblemSpec, f: NonlinearitySpec,
                 epsilon_reg: float = 1e-10):
        self.spec = spec
        self.f = f
        self.eps = epsilon_reg

    def _norm(self, w):
        return w_norm(self.spec, w)

    def f_tilde(self, w):
        s = self._norm(w)
        if s == 0.0:
            return np.zeros_like(w)
        p = self.spec.p.p
        return s ** (2.0 * (p - 1.0)) * self.f.evaluate(w / s**2)

    def residual(self, lam, w):
        return apply_operator(self.spec, w) - lam * self.spec.coeffs.m * self.f_tilde(w)

    def rhs_scale(self, lam, w):
        lhs = l2_norm(self.spec, apply_operator(self.spec, w))
        rhs = l2_norm(self.spec, lam * self.spec.coeffs.m * self.f_tilde(w))
        return max(lhs, rhs, 1e-300)

    def linear_parts(self, lam, w):
        p = self.spec.p.p
        s = self._norm(w)
        c = w / s**2
        fc = self.f.evaluate(c)
        fdc = self.f.d(c)
        extra = -lam * self.spec.coeffs.m * s ** (2.0 * p - 4.0) * fdc
        core = build_jacobian(self.spec, w, self.eps, extra_diag=extra)
        # derivative of the norm: d||w||[dw] = s^{1-p} <A, dw>_h, A = Lop(w)
        A = apply_operator(self.spec, w)
        gain = 2.0 * (p - 1.0) * s ** (p - 2.0) * fc - 2.0 * s ** (p - 4.0) * w * fdc
        col = (-lam * self.spec.coeffs.m * gain)[:, None]
        row = (self.spec.grid.h * s ** (1.0 - p) * A)[None, :]
        return core, col, row

    def dlam(self, lam, w):
        return -self.spec.coeffs.m * self.f_tilde(w)

    def to_original(self, lam, w):
        s = self._norm(w)
        return lam, w / s**2


# ---------------------------------------------------------------------------
# corrector

def _newton_extended(model, anchor: ArclengthAnchor, lam, u,
                     controls: ContinuationControls):
    """Damped Newton on [residual; arclength constraint].  Returns
    (lam, u, iters, relative residual)."""
    spec = model.spec
    h = spec.grid.h
    u = np.asarray(u, dtype=float).copy()
    lam = float(lam)

    def constraint(lam_, u_):
        return (anchor.t_lam * (lam_ - anchor.lam0)
                + h * float(np.dot(anchor.t_u, u_ - anchor.u0)))

    R = model.residual(lam, u)
    c = constraint(lam, u)
    scale = model.rhs_scale(lam, u)
    best = math.hypot(l2_norm(spec, R) / scale, abs(c))
    for it in range(1, controls.max_newton + 1):
        rnorm = l2_norm(spec, R)
        if rnorm <= RESIDUAL_RTOL * scale and abs(c) <= 1e-9 * (1.0 + abs(lam)):
            return lam, u, it - 1, rnorm / scale
        core, col, row = model.linear_parts(lam, u)
        dlam_col = model.dlam(lam, u)
        if col is None:
            cols = dlam_col[:, None]
            rows = (h * anchor.t_u)[None, :]
            corner = np.array([[anchor.t_lam]])
            rhs_bot = np.array([-c])
        else:
            cols = np.column_stack([col, dlam_col])
            rows = np.vstack([row, (h * anchor.t_u)[None, :]])
            corner = np.array([[-1.0, 0.0], [0.0, anchor.t_lam]])
            rhs_bot = np.array([0.0, -c])
        du, y = solve_bordered(core, cols, rows, corner, -R, rhs_bot)
        dl = float(y[-1]) if np.ndim(y) else float(y)
        t = 1.0
        for _ in range(15):
            lam_try = lam + t * dl
            u_try = u + t * du
            R_try = model.residual(lam_try, u_try)
            c_try = constraint(lam_try, u_try)
            merit = math.hypot(l2_norm(spec, R_try) / scale, abs(c_try))
            if np.isfinite(merit) and merit < best:
                lam, u, R, c = lam_try, u_try, R_try, c_try
                best = merit
                break
            t *= 0.5
        else:
            raise NoConvergence("corrector line search stalled")
        scale = model.rhs_scale(lam, u)
    rnorm = l2_norm(spec, R)
    if rnorm <= RESIDUAL_RTOL * scale and abs(c) <= 1e-9 * (1.0 + abs(lam)):
        return lam, u, controls.max_newton, rnorm / scale
    raise NoConvergence(f"corrector failed: residual {rnorm/scale:.3e}")


def _point_from(model, lam, u, iters, rel, arclength=0.0) -> BranchPoint:
    lam_o, u_o = model.to_original(lam, u)
    spec = model.spec
    return BranchPoint(lam=lam_o, u=u_o, sup_norm=sup_norm(u_o),
                       w_norm=w_norm(spec, u_o), arclength=arclength,
                       newton_iters=iters, residual=rel)


def point_is_one_signed(u: DiscreteField, rel: float = DOUBLE_ZERO_REL) -> bool:
    s = float(np.max(np.abs(u)))
    if s <= 0.0:
        return False
    if not (u.min() * u.max() > 0.0):
        return False
    return float(np.min(np.abs(u))) > rel * s


def corrector(spec: ProblemSpec, f: NonlinearitySpec, anchor: ArclengthAnchor,
              guess, controls: ContinuationControls = ContinuationControls(),
              model=None) -> BranchPoint:
    """Newton correction of (lambda, u) onto the branch through the anchor
    hyperplane."""
    lam, u = guess
    if model is None:
        model = _LocalModel(spec, f, controls.epsilon_reg)
    lam, u, iters, rel = _newton_extended(model, anchor, lam, spec.require_field(u),
                                          controls)
    return _point_from(model, lam, u, iters, rel)


# ---------------------------------------------------------------------------
# seeding

def _seed_with_model(model, eigenpair: EigenPair, f0_eff: float, sigma: int,
                     alpha: float, controls: ContinuationControls):
    spec = model.spec
    phi = eigenpair.unit_profile(spec)
    if not alpha > 0.0:
        raise ValueError("seed amplitude must be positive")
    u_pred = sigma * alpha * phi
    lam_pred = eigenpair.lam / f0_eff
    t_u = sigma * phi / l2_norm(spec, phi)
    anchor = ArclengthAnchor(lam0=lam_pred, u0=u_pred, t_lam=0.0, t_u=t_u)
    try:
        lam, u, iters, rel = _newton_extended(model, anchor, lam_pred, u_pred, controls)
    except NoConvergence as exc:
        raise SeedCorrectionFailed(f"seed correction failed: {exc}") from None
    if not point_is_one_signed(u):
        raise SeedCorrectionFailed("corrected seed is not one-signed")
    return lam, u, iters, rel


def seed_from_zero(spec: ProblemSpec, f: NonlinearitySpec, nu: int, sigma: int,
                   alpha: Optional[float] = None,
                   controls: ContinuationControls = ContinuationControls(),
                   eigen_opts: EigenOptions = EigenOptions(),
                   eigenpair: Optional[EigenPair] = None) -> BranchPoint:
    """Branch point near the bifurcation from the trivial line, at
    lambda = lambda0(nu) / f0 with profile sigma * alpha * (unit
    eigenfunction)."""
    if not (math.isfinite(f.f0) and f.f0 > 0.0):
        raise ConfigError(
            "from-zero seeding needs a finite positive limit of f/phi_p at zero")
    if sigma not in (+1, -1):
        raise ValueError("sigma must be +1 or -1")
    if eigenpair is None:
        eigenpair = principal_eigen(spec, nu, eigen_opts)
    model = _LocalModel(spec, f, controls.epsilon_reg)
    if alpha is None:
        target = 0.01 * max(1.0, f.zero_pattern[2] if f.zero_pattern else 1.0)
        alpha = target / sup_norm(eigenpair.unit_profile(spec))
    elif alpha == 0.0:
        raise ValueError("seed amplitude must be nonzero")
    lam, u, iters, rel = _seed_with_model(model, eigenpair, f.f0, sigma,
                                          float(alpha), controls)
    return _point_from(model, lam, u, iters, rel)


# ---------------------------------------------------------------------------
# branch driver

def _metric(spec, dlam, du):
    return math.hypot(dlam, l2_norm(spec, du))


def continue_branch(spec: ProblemSpec, f: NonlinearitySpec, seed: BranchPoint,
                    nu: int, sigma: int, direction: int = +1,
                    controls: ContinuationControls = ContinuationControls(),
                    model=None, seed_label: str = "from-zero",
                    stop_when: Optional[Callable[[BranchPoint], Optional[str]]] = None,
                    ) -> Branch:
    """Pseudo-arclength continuation from an existing branch point.

    Secant predictor with adaptive step (doubled after fast corrector
    convergence, halved on failure); every accepted point passes the
    one-sign and no-double-zero checks.  The recorded termination reason
    is one of NormCapReached, LambdaWindowExited, StepFailure,
    ClosedLoop or MaxPoints.
    """
    if model is None:
        model = _LocalModel(spec, f, controls.epsilon_reg)
    pts = [seed]
    lam, u = seed.lam, seed.u
    # model-space coordinates for the inverted branch differ from the stored
    # original-variable point, so the driver tracks them separately
    state = getattr(seed, "_model_state", None) or (lam, u)
    lam_m, u_m = state
    lam_m0, u_m0 = lam_m, np.array(u_m, dtype=float)
    t_lam = 0.0
    t_u = direction * u_m / l2_norm(spec, u_m)
    ds = controls.step0
    termination = "MaxPoints"

    while len(pts) < controls.max_points:
        lam_pred = lam_m + ds * t_lam
        u_pred = u_m + ds * t_u
        anchor = ArclengthAnchor(lam0=lam_pred, u0=u_pred, t_lam=t_lam, t_u=t_u)
        try:
            lam_new, u_new, iters, rel = _newton_extended(model, anchor,
                                                          lam_pred, u_pred, controls)
            if not point_is_one_signed(u_new):
                raise NoConvergence("corrected point lost one-signedness")
        except NoConvergence:
            ds *= 0.5
            if ds < controls.step_min:
                termination = "StepFailure"
                break
            continue

        dlam_m, du_m = lam_new - lam_m, u_new - u_m
        step_len = _metric(spec, dlam_m, du_m)
        if step_len == 0.0:
            termination = "StepFailure"
            break
        pt = _point_from(model, lam_new, u_new, iters, rel,
                         arclength=pts[-1].arclength + step_len)
        pts.append(pt)
        t_lam, t_u = dlam_m / step_len, du_m / step_len
        lam_m, u_m = lam_new, u_new
        lam, u = pt.lam, pt.u

        if iters <= controls.easy_newton:
            ds = min(2.0 * ds, controls.step_max)

        if stop_when is not None:
            reason = stop_when(pt)
            if reason:
                termination = reason
                break
        if pt.sup_norm >= controls.norm_cap and stop_when is None:
            termination = "NormCapReached"
            break
        lo, hi = controls.lambda_window
        if not (lo <= pt.lam <= hi):
            termination = "LambdaWindowExited"
            break
        if len(pts) > 10 and _metric(spec, lam_m - lam_m0, u_m - u_m0) < 0.5 * ds:
            termination = "ClosedLoop"
            break

    return Branch(nu=nu, sigma=sigma, seed=seed_label, points=pts,
                  termination=termination)


def branch_from_zero(spec: ProblemSpec, f: NonlinearitySpec, nu: int, sigma: int,
                     controls: ContinuationControls = ContinuationControls(),
                     eigen_opts: EigenOptions = EigenOptions(),
                     eigenpair: Optional[EigenPair] = None) -> Branch:
    """Seed at the bifurcation point and continue outward."""
    seed = seed_from_zero(spec, f, nu, sigma, controls=controls,
                          eigen_opts=eigen_opts, eigenpair=eigenpair)
    return continue_branch(spec, f, seed, nu, sigma, +1, controls)


def seed_from_infinity(spec: ProblemSpec, f: NonlinearitySpec, nu: int, sigma: int,
                       controls: ContinuationControls = ContinuationControls(),
                       eigen_opts: EigenOptions = EigenOptions(),
                       eigenpair: Optional[EigenPair] = None) -> Branch:
    """Branch accumulating at infinite norm, traced via the inversion
    w = u/||u||^2.

    The transformed nonlinearity has the limits of f at zero and infinity
    exchanged, so the transformed branch bifurcates from
    lambda0(nu)/finf; each accepted point is mapped back to the original
    variables, where the sup norm decreases from its largest value toward
    the validity floor of the transform.
    """
    if not (math.isfinite(f.finf) and f.finf > 0.0):
        raise ConfigError(
            "from-infinity seeding needs a finite positive limit of f/phi_p at infinity")
    if eigenpair is None:
        eigenpair = principal_eigen(spec, nu, eigen_opts)
    model = _InvertedModel(spec, f, controls.epsilon_reg)
    phi = eigenpair.unit_profile(spec)
    kappa = sup_norm(phi)
    # seed so the mapped profile starts beyond the sup-norm cap
    alpha = kappa / (1.5 * controls.norm_cap)
    lam_w, w, iters, rel = _seed_with_model(model, eigenpair, f.finf, sigma,
                                            alpha, controls)
    seed_pt = _point_from(model, lam_w, w, iters, rel)
    seed_pt._model_state = (lam_w, w)

    def stop(pt: BranchPoint) -> Optional[str]:
        if pt.sup_norm <= controls.min_sup:
            return "NormCapReached"
        return None

    branch = continue_branch(spec, f, seed_pt, nu, sigma, +1, controls,
                             model=model, seed_label="from-infinity",
                             stop_when=stop)
    return branch


# ---------------------------------------------------------------------------
# solution counting at fixed lambda

@dataclass
class Solution:
    lam: float
    u: DiscreteField
    sup_norm: float
    w_norm: float
    residual: float
    newton_iters: int


def _solve_at_lambda(model, lam, u0, max_iter=40):
    spec = model.spec
    u = np.asarray(u0, dtype=float).copy()
    R = model.residual(lam, u)
    scale = model.rhs_scale(lam, u)
    rnorm = l2_norm(spec, R)
    for it in range(1, max_iter + 1):
        if rnorm <= RESIDUAL_RTOL * scale:
            return u, rnorm / scale, it - 1
        core, col, row = model.linear_parts(lam, u)
        try:
            if col is None:
                du = core.solve(-R)
            else:
                du, _ = solve_bordered(core, col, row, np.array([[-1.0]]),
                                       -R, np.array([0.0]))
        except NoConvergence:
            return None
        t = 1.0
        for _ in range(20):
            u_try = u + t * du
            R_try = model.residual(lam, u_try)
            r_try = l2_norm(spec, R_try)
            if np.isfinite(r_try) and r_try < rnorm:
                u, R, rnorm = u_try, R_try, r_try
                break
            t *= 0.5
        else:
            return None
        scale = model.rhs_scale(lam, u)
    return (u, rnorm / scale, max_iter) if rnorm <= RESIDUAL_RTOL * scale else None


def _smooth_random(spec, rng):
    x = spec.grid.nodes
    T = spec.grid.T
    field_ = np.zeros(spec.grid.N)
    for k in range(1, 4):
        a, b = rng.standard_normal(2)
        field_ += (a * np.cos(2 * np.pi * k * x / T)
                   + b * np.sin(2 * np.pi * k * x / T)) / k
    m = np.max(np.abs(field_))
    return field_ / m if m > 0 else field_


def count_solutions(spec: ProblemSpec, f: NonlinearitySpec, lam: float,
                    n_starts: int = 20, rng_seed: int = 12345,
                    branches: Optional[List[Branch]] = None,
                    controls: ContinuationControls = ContinuationControls(),
                    dedup_tol: float = 1e-5) -> List[Solution]:
    """Distinct one-sign solutions at fixed lambda found by multistart
    Newton from amplitude-stratified seeds of both signs (plus
    branch-informed seeds when branches are supplied).  Reproducible for
    a fixed rng_seed; an empty list is a valid outcome."""
    if n_starts < 1:
        raise ValueError("n_starts must be at least 1")
    rng = np.random.default_rng(rng_seed)
    model = _LocalModel(spec, f, controls.epsilon_reg)
    if f.zero_pattern:
        t2, _, s1, s2 = f.zero_pattern
        amp_lo, amp_hi = 0.1 * min(s1, -max(t2, -s1)), 3.0 * max(s2, -t2)
    else:
        amp_lo, amp_hi = 1e-2, 10.0
    n_amp = max(1, (n_starts + 1) // 2)
    amps = np.geomspace(amp_lo, amp_hi, n_amp)

    base = np.ones(spec.grid.N)
    seeds = []
    for i in range(n_starts):
        sign = +1 if i % 2 == 0 else -1
        amp = amps[(i // 2) % n_amp]
        profile = base + 0.3 * _smooth_random(spec, rng)
        profile = np.maximum(profile, 0.05)
        seeds.append(sign * amp * profile)
    if branches:
        for br in branches:
            best = min(br.points, key=lambda pt: abs(pt.lam - lam))
            seeds.append(best.u.copy())

    found: List[Solution] = []
    for s in seeds:
        res = _solve_at_lambda(model, lam, s)
        if res is None:
            continue
        u, rel, iters = res
        if sup_norm(u) <= 1e-6:
            continue  # trivial solution
        if not point_is_one_signed(u):
            continue
        if any(sup_norm(u - other.u) < dedup_tol for other in found):
            continue
        found.append(Solution(lam=lam, u=u, sup_norm=sup_norm(u),
                              w_norm=w_norm(spec, u),
                              residual=rel, newton_iters=iters))
    found.sort(key=lambda sol: (math.copysign(1.0, float(np.mean(sol.u))), sol.sup_norm))
    return found
