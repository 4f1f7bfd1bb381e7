"""Solver for the auxiliary periodic problem
-(phi_p(u'))' + q phi_p(u) = h.

The continuum operator is strictly monotone, so the solution exists and
is unique.  A damped Newton iteration on the residual is the primary
path, using the regularized derivative of phi_p (the operator is
degenerate for p > 2 and singular for p < 2 at critical points of u).
If Newton stalls, the iteration falls back to line-searched descent on
the strictly convex energy

    J(u) = p_energy(u)/p - h <h_rhs, u>,

whose unique minimizer is the solution.  Accepted answers always pass a
final residual check with the unregularized operator.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from .errors import NoConvergence
from .linsolve import CyclicTridiag
from .problem import (DiscreteField, ProblemSpec, apply_operator, dphi_p,
                      forward_diff, grid_dot, l2_norm, p_energy)

log = logging.getLogger("plap.solver")


@dataclass(frozen=True)
class SolveOptions:
    tol_residual: float = 1e-10
    max_newton: int = 60
    epsilon_reg: float = 1e-10
    damping: float = 0.5
    max_halvings: int = 30

    def __post_init__(self):
        if not self.tol_residual > 0.0:
            raise ValueError("tol_residual must be positive")
        if self.epsilon_reg < 0.0:
            raise ValueError("epsilon_reg must be nonnegative")


@dataclass
class SolveResult:
    u: DiscreteField
    residual_norm: float
    iterations: int
    used_fallback: bool


def build_jacobian(spec: ProblemSpec, u: DiscreteField, epsilon: float,
                   extra_diag=None) -> CyclicTridiag:
    """Linearization of apply_operator at u as a cyclic tridiagonal matrix.

    extra_diag, when given, is added to the diagonal (used for the
    -lambda*m*f'(u) term of nonlinear problems).
    """
    p = spec.p.p
    h = spec.grid.h
    a = dphi_p(p, forward_diff(spec, u), epsilon)  # coupling (i, i+1)
    du_diag = spec.coeffs.q * dphi_p(p, u, epsilon)
    diag = (a + np.roll(a, 1)) / h**2 + du_diag
    if extra_diag is not None:
        diag = diag + extra_diag
    off = -a[:-1] / h**2
    corner = -a[-1] / h**2
    return CyclicTridiag(diag, off, corner)


def jacobian_apply(spec: ProblemSpec, u: DiscreteField, v: DiscreteField,
                   epsilon_reg: float = 0.0) -> DiscreteField:
    """Directional derivative of apply_operator at u in direction v."""
    v = spec.require_field(v)
    return build_jacobian(spec, u, epsilon_reg).matvec(v)


def _energy_value(spec, u, h_rhs):
    return p_energy(spec, u) / spec.p.p - grid_dot(spec, h_rhs, u)


def solve_auxiliary(spec: ProblemSpec, h_rhs: DiscreteField,
                    opts: SolveOptions = SolveOptions(),
                    u0: DiscreteField = None) -> SolveResult:
    """Solve -(phi_p(u'))' + q phi_p(u) = h_rhs on the periodic grid.

    Default initial guess is h_rhs scaled by 1/(1 + mean q), which is exact
    for constant data at p = 2 and cheap otherwise.
    """
    h_rhs = spec.require_field(h_rhs)
    scale = max(1.0, l2_norm(spec, h_rhs))
    tol = opts.tol_residual * scale

    if u0 is None:
        u = h_rhs / (1.0 + float(np.mean(spec.coeffs.q)))
    else:
        u = spec.require_field(u0).copy()

    res = apply_operator(spec, u) - h_rhs
    rnorm = l2_norm(spec, res)
    iters = 0
    for iters in range(1, opts.max_newton + 1):
        if rnorm <= tol:
            return SolveResult(u, rnorm, iters - 1, False)
        J = build_jacobian(spec, u, opts.epsilon_reg)
        try:
            step = J.solve(-res)
        except NoConvergence:
            break
        t = 1.0
        improved = False
        for _ in range(opts.max_halvings + 1):
            u_try = u + t * step
            res_try = apply_operator(spec, u_try) - h_rhs
            rnorm_try = l2_norm(spec, res_try)
            if np.isfinite(rnorm_try) and rnorm_try < rnorm:
                u, res, rnorm = u_try, res_try, rnorm_try
                improved = True
                break
            t *= opts.damping
        if not improved:
            log.debug("newton stalled at iteration %d, residual %.3e", iters, rnorm)
            break
    if rnorm <= tol:
        return SolveResult(u, rnorm, iters, False)

    u, rnorm, extra = _energy_descent(spec, h_rhs, u, tol, opts)
    if rnorm > tol:
        raise NoConvergence(
            f"auxiliary solve failed: residual {rnorm:.3e} > tol {tol:.3e}")
    return SolveResult(u, rnorm, iters + extra, True)


def _energy_descent(spec, h_rhs, u, tol, opts):
    """Armijo line search on the convex energy along regularized Newton
    directions (always descent directions since the Jacobian is SPD)."""
    eps = max(opts.epsilon_reg, 1e-6)
    budget = 4 * opts.max_newton
    Jval = _energy_value(spec, u, h_rhs)
    rnorm = l2_norm(spec, apply_operator(spec, u) - h_rhs)
    for it in range(1, budget + 1):
        grad = apply_operator(spec, u) - h_rhs
        rnorm = l2_norm(spec, grad)
        if rnorm <= tol:
            return u, rnorm, it
        J = build_jacobian(spec, u, eps)
        try:
            step = J.solve(-grad)
        except NoConvergence:
            step = -grad
        slope = grid_dot(spec, grad, step)
        if slope >= 0.0:
            step = -grad
            slope = -grid_dot(spec, grad, grad)
        t = 1.0
        for _ in range(opts.max_halvings + 1):
            u_try = u + t * step
            J_try = _energy_value(spec, u_try, h_rhs)
            if np.isfinite(J_try) and J_try <= Jval + 1e-4 * t * slope:
                u, Jval = u_try, J_try
                break
            t *= opts.damping
        else:
            break
    rnorm = l2_norm(spec, apply_operator(spec, u) - h_rhs)
    return u, rnorm, budget


def monotone_pairing(spec: ProblemSpec, u: DiscreteField, v: DiscreteField) -> float:
    """Discrete pairing <L(u) - L(v), u - v>; strictly positive for u != v."""
    from .problem import phi_p

    u = spec.require_field(u)
    v = spec.require_field(v)
    p = spec.p
    du = forward_diff(spec, u)
    dv = forward_diff(spec, v)
    h = spec.grid.h
    term_grad = np.sum((phi_p(p, du) - phi_p(p, dv)) * (du - dv))
    term_pot = np.sum(spec.coeffs.q * (phi_p(p, u) - phi_p(p, v)) * (u - v))
    return float(h * (term_grad + term_pot))
