"""Principal eigenpairs of the periodic p-Laplacian with indefinite weight.

For a sign-changing weight m the problem

    -(phi_p(u'))' + q phi_p(u) = lambda m phi_p(u),   u periodic,

has a smallest positive eigenvalue and a largest negative one, both
with one-signed eigenfunctions; the positive one minimizes the Rayleigh
quotient over the constraint integral m |u|^p = 1, and the negative one
is the reflection (lambda, m) -> (-lambda, -m) of the same construction.

The solver is normalized inverse iteration built on the auxiliary-problem
solver: each step solves the operator against the current weighted image
and renormalizes to the constraint, updating lambda by the Rayleigh
quotient.  When the plain iteration cannot separate the two principal
directions (for weights with near-symmetric positive and negative parts
the plain power map has a tied dominant pair), the iteration restarts
with the negative part of the weight moved to the operator side, which
makes the iteration map cone-preserving with a simple dominant direction.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import (DegenerateDenominator, InfeasibleConstraint,
                     NoConvergence, SignChangeDetected)
from .problem import (DiscreteField, ProblemSpec, apply_operator, l2_norm,
                      p_energy, phi_p, sup_norm, w_norm, weight_integral)
from .solver import SolveOptions, solve_auxiliary

log = logging.getLogger("plap.eigen")

EIGEN_RESIDUAL_RTOL = 1e-8
NORMALIZATION_ATOL = 1e-10
MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class EigenOptions:
    tol_lambda: float = 1e-10
    max_iter: int = 400
    scheme: str = "auto"  # "auto" | "plain" | "split"
    solver: SolveOptions = field(default_factory=SolveOptions)


@dataclass
class EigenPair:
    lam: float
    u: DiscreteField
    nu: int
    p: float
    residual_norm: float
    iterations: int = 0
    scheme: str = "plain"

    def unit_profile(self, spec: ProblemSpec) -> DiscreteField:
        """Eigenfunction renormalized to unit natural norm (for seeding
        branch continuation)."""
        return self.u / w_norm(spec, self.u)


def _constraint_weight(spec: ProblemSpec, nu: int) -> DiscreteField:
    return nu * spec.coeffs.m


def _bump_seed(spec: ProblemSpec, m_eff: DiscreteField) -> DiscreteField:
    """Smooth positive profile supported where the effective weight is
    positive."""
    bump = np.maximum(m_eff, 0.0) ** 2
    if not np.any(bump > 0.0):
        raise InfeasibleConstraint("effective weight has no positive part")
    return bump / bump.max()


def _default_seed(spec: ProblemSpec, m_eff: DiscreteField) -> DiscreteField:
    if float(np.sum(m_eff)) > 0.0:
        return np.ones(spec.grid.N)
    return _bump_seed(spec, m_eff)


def _normalize(spec: ProblemSpec, m_eff: DiscreteField, u: DiscreteField) -> DiscreteField:
    w = float(spec.grid.h * np.sum(m_eff * np.abs(u) ** spec.p.p))
    if not (w > 0.0) or not math.isfinite(w):
        raise DegenerateDenominator(
            f"iterate has nonpositive constraint integral {w:.3e}")
    return u / w ** (1.0 / spec.p.p)


def _certify(spec: ProblemSpec, nu: int, lam_hat: float, u: DiscreteField,
             iterations: int, scheme: str) -> EigenPair:
    """Validate sign structure, orientation, normalization and residual;
    raise if the iterate is not an acceptable principal eigenpair."""
    if float(np.mean(u)) < 0.0:
        u = -u
    if not (u.min() * u.max() > 0.0):
        raise SignChangeDetected(
            f"converged profile changes sign (min {u.min():.3e}, max {u.max():.3e})")
    lam = nu * lam_hat
    rhs = lam * spec.coeffs.m * phi_p(spec.p, u)
    resid = l2_norm(spec, apply_operator(spec, u) - rhs)
    rel = resid / max(l2_norm(spec, rhs), 1e-300)
    if rel > EIGEN_RESIDUAL_RTOL:
        raise NoConvergence(f"eigen-residual {rel:.3e} above tolerance")
    norm_err = abs(nu * weight_integral(spec, u) - 1.0)
    if norm_err > NORMALIZATION_ATOL:
        raise NoConvergence(f"normalization off by {norm_err:.3e}")
    return EigenPair(lam=lam, u=u, nu=nu, p=spec.p.p, residual_norm=rel,
                     iterations=iterations, scheme=scheme)


def _iterate(spec: ProblemSpec, nu: int, opts: EigenOptions, u0: DiscreteField,
             split: bool) -> EigenPair:
    m_eff = _constraint_weight(spec, nu)
    u = _normalize(spec, m_eff, np.asarray(u0, dtype=float))
    lam_hat = p_energy(spec, u)
    if not lam_hat > 0.0:
        raise NoConvergence("seed has nonpositive energy")
    m_plus = np.maximum(m_eff, 0.0)
    m_minus = np.maximum(-m_eff, 0.0)
    scheme = "split" if split else "plain"

    for it in range(1, opts.max_iter + 1):
        if split:
            work = spec.with_potential(spec.coeffs.q + lam_hat * m_minus)
            rhs = lam_hat * m_plus * phi_p(spec.p, u)
        else:
            work = spec
            rhs = lam_hat * m_eff * phi_p(spec.p, u)
        sol = solve_auxiliary(work, rhs, opts.solver, u0=u)
        w = _normalize(spec, m_eff, sol.u)
        lam_next = p_energy(spec, w)
        if not split and lam_next > lam_hat + MONOTONE_SLACK * (1.0 + abs(lam_hat)):
            raise NoConvergence(
                f"Rayleigh value increased ({lam_hat:.12e} -> {lam_next:.12e})")
        done = abs(lam_next - lam_hat) <= opts.tol_lambda * (1.0 + abs(lam_hat))
        u, lam_hat = w, lam_next
        if done:
            return _certify(spec, nu, lam_hat, u, it, scheme)
    raise NoConvergence(f"no eigen convergence in {opts.max_iter} iterations")


def principal_eigen(spec: ProblemSpec, nu: int,
                    opts: EigenOptions = EigenOptions(),
                    initial: Optional[DiscreteField] = None) -> EigenPair:
    """Principal eigenpair for sign nu (+1 or -1).

    Requires max m > 0 for nu=+1 and min m < 0 for nu=-1 (otherwise the
    constraint set is empty and only the other sign carries spectrum).
    """
    if nu not in (+1, -1):
        raise ValueError("nu must be +1 or -1")
    m = spec.coeffs.m
    if nu == +1 and not (m.max() > 0.0):
        raise InfeasibleConstraint("weight has no positive part; no positive spectrum")
    if nu == -1 and not (m.min() < 0.0):
        raise InfeasibleConstraint("weight has no negative part; no negative spectrum")

    m_eff = _constraint_weight(spec, nu)
    seeds = []
    if initial is not None:
        seeds.append(np.asarray(initial, dtype=float))
    seeds.append(_default_seed(spec, m_eff))
    bump = _bump_seed(spec, m_eff)
    if not any(np.array_equal(bump, s) for s in seeds):
        seeds.append(bump)

    if opts.scheme == "plain":
        attempts = [(s, False) for s in seeds]
    elif opts.scheme == "split":
        attempts = [(s, True) for s in seeds]
    else:
        attempts = [(s, False) for s in seeds] + [(s, True) for s in seeds]

    last_exc = None
    for seed, split in attempts:
        try:
            return _iterate(spec, nu, opts, seed, split)
        except (NoConvergence, DegenerateDenominator, SignChangeDetected) as exc:
            log.debug("eigen attempt (split=%s) failed: %s", split, exc)
            last_exc = exc
    raise last_exc


def rayleigh_upper_bound_holds(spec: ProblemSpec, pair: EigenPair,
                               trial: DiscreteField, slack: float = 1e-8) -> bool:
    """Variational check: nu * rayleigh_eff(trial) >= lam_hat for admissible
    trials (the principal value is the constrained infimum)."""
    m_eff = _constraint_weight(spec, pair.nu)
    w = float(spec.grid.h * np.sum(m_eff * np.abs(trial) ** spec.p.p))
    if w <= 0.0:
        return True  # trial not admissible for this sign
    return pair.nu * pair.lam <= p_energy(spec, trial) / w + slack


@dataclass
class ScanCandidate:
    lam: float
    mismatch: float
    theta: float
    sign_changes: int


@dataclass
class IsolationReport:
    """Scan evidence that no eigenvalues other than the principal pair live
    near them."""

    scanned_interval: tuple
    findings: list  # ScanCandidate records, ascending in lambda
    lam_plus: Optional[float]
    lam_minus: Optional[float]
    delta_plus: Optional[float]
    delta_minus: Optional[float]
    passed: bool


def _scan_worker(setup, lam_values, n_angles):
    from . import shooting

    out = np.empty(len(lam_values))
    from dataclasses import replace
    for i, lam in enumerate(lam_values):
        _, out[i] = shooting.min_angle_mismatch(replace(setup, lam=lam),
                                                n_angles=n_angles, xtol=1e-6)
    return out


def spectrum_scan(spec: ProblemSpec, lambda_lo: float, lambda_hi: float,
                  resolution: int = 121, opts: EigenOptions = EigenOptions(),
                  steps: int = 4096, n_angles: int = 48,
                  accept_mismatch: float = 1e-6,
                  principal_match_rtol: float = 2e-3,
                  jobs: int = 1) -> IsolationReport:
    """Shooting scan of a lambda window for eigenvalue candidates.

    For every lambda on the scan grid the periodicity mismatch, minimized
    over the initial-state angle, is recorded; local minima are refined
    over lambda by interval halving and accepted as eigenvalue candidates
    when the refined mismatch reaches the integrator floor.  The report
    passes when every candidate in the isolation interval around the
    principal pair is one of the principal eigenvalues.
    """
    from dataclasses import replace

    from . import shooting

    if not lambda_lo < lambda_hi:
        raise ValueError("scan window must satisfy lambda_lo < lambda_hi")
    setup = shooting.IvpSetup.from_problem(spec, 0.0, steps=steps)
    lam_grid = np.linspace(lambda_lo, lambda_hi, resolution)

    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunks = np.array_split(np.arange(resolution), jobs)
        miss = np.empty(resolution)
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            futs = [(idx, ex.submit(_scan_worker, setup, lam_grid[idx], n_angles))
                    for idx in chunks if len(idx)]
            for idx, fut in futs:
                miss[idx] = fut.result()
    else:
        miss = _scan_worker(setup, lam_grid, n_angles)

    candidates = []
    for i in range(1, resolution - 1):
        if miss[i] < miss[i - 1] and miss[i] <= miss[i + 1]:
            lam_b, th_b, f_b = shooting.refine_eigenvalue(
                setup, lam_grid[i - 1], lam_grid[i + 1])
            if f_b <= accept_mismatch:
                traj_u, _, _ = shooting.trajectory(
                    replace(setup, lam=lam_b), math.cos(th_b), math.sin(th_b))
                candidates.append(ScanCandidate(
                    lam=lam_b, mismatch=f_b, theta=th_b,
                    sign_changes=shooting.count_sign_changes(traj_u)))
    candidates.sort(key=lambda c: c.lam)
    merged = []
    for c in candidates:
        if merged and abs(c.lam - merged[-1].lam) <= 1e-6 * (1.0 + abs(c.lam)):
            continue
        merged.append(c)

    lam_plus = lam_minus = None
    if spec.coeffs.m.max() > 0.0:
        lam_plus = principal_eigen(spec, +1, opts).lam
    if spec.coeffs.m.min() < 0.0:
        lam_minus = principal_eigen(spec, -1, opts).lam

    def is_principal(lam):
        tol = principal_match_rtol
        if lam_plus is not None and abs(lam - lam_plus) <= tol * (1.0 + abs(lam_plus)):
            return True
        if lam_minus is not None and abs(lam - lam_minus) <= tol * (1.0 + abs(lam_minus)):
            return True
        return False

    others_above = [c.lam for c in merged
                    if lam_plus is not None and c.lam > lam_plus and not is_principal(c.lam)]
    others_below = [c.lam for c in merged
                    if lam_minus is not None and c.lam < lam_minus and not is_principal(c.lam)]
    delta_plus = delta_minus = None
    if lam_plus is not None:
        delta_plus = lam_plus + (min(others_above) - lam_plus) / 2.0 if others_above \
            else lambda_hi
    if lam_minus is not None:
        delta_minus = lam_minus - (lam_minus - max(others_below)) / 2.0 if others_below \
            else lambda_lo

    passed = True
    for c in merged:
        if is_principal(c.lam):
            continue
        inside = True
        if delta_plus is not None and c.lam >= delta_plus:
            inside = False
        if delta_minus is not None and c.lam <= delta_minus:
            inside = False
        if inside:
            passed = False
    return IsolationReport(scanned_interval=(lambda_lo, lambda_hi),
                           findings=merged, lam_plus=lam_plus,
                           lam_minus=lam_minus, delta_plus=delta_plus,
                           delta_minus=delta_minus, passed=passed)


@dataclass
class SweepRow:
    p: float
    lam_plus: Optional[float]
    lam_minus: Optional[float]


def p_sweep(base_spec: ProblemSpec, p_values, opts: EigenOptions = EigenOptions(),
            warm_start: bool = True) -> list:
    """principal_eigen for each exponent, warm-starting from the previous
    eigenfunction.  Rows come back sorted by p."""
    p_values = sorted(float(p) for p in p_values)
    rows = []
    warm = {+1: None, -1: None}
    for p in p_values:
        spec = ProblemSpec(type(base_spec.p)(p), base_spec.grid, base_spec.coeffs)
        vals = {}
        for nu in (+1, -1):
            feasible = spec.coeffs.m.max() > 0.0 if nu == +1 else spec.coeffs.m.min() < 0.0
            if not feasible:
                vals[nu] = None
                continue
            pair = principal_eigen(spec, nu, opts,
                                   initial=warm[nu] if warm_start else None)
            vals[nu] = pair.lam
            warm[nu] = pair.u
        rows.append(SweepRow(p=p, lam_plus=vals[+1], lam_minus=vals[-1]))
    return rows
