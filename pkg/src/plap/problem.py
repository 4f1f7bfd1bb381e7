"""Data model and discrete operator for the periodic p-Laplacian.

The continuum problem on the circle of length T is

    -(phi_p(u'))' + q(x) phi_p(u) = lambda m(x) phi_p(u),   phi_p(s) = |s|^(p-2) s,

with u(0) = u(T), u'(0) = u'(T), a nonnegative potential q (not
identically zero) and a weight m that may change sign.  The
discretization is a uniform periodic grid with conservative flux-form
differences and the periodic rectangle rule, so the discrete weak form

    h sum_i r_i v_i = h sum_i [ phi_p(Du_i/h) (Dv_i/h) + q_i phi_p(u_i) v_i ]

holds exactly for r = apply_operator(u).  Fields are plain 1-D float64
arrays of length N; index arithmetic is modulo N and the value at node N
is never stored.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from ._kernels import apply_operator_kernel, coeff_eval
from .errors import ConfigError, DegenerateDenominator, GridMismatch

DiscreteField = np.ndarray

RAYLEIGH_DENOM_RTOL = 1e-12


@dataclass(frozen=True)
class PExponent:
    """Exponent p > 1 of the p-Laplacian, with its conjugate p/(p-1)."""

    p: float

    def __post_init__(self):
        if not (self.p > 1.0) or not np.isfinite(self.p):
            raise ConfigError(f"exponent must satisfy p > 1, got p={self.p}")
        object.__setattr__(self, "p", float(self.p))

    @property
    def conjugate(self) -> float:
        return self.p / (self.p - 1.0)


@dataclass(frozen=True)
class PeriodicGrid:
    """Uniform grid x_i = i*h, i = 0..N-1, on the circle of length T.

    T is snapped to h*N at construction so the identity h*N == T holds
    bitwise.
    """

    T: float
    N: int

    def __post_init__(self):
        if not (self.T > 0.0) or not np.isfinite(self.T):
            raise ConfigError(f"period must be positive, got T={self.T}")
        if self.N < 8:
            raise ConfigError(f"grid needs at least 8 nodes, got N={self.N}")
        h = float(self.T) / int(self.N)
        object.__setattr__(self, "T", h * int(self.N))
        object.__setattr__(self, "N", int(self.N))

    @property
    def h(self) -> float:
        return self.T / self.N

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N) * self.h


@dataclass(frozen=True)
class CoefficientSpec:
    """Named analytic coefficient family, evaluable off the grid.

    kinds: "constant" (c,), "cosine" (a, b, k) for a + b*cos(2*pi*k*x/T),
    "piecewise" (x_0..x_{K-1}, v_0..v_{K-1}) with ascending breakpoints in
    [0, T) and value v_j on [x_j, x_{j+1}).
    """

    kind: str
    params: tuple

    _KINDS = {"constant": 0, "cosine": 1, "piecewise": 2}

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ConfigError(f"unknown coefficient kind '{self.kind}'")
        object.__setattr__(self, "params", tuple(float(v) for v in self.params))
        if self.kind == "constant" and len(self.params) != 1:
            raise ConfigError("constant coefficient takes exactly one parameter")
        if self.kind == "cosine" and len(self.params) != 3:
            raise ConfigError("cosine coefficient takes parameters (a, b, k)")
        if self.kind == "piecewise":
            if len(self.params) < 4 or len(self.params) % 2 != 0:
                raise ConfigError(
                    "piecewise coefficient takes breakpoints then values, "
                    "at least two pieces")
            K = len(self.params) // 2
            xs = self.params[:K]
            if any(xs[j] >= xs[j + 1] for j in range(K - 1)):
                raise ConfigError("piecewise breakpoints must be strictly ascending")

    @property
    def kind_code(self) -> int:
        return self._KINDS[self.kind]

    def kernel_params(self) -> np.ndarray:
        if self.kind == "piecewise":
            K = len(self.params) // 2
            return np.array((float(K),) + self.params, dtype=float)
        return np.array(self.params, dtype=float)

    def evaluate(self, x, T: float):
        """Analytic pointwise evaluation at positions x on a circle of length T."""
        return coeff_eval(self.kind_code, self.kernel_params(), x, T)

    def sample(self, grid: PeriodicGrid) -> np.ndarray:
        return np.asarray(self.evaluate(grid.nodes, grid.T), dtype=float)


@dataclass(frozen=True)
class CoefficientField:
    """Nodal samples of the potential q >= 0 (q not identically 0) and the
    weight m.  Analytic family specs are kept when available so the shooting
    oracle can evaluate coefficients off the grid."""

    q: DiscreteField
    m: DiscreteField
    q_spec: Optional[CoefficientSpec] = None
    m_spec: Optional[CoefficientSpec] = None

    def __post_init__(self):
        q = np.asarray(self.q, dtype=float)
        m = np.asarray(self.m, dtype=float)
        if q.ndim != 1 or m.ndim != 1 or q.shape != m.shape:
            raise ConfigError("q and m must be 1-D arrays of equal length")
        if np.any(q < 0.0):
            raise ConfigError("potential q must be nonnegative")
        if not np.any(q > 0.0):
            raise ConfigError("potential q must not be identically zero")
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "m", m)

    @property
    def sign_changing(self) -> bool:
        return bool(self.m.min() < 0.0 < self.m.max())


@dataclass(frozen=True)
class ProblemSpec:
    """Immutable bundle (p, grid, coefficients) defining one discrete problem."""

    p: PExponent
    grid: PeriodicGrid
    coeffs: CoefficientField

    def __post_init__(self):
        if len(self.coeffs.q) != self.grid.N:
            raise GridMismatch(
                f"coefficients have {len(self.coeffs.q)} samples, grid has N={self.grid.N}")

    def require_field(self, u: DiscreteField) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.ndim != 1 or u.shape[0] != self.grid.N:
            raise GridMismatch(
                f"field of length {u.shape} does not match grid N={self.grid.N}")
        return u

    def with_potential(self, q_new: DiscreteField) -> "ProblemSpec":
        """Same grid and weight, replaced potential (analytic specs dropped)."""
        return ProblemSpec(self.p, self.grid,
                           CoefficientField(np.asarray(q_new, dtype=float), self.coeffs.m))

    def with_weight(self, m_new: DiscreteField) -> "ProblemSpec":
        return ProblemSpec(self.p, self.grid,
                           CoefficientField(self.coeffs.q, np.asarray(m_new, dtype=float)))

    def resampled(self, N: int) -> "ProblemSpec":
        """The same problem on an N-node grid; requires analytic coefficient specs."""
        if self.coeffs.q_spec is None or self.coeffs.m_spec is None:
            raise ConfigError("resampling requires named coefficient families")
        return make_problem(self.p.p, self.grid.T, N, self.coeffs.q_spec, self.coeffs.m_spec)


def make_problem(p: float, T: float, N: int,
                 q: CoefficientSpec, m: CoefficientSpec) -> ProblemSpec:
    grid = PeriodicGrid(T, N)
    coeffs = CoefficientField(q.sample(grid), m.sample(grid), q_spec=q, m_spec=m)
    return ProblemSpec(PExponent(p), grid, coeffs)


def make_problem_from_samples(p: float, T: float,
                              q_samples: Sequence[float],
                              m_samples: Sequence[float]) -> ProblemSpec:
    q = np.asarray(q_samples, dtype=float)
    grid = PeriodicGrid(T, len(q))
    return ProblemSpec(PExponent(p), grid,
                       CoefficientField(q, np.asarray(m_samples, dtype=float)))


# ---------------------------------------------------------------------------
# phi_p algebra

def _pval(p) -> float:
    return p.p if isinstance(p, PExponent) else float(p)


def phi_p(p, s):
    """sign(s) |s|^(p-1); odd, vanishes at 0 for every p > 1."""
    pv = _pval(p)
    s = np.asarray(s, dtype=float)
    out = np.sign(s) * np.abs(s) ** (pv - 1.0)
    return float(out) if out.ndim == 0 else out


def phi_p_inverse(p, v):
    """Inverse of phi_p, i.e. phi with the conjugate exponent."""
    pv = _pval(p)
    v = np.asarray(v, dtype=float)
    out = np.sign(v) * np.abs(v) ** (1.0 / (pv - 1.0))
    return float(out) if out.ndim == 0 else out


def dphi_p(p, s, epsilon: float = 0.0):
    """Derivative of phi_p, regularized: (p-1)(s^2 + eps^2)^((p-2)/2).

    Exact for eps = 0; for p != 2 the regularization keeps the value finite
    and positive at s = 0.
    """
    pv = _pval(p)
    s = np.asarray(s, dtype=float)
    out = (pv - 1.0) * (s * s + epsilon * epsilon) ** ((pv - 2.0) / 2.0)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# discrete operator, energies, Rayleigh quotient

def apply_operator(spec: ProblemSpec, u: DiscreteField) -> DiscreteField:
    """Flux-form image r_i = -[phi_p(Du_i) - phi_p(Du_{i-1})]/h + q_i phi_p(u_i)
    with Du_i = (u_{i+1} - u_i)/h, indices mod N."""
    u = spec.require_field(u)
    return apply_operator_kernel(u, spec.coeffs.q, spec.grid.h, spec.p.p)


def forward_diff(spec: ProblemSpec, u: DiscreteField) -> DiscreteField:
    u = spec.require_field(u)
    return (np.roll(u, -1) - u) / spec.grid.h


def centered_diff(spec: ProblemSpec, u: DiscreteField) -> DiscreteField:
    u = spec.require_field(u)
    return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * spec.grid.h)


def p_energy(spec: ProblemSpec, u: DiscreteField) -> float:
    """h sum_i [ |Du_i|^p + q_i |u_i|^p ]; zero only for u = 0."""
    u = spec.require_field(u)
    p = spec.p.p
    du = forward_diff(spec, u)
    return float(spec.grid.h * (np.sum(np.abs(du) ** p) + np.sum(spec.coeffs.q * np.abs(u) ** p)))


def weight_integral(spec: ProblemSpec, u: DiscreteField) -> float:
    """h sum_i m_i |u_i|^p (sign unconstrained)."""
    u = spec.require_field(u)
    return float(spec.grid.h * np.sum(spec.coeffs.m * np.abs(u) ** spec.p.p))


def rayleigh(spec: ProblemSpec, u: DiscreteField) -> float:
    """p_energy / weight_integral; raises when the denominator is degenerate."""
    num = p_energy(spec, u)
    den = weight_integral(spec, u)
    if abs(den) <= RAYLEIGH_DENOM_RTOL * max(num, 1e-300):
        raise DegenerateDenominator(
            f"weighted integral {den:.3e} below tolerance for trial with energy {num:.3e}")
    return num / den


def w_norm(spec: ProblemSpec, u: DiscreteField) -> float:
    """Natural norm (p_energy)^(1/p)."""
    return p_energy(spec, u) ** (1.0 / spec.p.p)


def l2_norm(spec: ProblemSpec, u: DiscreteField) -> float:
    u = spec.require_field(u)
    return float(np.sqrt(spec.grid.h * np.dot(u, u)))


def grid_dot(spec: ProblemSpec, a: DiscreteField, b: DiscreteField) -> float:
    return float(spec.grid.h * np.dot(a, b))


def sup_norm(u: DiscreteField) -> float:
    return float(np.max(np.abs(u)))
