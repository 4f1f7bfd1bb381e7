"""Nonlinearities f for the perturbed problem
-(phi_p(u'))' + q phi_p(u) = lambda m f(u).

A NonlinearitySpec carries the evaluator together with its declared
limits f0 = lim_{s->0} f(s)/phi_p(s) and finf = lim_{|s|->inf}
f(s)/phi_p(s) (either may be 0 or infinite), an optional zero pattern
(t2, t1, s1, s2) describing sign pockets of f away from the origin, and
optional kernel codes so the shooting integrator can evaluate f inside
compiled loops.

The three cut-off constructions used to reduce infinite limits to finite
ones are provided as wrappers: ``tailcut`` replaces f outside [-2n, 2n]
by n*phi_p (finite slope n at infinity), ``corecut`` replaces f near the
origin by (1/n)*phi_p (slope 1/n at zero), and ``coreboost`` by n*phi_p
(slope n at zero); each bridges linearly on the transition bands so the
result is continuous.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import ConfigError
from .problem import PExponent, dphi_p, phi_p


@dataclass(frozen=True)
class NonlinearitySpec:
    name: str
    evaluate: Callable
    f0: float
    finf: float
    derivative: Optional[Callable] = None
    zero_pattern: Optional[Tuple[float, float, float, float]] = None
    signum: bool = True
    kernel_code: Optional[int] = None
    kernel_params: Optional[np.ndarray] = None

    def __post_init__(self):
        zp = self.zero_pattern
        if zp is not None:
            t2, t1, s1, s2 = zp
            if not (t2 <= t1 < 0.0 < s1 <= s2):
                raise ConfigError(
                    f"zero pattern must satisfy t2 <= t1 < 0 < s1 <= s2, got {zp}")

    def d(self, s):
        """Derivative of f; central finite difference when no analytic
        callback was supplied."""
        if self.derivative is not None:
            return self.derivative(s)
        s = np.asarray(s, dtype=float)
        step = 1e-6 * (1.0 + np.abs(s))
        return (self.evaluate(s + step) - self.evaluate(s - step)) / (2.0 * step)

    def validate(self, p) -> None:
        """Sample-based consistency checks of the declared structure."""
        pv = p.p if isinstance(p, PExponent) else float(p)
        f = self.evaluate
        if self.signum:
            if abs(float(f(0.0))) > 1e-12:
                raise ConfigError(f"nonlinearity '{self.name}' declared signum but f(0) != 0")
            sample = np.array([-7.3, -1.0, -1e-2, 1e-2, 1.0, 7.3])
            if not np.all(np.asarray(f(sample)) * sample > 0.0):
                raise ConfigError(
                    f"nonlinearity '{self.name}' violates the signum condition")
        if math.isfinite(self.f0):
            for s in (1e-3, 1e-4, 1e-5):
                ratio = float(f(s)) / phi_p(pv, s)
                if abs(ratio - self.f0) > 0.05 * max(1.0, abs(self.f0)):
                    raise ConfigError(
                        f"nonlinearity '{self.name}': f/phi_p = {ratio:.6g} at s={s} "
                        f"inconsistent with declared limit at zero {self.f0}")
        if math.isfinite(self.finf):
            for s in (1e2, 1e3):
                ratio = float(f(s)) / phi_p(pv, s)
                if abs(ratio - self.finf) > 0.05 * max(1.0, abs(self.finf)):
                    raise ConfigError(
                        f"nonlinearity '{self.name}': f/phi_p = {ratio:.6g} at s={s} "
                        f"inconsistent with declared limit at infinity {self.finf}")
        if self.zero_pattern is not None:
            t2, t1, s1, s2 = self.zero_pattern
            probes_pos = []
            if t2 < t1:
                probes_pos.append(0.5 * (t2 + t1))
            probes_pos.append(0.5 * s1)
            probes_pos.append(s2 + max(1.0, s2))
            probes_neg = [t2 - max(1.0, -t2), 0.5 * t1]
            if s1 < s2:
                probes_neg.append(0.5 * (s1 + s2))
            if not all(float(f(s)) > 0.0 for s in probes_pos):
                raise ConfigError(f"'{self.name}': sampled signs violate the zero pattern")
            if not all(float(f(s)) < 0.0 for s in probes_neg):
                raise ConfigError(f"'{self.name}': sampled signs violate the zero pattern")


def phi_p_family(p) -> NonlinearitySpec:
    """Homogeneous f = phi_p; the nonlinear problem reduces to the
    eigenvalue problem."""
    pv = p.p if isinstance(p, PExponent) else float(p)
    return NonlinearitySpec(
        name="phi_p",
        evaluate=lambda s: phi_p(pv, s),
        derivative=lambda s: dphi_p(pv, s, 1e-12),
        f0=1.0, finf=1.0,
        kernel_code=0, kernel_params=np.array([pv]))


def rational12() -> NonlinearitySpec:
    """f(s) = s (1 + 2 s^2) / (1 + s^2): slope 1 at zero, slope 2 at
    infinity (for p = 2)."""
    def f(s):
        s = np.asarray(s, dtype=float)
        s2 = s * s
        return s * (1.0 + 2.0 * s2) / (1.0 + s2)

    def fd(s):
        s = np.asarray(s, dtype=float)
        s2 = s * s
        return (2.0 * s2 * s2 + 5.0 * s2 + 1.0) / (1.0 + s2) ** 2

    return NonlinearitySpec(name="rational12", evaluate=f, derivative=fd,
                            f0=1.0, finf=2.0,
                            kernel_code=1, kernel_params=np.zeros(0))


def sqrt_odd() -> NonlinearitySpec:
    """Odd square root sign(s) sqrt(|s|): infinite slope at zero, zero
    slope at infinity (for p = 2)."""
    def f(s):
        s = np.asarray(s, dtype=float)
        return np.sign(s) * np.sqrt(np.abs(s))

    def fd(s):
        s = np.asarray(s, dtype=float)
        return 0.5 / np.sqrt(np.maximum(np.abs(s), 1e-12))

    return NonlinearitySpec(name="sqrt_odd", evaluate=f, derivative=fd,
                            f0=math.inf, finf=0.0,
                            kernel_code=2, kernel_params=np.zeros(0))


def quintic_gap() -> NonlinearitySpec:
    """f(s) = s (1 - s^2)(4 - s^2) / (1 + s^4): zeros at 0, +-1, +-2 with
    sign pockets, slope 4 at zero and 1 at infinity (for p = 2)."""
    def f(s):
        s = np.asarray(s, dtype=float)
        s2 = s * s
        return s * (1.0 - s2) * (4.0 - s2) / (1.0 + s2 * s2)

    return NonlinearitySpec(name="quintic_gap", evaluate=f,
                            f0=4.0, finf=1.0, signum=False,
                            zero_pattern=(-2.0, -1.0, 1.0, 2.0),
                            kernel_code=3, kernel_params=np.zeros(0))


def _cutoff(base: NonlinearitySpec, n: float, p, code: int, name: str,
            f0: float, finf: float) -> NonlinearitySpec:
    pv = p.p if isinstance(p, PExponent) else float(p)
    if base.kernel_code is None or base.kernel_code > 3:
        raise ConfigError("cut-off constructions need a base family with a kernel code")
    params = np.concatenate([[pv, float(n), float(base.kernel_code)],
                             np.asarray(base.kernel_params, dtype=float)])

    def f(s):
        return _kernels.f_eval_array(code, params, s)

    return NonlinearitySpec(name=f"{name}({base.name},n={n:g})", evaluate=f,
                            f0=f0, finf=finf, signum=base.signum,
                            kernel_code=code, kernel_params=params)


def tailcut(base: NonlinearitySpec, n: float, p) -> NonlinearitySpec:
    """Replace f outside [-2n, 2n] by n*phi_p with linear bridges; keeps the
    zero limit and forces the infinity limit to n."""
    return _cutoff(base, n, p, 4, "tailcut", base.f0, float(n))


def corecut(base: NonlinearitySpec, n: float, p) -> NonlinearitySpec:
    """Replace f on [-1/n, 1/n] by phi_p/n with bridges up to 2/n; keeps the
    infinity limit and forces the zero limit to 1/n."""
    return _cutoff(base, n, p, 5, "corecut", 1.0 / float(n), base.finf)


def coreboost(base: NonlinearitySpec, n: float, p) -> NonlinearitySpec:
    """Replace f on [-1/n, 1/n] by n*phi_p with bridges up to 2/n; keeps the
    infinity limit and forces the zero limit to n."""
    return _cutoff(base, n, p, 6, "coreboost", float(n), base.finf)


_BASE_FAMILIES = {
    "phi_p": phi_p_family,
    "rational12": lambda p=None: rational12(),
    "sqrt_odd": lambda p=None: sqrt_odd(),
    "quintic_gap": lambda p=None: quintic_gap(),
}


def make_nonlinearity(kind: str, params, p) -> NonlinearitySpec:
    """Config-facing factory.  kind is a base family name, or one of
    tailcut/corecut/coreboost with params = (n, base_kind)."""
    if kind in _BASE_FAMILIES:
        if kind == "phi_p":
            return phi_p_family(p)
        return _BASE_FAMILIES[kind]()
    if kind in ("tailcut", "corecut", "coreboost"):
        if len(params) < 2:
            raise ConfigError(f"{kind} needs parameters (n, base_kind)")
        n = float(params[0])
        base_kind = str(params[1])
        if base_kind not in _BASE_FAMILIES:
            raise ConfigError(f"unknown base family '{base_kind}' for {kind}")
        base = make_nonlinearity(base_kind, (), p)
        return {"tailcut": tailcut, "corecut": corecut, "coreboost": coreboost}[kind](base, n, p)
    raise ConfigError(f"unknown nonlinearity kind '{kind}'")
