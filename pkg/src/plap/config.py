"""Run configuration: flat key/value text files.

Format: one ``key = value`` per line, ``#`` starts a comment, blank
lines ignored.  Every key is optional except the problem definition
(p, T, N and the two coefficient entries).  Unknown keys are rejected
by name.  Serialization round-trips losslessly and the effective
configuration is echoed verbatim into every output file header.

Keys:
    p, T, N                     exponent, period, grid size
    q.kind, q.params            named potential family and its parameters
    m.kind, m.params            named weight family and its parameters
    q.samples, m.samples        raw nodal samples (alternative to families)
    f.kind, f.params            nonlinearity family (for continue/count)
    rng_seed                    integer seed for all randomized machinery
    output_dir                  default output directory
    solver.tol_residual, solver.max_newton, solver.epsilon_reg, solver.damping
    eigen.tol_lambda, eigen.max_iter, eigen.scheme
    oracle.steps
    scan.resolution, scan.n_angles
    cont.step0, cont.step_min, cont.step_max, cont.norm_cap,
    cont.lambda_min, cont.lambda_max, cont.max_points, cont.min_sup
    count.n_starts
"""

import math
from dataclasses import dataclass, field, fields
from typing import List, Optional, Tuple

from .continuation import ContinuationControls
from .eigen import EigenOptions
from .errors import ConfigError
from .nonlinearity import NonlinearitySpec, make_nonlinearity
from .problem import (CoefficientSpec, ProblemSpec, make_problem,
                      make_problem_from_samples)
from .solver import SolveOptions

_KNOWN_KEYS = [
    "p", "T", "N",
    "q.kind", "q.params", "q.samples",
    "m.kind", "m.params", "m.samples",
    "f.kind", "f.params",
    "rng_seed", "output_dir",
    "solver.tol_residual", "solver.max_newton", "solver.epsilon_reg",
    "solver.damping",
    "eigen.tol_lambda", "eigen.max_iter", "eigen.scheme",
    "oracle.steps",
    "scan.resolution", "scan.n_angles",
    "cont.step0", "cont.step_min", "cont.step_max", "cont.norm_cap",
    "cont.lambda_min", "cont.lambda_max", "cont.max_points", "cont.min_sup",
    "count.n_starts",
]


@dataclass
class RunConfig:
    """Parsed configuration; raw key/value pairs are kept for provenance."""

    entries: dict

    def __post_init__(self):
        for key in self.entries:
            if key not in _KNOWN_KEYS:
                raise ConfigError(f"unknown configuration key '{key}'")

    # -- accessors ----------------------------------------------------------
    def _get(self, key, cast, default=None):
        if key not in self.entries:
            return default
        raw = self.entries[key]
        try:
            return cast(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for '{key}': {raw!r} ({exc})") from None

    def _floats(self, key) -> Optional[Tuple[float, ...]]:
        raw = self.entries.get(key)
        if raw is None:
            return None
        try:
            return tuple(float(tok) for tok in raw.split(",") if tok.strip())
        except ValueError:
            raise ConfigError(f"bad comma-separated reals for '{key}': {raw!r}") from None

    @property
    def rng_seed(self) -> int:
        return self._get("rng_seed", int, 12345)

    @property
    def output_dir(self) -> Optional[str]:
        return self.entries.get("output_dir")

    def problem(self) -> ProblemSpec:
        for key in ("p", "T"):
            if key not in self.entries:
                raise ConfigError(f"missing required key '{key}'")
        p = self._get("p", float)
        T = self._get("T", float)
        q_samples = self._floats("q.samples")
        m_samples = self._floats("m.samples")
        if q_samples is not None or m_samples is not None:
            if q_samples is None or m_samples is None:
                raise ConfigError("q.samples and m.samples must be given together")
            if len(q_samples) != len(m_samples):
                raise ConfigError("q.samples and m.samples must have equal length")
            return make_problem_from_samples(p, T, q_samples, m_samples)
        if "N" not in self.entries:
            raise ConfigError("missing required key 'N'")
        N = self._get("N", int)
        q_spec = self._coefficient("q")
        m_spec = self._coefficient("m")
        return make_problem(p, T, N, q_spec, m_spec)

    def _coefficient(self, prefix: str) -> CoefficientSpec:
        kind = self.entries.get(f"{prefix}.kind")
        if kind is None:
            raise ConfigError(f"missing '{prefix}.kind' (or '{prefix}.samples')")
        params = self._floats(f"{prefix}.params") or ()
        return CoefficientSpec(kind, params)

    def nonlinearity(self, spec: ProblemSpec) -> NonlinearitySpec:
        kind = self.entries.get("f.kind")
        if kind is None:
            raise ConfigError("missing 'f.kind' for a nonlinear command")
        raw = self.entries.get("f.params", "")
        params = tuple(tok.strip() for tok in raw.split(",") if tok.strip())
        f = make_nonlinearity(kind, params, spec.p)
        f.validate(spec.p)
        return f

    def solve_options(self) -> SolveOptions:
        return SolveOptions(
            tol_residual=self._get("solver.tol_residual", float, 1e-10),
            max_newton=self._get("solver.max_newton", int, 60),
            epsilon_reg=self._get("solver.epsilon_reg", float, 1e-10),
            damping=self._get("solver.damping", float, 0.5))

    def eigen_options(self) -> EigenOptions:
        return EigenOptions(
            tol_lambda=self._get("eigen.tol_lambda", float, 1e-10),
            max_iter=self._get("eigen.max_iter", int, 400),
            scheme=self._get("eigen.scheme", str, "auto"),
            solver=self.solve_options())

    def continuation_controls(self) -> ContinuationControls:
        return ContinuationControls(
            step0=self._get("cont.step0", float, 0.05),
            step_min=self._get("cont.step_min", float, 1e-6),
            step_max=self._get("cont.step_max", float, 2.0),
            norm_cap=self._get("cont.norm_cap", float, 50.0),
            lambda_window=(self._get("cont.lambda_min", float, -1e6),
                           self._get("cont.lambda_max", float, 1e6)),
            max_points=self._get("cont.max_points", int, 2000),
            min_sup=self._get("cont.min_sup", float, 5.0))

    @property
    def oracle_steps(self) -> int:
        return self._get("oracle.steps", int, 4096)

    @property
    def scan_resolution(self) -> int:
        return self._get("scan.resolution", int, 121)

    @property
    def scan_angles(self) -> int:
        return self._get("scan.n_angles", int, 48)

    @property
    def count_starts(self) -> int:
        return self._get("count.n_starts", int, 20)

    # -- serialization ------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"{key} = {self.entries[key]}" for key in _KNOWN_KEYS
                 if key in self.entries]
        return "\n".join(lines) + "\n"

    def header_lines(self) -> List[str]:
        """Effective configuration echoed into output headers."""
        return [f"{key} = {self.entries[key]}" for key in _KNOWN_KEYS
                if key in self.entries]

    def with_overrides(self, **kv) -> "RunConfig":
        entries = dict(self.entries)
        for key, value in kv.items():
            if value is not None:
                entries[key.replace("__", ".")] = str(value)
        return RunConfig(entries)


def parse_config_text(text: str) -> RunConfig:
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        entries[key] = value
    return RunConfig(entries)


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
