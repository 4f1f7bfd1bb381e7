"""Built-in desk-scale fixtures used by the property suite and tests.

The underlying problem has no canonical benchmark data, so all fixtures
are constructed here from coefficient families with known structure:

* ``const``   q = 1, m = 1 on T = 1: the constant function is an exact
  discrete eigenfunction with eigenvalue 1 for every p.
* ``fourier`` p = 2, q = 1, m = 1 on T = 2*pi: the spectrum is
  1 + k^2 in closed form.
* ``mcos``    q = 1, m = cos x on T = 2*pi: sign-changing weight whose
  half-period translation symmetry forces the two principal eigenvalues
  to be negatives of each other.
"""

from .nonlinearity import (NonlinearitySpec, phi_p_family, quintic_gap,
                           rational12, sqrt_odd)
from .problem import CoefficientSpec, ProblemSpec, make_problem

TWO_PI = 6.283185307179586476925286766559


def const_problem(p: float = 2.0, N: int = 256, T: float = 1.0) -> ProblemSpec:
    return make_problem(p, T, N, CoefficientSpec("constant", (1.0,)),
                        CoefficientSpec("constant", (1.0,)))


def fourier_problem(N: int = 512) -> ProblemSpec:
    return make_problem(2.0, TWO_PI, N, CoefficientSpec("constant", (1.0,)),
                        CoefficientSpec("constant", (1.0,)))


def mcos_problem(p: float = 2.0, N: int = 512) -> ProblemSpec:
    return make_problem(p, TWO_PI, N, CoefficientSpec("constant", (1.0,)),
                        CoefficientSpec("cosine", (0.0, 1.0, 1.0)))


PROBLEMS = {
    "const": const_problem,
    "fourier": fourier_problem,
    "mcos": mcos_problem,
}

NONLINEARITIES = {
    "phi_p": phi_p_family,
    "rational12": lambda p=None: rational12(),
    "sqrt_odd": lambda p=None: sqrt_odd(),
    "quintic_gap": lambda p=None: quintic_gap(),
}


def get_problem(name: str, **kwargs) -> ProblemSpec:
    return PROBLEMS[name](**kwargs)


def get_nonlinearity(name: str, p: float = 2.0) -> NonlinearitySpec:
    return NONLINEARITIES[name](p)
