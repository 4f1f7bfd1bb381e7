"""Direct solves for periodic (cyclic tridiagonal) Jacobians.

The linearized operator on the periodic grid is tridiagonal plus two
corner entries.  The corner is folded away with a rank-one update
(Sherman-Morrison) on top of a banded LU, and small bordered systems
(extra dense rows/columns, e.g. an arclength constraint) are eliminated
through the Schur complement of the border block.
"""

import numpy as np
from scipy.linalg import solve_banded

from .errors import NoConvergence


class CyclicTridiag:
    """Symmetric cyclic tridiagonal matrix: diagonal d, coupling e_i between
    nodes i and i+1 (i = 0..N-2), corner c between nodes N-1 and 0."""

    def __init__(self, diag, off, corner):
        self.d = np.asarray(diag, dtype=float)
        self.e = np.asarray(off, dtype=float)
        self.c = float(corner)
        self.N = self.d.shape[0]
        if self.e.shape[0] != self.N - 1:
            raise ValueError("off-diagonal must have N-1 entries")

    def matvec(self, x):
        y = self.d * x
        y[:-1] += self.e * x[1:]
        y[1:] += self.e * x[:-1]
        y[0] += self.c * x[-1]
        y[-1] += self.c * x[0]
        return y

    def solve(self, b):
        """Solve for one RHS (shape N) or several (shape N x k)."""
        b = np.asarray(b, dtype=float)
        single = b.ndim == 1
        B = b[:, None] if single else b

        d = self.d.copy()
        if self.c == 0.0:
            X = self._banded_solve(d, B)
            return X[:, 0] if single else X

        # corner folded out: A = T + u v^T with u = (gamma,0,..,c),
        # v = (1,0,..,c/gamma)
        gamma = -d[0] if d[0] != 0.0 else 1.0
        d[0] -= gamma
        d[-1] -= self.c * self.c / gamma

        rhs = np.concatenate([B, np.zeros((self.N, 1))], axis=1)
        rhs[0, -1] = gamma
        rhs[-1, -1] = self.c
        Y = self._banded_solve(d, rhs)
        z = Y[:, -1]
        X = Y[:, :-1]
        vz = z[0] + (self.c / gamma) * z[-1]
        vX = X[0, :] + (self.c / gamma) * X[-1, :]
        denom = 1.0 + vz
        if denom == 0.0 or not np.isfinite(denom):
            raise NoConvergence("singular cyclic tridiagonal system")
        X = X - np.outer(z, vX / denom)
        if not np.all(np.isfinite(X)):
            raise NoConvergence("cyclic tridiagonal solve produced non-finite values")
        return X[:, 0] if single else X

    def _banded_solve(self, d, B):
        ab = np.zeros((3, self.N))
        ab[0, 1:] = self.e
        ab[1, :] = d
        ab[2, :-1] = self.e
        try:
            return solve_banded((1, 1), ab, B)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"banded solve failed: {exc}") from None


def solve_bordered(core: CyclicTridiag, cols, rows, corner, rhs_top, rhs_bot):
    """Solve [[A, B], [C, D]] [x; y] = [b; c] with A the cyclic tridiagonal
    core, B = cols (N x k), C = rows (k x N), D = corner (k x k).

    Uses the Schur complement of D; valid while A is nonsingular, which the
    continuation driver guarantees away from exact folds by step halving.
    """
    cols = np.atleast_2d(np.asarray(cols, dtype=float))
    if cols.shape[0] != core.N:
        cols = cols.T
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    corner = np.atleast_2d(np.asarray(corner, dtype=float))
    rhs_bot = np.atleast_1d(np.asarray(rhs_bot, dtype=float))
    k = cols.shape[1]

    stacked = np.column_stack([rhs_top, cols])
    sol = core.solve(stacked)
    xb = sol[:, 0]
    XB = sol[:, 1:]
    S = corner - rows @ XB
    try:
        y = np.linalg.solve(S, rhs_bot - rows @ xb)
    except np.linalg.LinAlgError:
        raise NoConvergence("singular bordered system") from None
    x = xb - XB @ y
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise NoConvergence("bordered solve produced non-finite values")
    return (x, y) if k > 1 else (x, float(y[0]))
