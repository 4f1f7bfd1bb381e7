"""Hot numerical kernels with optional numba acceleration.

Two implementations live side by side for every kernel: a numba
``@njit`` version (scalar loops, compiled) and a pure-numpy one.  The
environment variable ``PLAP_NUMBA`` selects the active path at import
time: unset or ``1`` uses numba when it is importable, ``0`` forces the
numpy fallback.  ``benchmarks/bench_kernels.py`` compares the two.

Coefficient functions and nonlinearities are passed to the compiled
kernels as small integer codes plus a flat float parameter vector so the
integrator never calls back into Python.  Codes:

coefficients (kind):
    0  constant            params = (c,)
    1  cosine              params = (a, b, k)     a + b*cos(2*pi*k*x/T)
    2  piecewise constant  params = (K, x_0..x_{K-1}, v_0..v_{K-1})

nonlinearities (code):
    0  power law sign(s)*|s|**(p-1)               params = (p,)
    1  rational12   s*(1+2s^2)/(1+s^2)
    2  sqrt_odd     sign(s)*sqrt(|s|)
    3  quintic_gap  s*(1-s^2)*(4-s^2)/(1+s^4)
    4  tailcut      params = (p, n, base_code, base_params...)
    5  corecut      params = (p, n, base_code, base_params...)
    6  coreboost    params = (p, n, base_code, base_params...)
"""

import math
import os

import numpy as np

_env = os.environ.get("PLAP_NUMBA", "").strip().lower()
if _env in ("0", "off", "false", "no"):
    _want_numba = False
else:
    _want_numba = True

if _want_numba:
    try:
        from numba import njit

        USE_NUMBA = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        USE_NUMBA = False
else:
    USE_NUMBA = False

if not USE_NUMBA:
    def njit(*args, **kwargs):  # noqa: D103 - identity decorator fallback
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap

OVERFLOW_LIMIT = 1e12


# ---------------------------------------------------------------------------
# scalar helpers (compiled when numba is active)

@njit(cache=True, nogil=True)
def _phi(p, s):
    if s == 0.0:
        return 0.0
    if s > 0.0:
        return s ** (p - 1.0)
    return -((-s) ** (p - 1.0))


@njit(cache=True, nogil=True)
def _phi_inv(p, v):
    if v == 0.0:
        return 0.0
    e = 1.0 / (p - 1.0)
    if v > 0.0:
        return v ** e
    return -((-v) ** e)


@njit(cache=True, nogil=True)
def _coeff(kind, params, x, T):
    if kind == 0:
        return params[0]
    if kind == 1:
        return params[0] + params[1] * math.cos(2.0 * math.pi * params[2] * x / T)
    # piecewise constant on [x_j, x_{j+1}), wrapping at T
    K = int(params[0])
    xm = x % T
    val = params[1 + K + K - 1]  # value of the last piece (covers wrap)
    for j in range(K - 1):
        if params[1 + j] <= xm < params[1 + j + 1]:
            val = params[1 + K + j]
            return val
    return val


@njit(cache=True, nogil=True)
def _f_base(code, params, off, s):
    if code == 0:
        return _phi(params[off], s)
    if code == 1:
        s2 = s * s
        return s * (1.0 + 2.0 * s2) / (1.0 + s2)
    if code == 2:
        if s >= 0.0:
            return math.sqrt(s)
        return -math.sqrt(-s)
    # code == 3
    s2 = s * s
    return s * (1.0 - s2) * (4.0 - s2) / (1.0 + s2 * s2)


@njit(cache=True, nogil=True)
def _f_eval(code, params, s):
    if code <= 3:
        return _f_base(code, params, 0, s)
    p = params[0]
    n = params[1]
    base = int(params[2])
    if code == 4:
        # original inside [-n, n], linear bridges, slope-n power law outside
        if -n <= s <= n:
            return _f_base(base, params, 3, s)
        if n < s < 2.0 * n:
            fn = _f_base(base, params, 3, n)
            return (n * _phi(p, 2.0 * n) - fn) / n * (s - n) + fn
        if -2.0 * n < s < -n:
            fm = _f_base(base, params, 3, -n)
            return (n * _phi(p, 2.0 * n) + fm) / n * (s + n) + fm
        return n * _phi(p, s)
    if code == 5:
        # (1/n) power law inside [-1/n, 1/n], original outside [-2/n, 2/n]
        a = 1.0 / n
        if -a <= s <= a:
            return _phi(p, s) / n
        if a < s < 2.0 * a:
            f2 = _f_base(base, params, 3, 2.0 * a)
            return (f2 - n ** (-p)) * (n * s - 2.0) + f2
        if -2.0 * a < s < -a:
            f2 = _f_base(base, params, 3, -2.0 * a)
            return -(f2 + n ** (-p)) * (n * s + 2.0) + f2
        return _f_base(base, params, 3, s)
    # code == 6: n * power law inside [-1/n, 1/n], original outside
    a = 1.0 / n
    if -a <= s <= a:
        return n * _phi(p, s)
    if a < s < 2.0 * a:
        f2 = _f_base(base, params, 3, 2.0 * a)
        return (f2 - n ** (2.0 - p)) * (n * s - 2.0) + f2
    if -2.0 * a < s < -a:
        f2 = _f_base(base, params, 3, -2.0 * a)
        return -(f2 + n ** (2.0 - p)) * (n * s + 2.0) + f2
    return _f_base(base, params, 3, s)


@njit(cache=True, nogil=True)
def _rhs(p, lam, x, T, u, v, qk, qp, mk, mp, fc, fp):
    du = _phi_inv(p, v)
    dv = _coeff(qk, qp, x, T) * _phi(p, u) - lam * _coeff(mk, mp, x, T) * _f_eval(fc, fp, u)
    return du, dv


# ---------------------------------------------------------------------------
# RK4 integration of u' = phi_p^{-1}(v), v' = q
# phi_p(u) - lam m f(u)

@njit(cache=True, nogil=True)
def _rk4_batch_numba(u0, v0, p, lam, T, steps, qk, qp, mk, mp, fc, fp):
    nb = u0.shape[0]
    uT = np.empty(nb)
    vT = np.empty(nb)
    overflow = np.zeros(nb, dtype=np.bool_)
    hstep = T / steps
    for j in range(nb):
        u = u0[j]
        v = v0[j]
        blown = False
        for i in range(steps):
            x = i * hstep
            k1u, k1v = _rhs(p, lam, x, T, u, v, qk, qp, mk, mp, fc, fp)
            k2u, k2v = _rhs(p, lam, x + 0.5 * hstep, T, u + 0.5 * hstep * k1u,
                            v + 0.5 * hstep * k1v, qk, qp, mk, mp, fc, fp)
            k3u, k3v = _rhs(p, lam, x + 0.5 * hstep, T, u + 0.5 * hstep * k2u,
                            v + 0.5 * hstep * k2v, qk, qp, mk, mp, fc, fp)
            k4u, k4v = _rhs(p, lam, x + hstep, T, u + hstep * k3u,
                            v + hstep * k3v, qk, qp, mk, mp, fc, fp)
            u = u + hstep * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
            v = v + hstep * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
            if abs(u) > OVERFLOW_LIMIT or abs(v) > OVERFLOW_LIMIT:
                blown = True
                break
        uT[j] = u
        vT[j] = v
        overflow[j] = blown
    return uT, vT, overflow


@njit(cache=True, nogil=True)
def _rk4_trajectory_numba(u0, v0, p, lam, T, steps, qk, qp, mk, mp, fc, fp):
    us = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    us[0] = u0
    vs[0] = v0
    hstep = T / steps
    u = u0
    v = v0
    for i in range(steps):
        x = i * hstep
        k1u, k1v = _rhs(p, lam, x, T, u, v, qk, qp, mk, mp, fc, fp)
        k2u, k2v = _rhs(p, lam, x + 0.5 * hstep, T, u + 0.5 * hstep * k1u,
                        v + 0.5 * hstep * k1v, qk, qp, mk, mp, fc, fp)
        k3u, k3v = _rhs(p, lam, x + 0.5 * hstep, T, u + 0.5 * hstep * k2u,
                        v + 0.5 * hstep * k2v, qk, qp, mk, mp, fc, fp)
        k4u, k4v = _rhs(p, lam, x + hstep, T, u + hstep * k3u,
                        v + hstep * k3v, qk, qp, mk, mp, fc, fp)
        u = u + hstep * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v = v + hstep * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        if abs(u) > OVERFLOW_LIMIT or abs(v) > OVERFLOW_LIMIT:
            us[i + 1:] = u
            vs[i + 1:] = v
            return us, vs, True
        us[i + 1] = u
        vs[i + 1] = v
    return us, vs, False


# ---------------------------------------------------------------------------
# numpy fallback: same contracts, vectorized over the batch axis

def _phi_np(p, s):
    s = np.asarray(s, dtype=float)
    return np.sign(s) * np.abs(s) ** (p - 1.0)


def _phi_inv_np(p, v):
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.abs(v) ** (1.0 / (p - 1.0))


def _coeff_np(kind, params, x, T):
    x = np.asarray(x, dtype=float)
    if kind == 0:
        return np.full_like(x, params[0])
    if kind == 1:
        return params[0] + params[1] * np.cos(2.0 * np.pi * params[2] * x / T)
    K = int(params[0])
    breaks = np.asarray(params[1:1 + K])
    vals = np.asarray(params[1 + K:1 + 2 * K])
    idx = np.searchsorted(breaks, x % T, side="right") - 1
    idx = np.where(idx < 0, K - 1, idx)
    return vals[idx]


def _f_eval_np(code, params, s):
    s = np.asarray(s, dtype=float)
    if code == 0:
        return _phi_np(params[0], s)
    if code == 1:
        s2 = s * s
        return s * (1.0 + 2.0 * s2) / (1.0 + s2)
    if code == 2:
        return np.sign(s) * np.sqrt(np.abs(s))
    if code == 3:
        s2 = s * s
        return s * (1.0 - s2) * (4.0 - s2) / (1.0 + s2 * s2)
    flat = s.ravel()
    res = np.empty_like(flat)
    for i in range(flat.shape[0]):
        res[i] = _f_eval(code, params, flat[i])
    return res.reshape(s.shape)


def _rk4_batch_numpy(u0, v0, p, lam, T, steps, qk, qp, mk, mp, fc, fp):
    u = np.array(u0, dtype=float)
    v = np.array(v0, dtype=float)
    hstep = T / steps
    alive = np.ones(u.shape, dtype=bool)

    def rhs(x, uu, vv):
        du = _phi_inv_np(p, vv)
        q = _coeff_np(qk, qp, x, T)
        m = _coeff_np(mk, mp, x, T)
        dv = q * _phi_np(p, uu) - lam * m * _f_eval_np(fc, fp, uu)
        return du, dv

    for i in range(steps):
        x = i * hstep
        k1u, k1v = rhs(x, u, v)
        k2u, k2v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k1u, v + 0.5 * hstep * k1v)
        k3u, k3v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k2u, v + 0.5 * hstep * k2v)
        k4u, k4v = rhs(x + hstep, u + hstep * k3u, v + hstep * k3v)
        un = u + hstep * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        vn = v + hstep * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        u = np.where(alive, un, u)
        v = np.where(alive, vn, v)
        blown = (np.abs(u) > OVERFLOW_LIMIT) | (np.abs(v) > OVERFLOW_LIMIT)
        alive &= ~blown
        if not alive.any():
            break
    return u, v, ~alive


def _rk4_trajectory_numpy_impl(u0, v0, p, lam, T, steps, qk, qp, mk, mp, fc, fp):
    us = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    us[0], vs[0] = u0, v0
    u, v = float(u0), float(v0)
    hstep = T / steps

    def rhs(x, uu, vv):
        du = float(_phi_inv_np(p, vv))
        q = float(_coeff_np(qk, qp, x, T))
        m = float(_coeff_np(mk, mp, x, T))
        dv = q * float(_phi_np(p, uu)) - lam * m * float(_f_eval_np(fc, fp, uu))
        return du, dv

    for i in range(steps):
        x = i * hstep
        k1u, k1v = rhs(x, u, v)
        k2u, k2v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k1u, v + 0.5 * hstep * k1v)
        k3u, k3v = rhs(x + 0.5 * hstep, u + 0.5 * hstep * k2u, v + 0.5 * hstep * k2v)
        k4u, k4v = rhs(x + hstep, u + hstep * k3u, v + hstep * k3v)
        u += hstep * (k1u + 2.0 * k2u + 2.0 * k3u + k4u) / 6.0
        v += hstep * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
        if abs(u) > OVERFLOW_LIMIT or abs(v) > OVERFLOW_LIMIT:
            us[i + 1:] = u
            vs[i + 1:] = v
            return us, vs, True
        us[i + 1] = u
        vs[i + 1] = v
    return us, vs, False


# ---------------------------------------------------------------------------
# grid operator kernels

@njit(cache=True, nogil=True)
def _apply_operator_numba(u, q, h, p):
    N = u.shape[0]
    r = np.empty(N)
    gprev = _phi(p, (u[0] - u[N - 1]) / h)
    for i in range(N):
        inext = i + 1 if i + 1 < N else 0
        g = _phi(p, (u[inext] - u[i]) / h)
        r[i] = -(g - gprev) / h + q[i] * _phi(p, u[i])
        gprev = g
    return r


def _apply_operator_numpy(u, q, h, p):
    g = _phi_np(p, (np.roll(u, -1) - u) / h)
    return -(g - np.roll(g, 1)) / h + q * _phi_np(p, u)


if USE_NUMBA:
    rk4_batch = _rk4_batch_numba
    rk4_trajectory = _rk4_trajectory_numba
    apply_operator_kernel = _apply_operator_numba
else:
    rk4_batch = _rk4_batch_numpy
    rk4_trajectory = _rk4_trajectory_numpy_impl
    apply_operator_kernel = _apply_operator_numpy

coeff_eval = _coeff_np
f_eval_array = _f_eval_np
