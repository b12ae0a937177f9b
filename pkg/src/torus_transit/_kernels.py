"""Double precision inner loops with a numba path and a pure numpy fallback.

The numba path is used when numba imports and ``TORUS_TRANSIT_DISABLE_NUMBA``
is unset (or "0").  Every public kernel takes ``backend="numba"|"numpy"``
so both paths can be compared directly.

Conventions shared by both paths:

* reduction mod 1 is ``x - floor(x)``, with a result of exactly 1.0 (tiny
  negative input) folded to 0.0;
* the fiber lift uses the left piece at an exact breakpoint.
"""

from __future__ import annotations

import math
import os
import warnings
from bisect import bisect_left

import numpy as np

try:
    import numba
    from numba import njit, prange
    HAVE_NUMBA = True
    # an old system TBB only means numba falls back to its OpenMP/workqueue layer
    warnings.filterwarnings("ignore", message="The TBB threading layer")
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    prange = range

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda fn: fn

BACKENDS = ("numba", "numpy")


def default_backend() -> str:
    flag = os.environ.get("TORUS_TRANSIT_DISABLE_NUMBA", "").strip().lower()
    if not HAVE_NUMBA or flag not in ("", "0", "false", "no"):
        return "numpy"
    return "numba"


def resolve_backend(backend: str | None) -> str:
    backend = backend or default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def configure_threads() -> None:
    """Cap numba's worker count by ``TORUS_TRANSIT_THREADS`` if set."""
    value = os.environ.get("TORUS_TRANSIT_THREADS")
    if HAVE_NUMBA and value:
        numba.set_num_threads(max(1, min(int(value), numba.config.NUMBA_NUM_THREADS)))


# -- compiled kernels ---------------------------------------------------------

@njit(cache=True)
def _frac(x):
    r = x - math.floor(x)
    if r >= 1.0:
        r = 0.0
    return r


@njit(cache=True)
def _fiber_lift(t, bp, lv, slopes, deg):
    k = math.floor(t)
    f = t - k
    i = np.searchsorted(bp, f) - 1
    if i < 0:
        i = 0
    if i > slopes.shape[0] - 1:
        i = slopes.shape[0] - 1
    return lv[i] + slopes[i] * (f - bp[i]) + deg * k


@njit(cache=True)
def _fiber_lift_inverse(y, bp, lv, slopes, deg):
    # increasing lift only
    z = y - lv[0]
    k = math.floor(z / deg)
    r = z - k * deg
    target = lv[0] + r
    i = np.searchsorted(lv, target, side="right") - 1
    if i < 0:
        i = 0
    if i > slopes.shape[0] - 1:
        i = slopes.shape[0] - 1
    return bp[i] + (target - lv[i]) / slopes[i] + k


@njit(parallel=True, cache=True)
def _eval_batch_nb(points, A, b, c, beta, bp, lv, slopes, deg, out):
    m = A.shape[0]
    for p in prange(points.shape[0]):
        for i in range(m):
            acc = b[i]
            for j in range(m):
                acc += A[i, j] * points[p, j]
            out[p, i] = _frac(acc)
        s = beta
        for j in range(m):
            s += c[j] * points[p, j]
        out[p, m] = _frac(s + _fiber_lift(points[p, m], bp, lv, slopes, deg))


@njit(cache=True)
def _orbit_lattice_nb(a0, t0, steps, A, B, Q, c, beta, bp, lv, slopes, deg, out):
    m = A.shape[0]
    a = a0.copy()
    nxt = a0.copy()
    t = t0
    for step in range(steps):
        for i in range(m):
            out[step, i] = a[i] / Q
        out[step, m] = t
        cx = 0
        for j in range(m):
            cx += c[j] * a[j]
        cx = cx % Q
        t = _frac(cx / Q + beta + _fiber_lift(t, bp, lv, slopes, deg))
        for i in range(m):
            acc = B[i]
            for j in range(m):
                acc += A[i, j] * a[j]
            nxt[i] = acc % Q
        for i in range(m):
            a[i] = nxt[i]


@njit(parallel=True, cache=True)
def _pullback_nb(theta, offset, lam, k1, k2, bp, lv, slopes, deg, out):
    n_pts, depth = theta.shape
    for p in prange(n_pts):
        out[p, 0, 0] = k1
        out[p, 0, 1] = k2
        for d in range(1, depth + 1):
            lo = k1
            hi = k2
            for j in range(d - 1, -1, -1):
                th = theta[p, j]
                shift = lam * th + offset
                lo = th + _fiber_lift_inverse(lo - shift, bp, lv, slopes, deg)
                hi = th + _fiber_lift_inverse(hi - shift, bp, lv, slopes, deg)
                lo = max(lo, k1)
                hi = min(hi, k2)
            out[p, d, 0] = lo
            out[p, d, 1] = hi


# -- numpy fallbacks ---------------------------------------------------------

def _frac_py(x):
    r = x - math.floor(x)
    return 0.0 if r >= 1.0 else r


def _frac_np(x):
    r = x - np.floor(x)
    r[r >= 1.0] = 0.0
    return r


def _fiber_lift_np(t, bp, lv, slopes, deg):
    k = np.floor(t)
    f = t - k
    i = np.clip(np.searchsorted(bp, f) - 1, 0, slopes.shape[0] - 1)
    return lv[i] + slopes[i] * (f - bp[i]) + deg * k


def _fiber_lift_inverse_np(y, bp, lv, slopes, deg):
    z = y - lv[0]
    k = np.floor(z / deg)
    target = lv[0] + (z - k * deg)
    i = np.clip(np.searchsorted(lv, target, side="right") - 1, 0, slopes.shape[0] - 1)
    return bp[i] + (target - lv[i]) / slopes[i] + k


def _eval_batch_numpy(points, A, b, c, beta, bp, lv, slopes, deg):
    m = A.shape[0]
    x, t = points[:, :m], points[:, m]
    out = np.empty_like(points)
    out[:, :m] = _frac_np(x @ A.T + b)
    out[:, m] = _frac_np(x @ c + beta + _fiber_lift_np(t, bp, lv, slopes, deg))
    return out


def _orbit_lattice_python(a0, t0, steps, A, B, Q, c, beta, bp, lv, slopes, deg):
    # sequential recurrence: plain Python scalars are the fast fallback here
    m = len(a0)
    A = [[int(v) for v in row] for row in A]
    B = [int(v) for v in B]
    c = [int(v) for v in c]
    bp_l, lv_l, sl_l = list(bp), list(lv), list(slopes)
    last = len(sl_l) - 1
    a = [int(v) for v in a0]
    t = float(t0)
    out = np.empty((steps, m + 1))
    for step in range(steps):
        for i in range(m):
            out[step, i] = a[i] / Q
        out[step, m] = t
        cx = sum(ci * ai for ci, ai in zip(c, a)) % Q
        k = math.floor(t)
        f = t - k
        i = min(max(bisect_left(bp_l, f) - 1, 0), last)
        lift = lv_l[i] + sl_l[i] * (f - bp_l[i]) + deg * k
        t = _frac_py(cx / Q + beta + lift)
        a = [(sum(A[r][j] * a[j] for j in range(m)) + B[r]) % Q for r in range(m)]
    return out


def _pullback_numpy(theta, offset, lam, k1, k2, bp, lv, slopes, deg):
    n_pts, depth = theta.shape
    out = np.empty((n_pts, depth + 1, 2))
    out[:, 0, 0], out[:, 0, 1] = k1, k2
    for d in range(1, depth + 1):
        lo = np.full(n_pts, float(k1))
        hi = np.full(n_pts, float(k2))
        for j in range(d - 1, -1, -1):
            th = theta[:, j]
            shift = lam * th + offset
            lo = np.maximum(th + _fiber_lift_inverse_np(lo - shift, bp, lv, slopes, deg), k1)
            hi = np.minimum(th + _fiber_lift_inverse_np(hi - shift, bp, lv, slopes, deg), k2)
        out[:, d, 0], out[:, d, 1] = lo, hi
    return out


# -- public dispatch ---------------------------------------------------------

def eval_batch(points, packed, backend=None):
    """Apply the torus map to an ``(M, n)`` array of points."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    args = (packed.A, packed.b, packed.c, packed.beta, packed.bp, packed.lv,
            packed.slopes, packed.degree)
    if resolve_backend(backend) == "numba":
        configure_threads()
        out = np.empty_like(points)
        _eval_batch_nb(points, *args, out)
        return out
    return _eval_batch_numpy(points, *args)


def orbit_lattice(a0, t0, steps, packed, backend=None):
    """Orbit whose base coordinates live exactly on ``(1/Q) Z^m``."""
    args = (packed.A_int, packed.B_int, packed.Q, packed.c_int, packed.beta,
            packed.bp, packed.lv, packed.slopes, packed.degree)
    a0 = np.asarray(a0, dtype=np.int64)
    if resolve_backend(backend) == "numba":
        out = np.empty((steps, a0.shape[0] + 1))
        _orbit_lattice_nb(a0, float(t0), steps, *args, out)
        return out
    return _orbit_lattice_python(a0, t0, steps, *args)


def pullback_intervals(theta, offset, lam, k1, k2, packed, backend=None):
    """Nested slab intervals over each base point for every depth ``0..D``."""
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    args = (float(offset), float(lam), float(k1), float(k2), packed.bp,
            packed.lv, packed.slopes, packed.degree)
    if resolve_backend(backend) == "numba":
        configure_threads()
        out = np.empty((theta.shape[0], theta.shape[1] + 1, 2))
        _pullback_nb(theta, *args, out)
        return out
    return _pullback_numpy(theta, *args)


def fiber_lift(t, packed):
    return _fiber_lift_np(np.asarray(t, dtype=np.float64), packed.bp, packed.lv,
                          packed.slopes, packed.degree)
