"""Numerical exploration: orbits, coverage, push-forward uniformity and the
invariant set ``S0`` between two hyperplanes of the lift.

Orbits keep the base coordinates exactly on the lattice ``(1/Q) Z^m`` (``Q``
a large prime, times the translation denominators).  Iterating an expanding
integer matrix in binary floating point shifts bits out and collapses every
orbit of ``2 Id`` onto 0 within ~53 steps; on the lattice the base is an
exact permutation and only the fiber is rounded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from . import _kernels, algebra
from .errors import DimensionError, InvalidInputError, UnsupportedOrientationError
from .model import SkewProductSystem, height, linear_part, slab_bounds

# safe prime 2q+1 with 2 a primitive root: the doubling map permutes the
# nonzero residues in a single cycle
LATTICE_PRIME = 2147483579
_INT64_LIMIT = 2 ** 62


@dataclass(frozen=True)
class PackedSystem:
    """Float and integer arrays the kernels consume."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    beta: float
    bp: np.ndarray
    lv: np.ndarray
    slopes: np.ndarray
    degree: int
    A_int: np.ndarray
    B_int: np.ndarray
    c_int: np.ndarray
    Q: int


def pack(sys: SkewProductSystem) -> PackedSystem:
    a = sys.base.matrix
    b = sys.base.translation
    den = math.lcm(*(x.denominator for x in b))
    q = LATTICE_PRIME * den
    worst = max(sum(abs(v) for v in row) for row in a) * q + q
    if worst >= _INT64_LIMIT:
        raise InvalidInputError("base matrix/translation too large for the int64 lattice orbit")
    return PackedSystem(
        A=np.array(a, dtype=np.float64),
        b=np.array([float(x) for x in b]),
        c=np.array(sys.coupling, dtype=np.float64),
        beta=float(sys.fiber_offset),
        bp=np.array([float(x) for x in sys.fiber.breakpoints]),
        lv=np.array([float(x) for x in sys.fiber.lift_values]),
        slopes=np.array([float(x) for x in sys.fiber.slopes]),
        degree=sys.fiber.degree,
        A_int=np.array(a, dtype=np.int64),
        B_int=np.array([int(x * q) % q for x in b], dtype=np.int64),
        c_int=np.array(sys.coupling, dtype=np.int64),
        Q=q,
    )


def evaluate_float(sys: SkewProductSystem, points, backend=None) -> np.ndarray:
    """Double precision ``f`` on an ``(M, n)`` array (or a single point)."""
    pts = np.asarray(points, dtype=np.float64)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != sys.n:
        raise DimensionError(f"points must have {sys.n} columns")
    out = _kernels.eval_batch(pts, pack(sys), backend)
    return out[0] if single else out


# -- orbits and coverage -----------------------------------------------------

@dataclass(frozen=True)
class OrbitConfig:
    length: int
    seed: int = 0
    start: tuple | None = None

    def __post_init__(self):
        if self.length < 1:
            raise InvalidInputError("orbit length must be >= 1")


def orbit(sys: SkewProductSystem, cfg: OrbitConfig, backend=None) -> np.ndarray:
    """Forward orbit ``z, f(z), ..., f^{N-1}(z)`` as an ``(N, n)`` array.

    Without an explicit start the base lattice point and fiber coordinate
    are drawn from ``cfg.seed``.  Explicit base coordinates are snapped to
    the nearest lattice point.
    """
    packed = pack(sys)
    m = sys.n - 1
    if cfg.start is None:
        rng = np.random.default_rng(cfg.seed)
        a0 = rng.integers(0, packed.Q, size=m, dtype=np.int64)
        t0 = float(rng.random())
    else:
        if len(cfg.start) != sys.n:
            raise DimensionError(f"start must have {sys.n} coordinates")
        a0 = np.array([round((x % 1) * packed.Q) % packed.Q for x in cfg.start[:m]],
                      dtype=np.int64)
        t0 = float(cfg.start[m]) % 1.0
    return _kernels.orbit_lattice(a0, t0, cfg.length, packed, backend)


@dataclass(frozen=True)
class CoverageReport:
    grid: int
    visited: int
    cells: int
    length: int

    @property
    def fraction(self) -> float:
        return self.visited / self.cells


def cell_indices(points: np.ndarray, grid: int) -> np.ndarray:
    idx = np.minimum((points * grid).astype(np.int64), grid - 1)
    flat = np.zeros(len(points), dtype=np.int64)
    for col in range(points.shape[1]):
        flat = flat * grid + idx[:, col]
    return flat


def coverage(points: np.ndarray, grid: int) -> CoverageReport:
    """Fraction of the ``grid**n`` uniform cells visited by ``points``."""
    if grid < 2:
        raise InvalidInputError("grid must be >= 2")
    points = np.atleast_2d(points)
    cells = grid ** points.shape[1]
    visited = int(np.count_nonzero(np.bincount(cell_indices(points, grid), minlength=cells)))
    return CoverageReport(grid, visited, cells, len(points))


# -- push-forward uniformity ------------------------------------------------

CHI2_QUANTILE = 0.999


@dataclass(frozen=True)
class UniformityReport:
    samples: int
    grid: int
    statistic: float
    threshold: float
    dof: int

    @property
    def passed(self) -> bool:
        return self.statistic <= self.threshold


def pushforward_uniformity(sys: SkewProductSystem, samples: int, grid: int, seed: int = 0,
                           backend=None) -> UniformityReport:
    """Chi-square of image cell counts of ``samples`` uniform points vs uniform.

    If ``f`` preserves Lebesgue measure the images are again uniform.  The
    threshold is the 99.9% quantile with ``grid**n - 1`` degrees of freedom.
    """
    cells = grid ** sys.n
    if samples < cells:
        raise InvalidInputError("need at least one expected point per cell")
    rng = np.random.default_rng(seed)
    images = evaluate_float(sys, rng.random((samples, sys.n)), backend)
    counts = np.bincount(cell_indices(images, grid), minlength=cells)
    expected = samples / cells
    statistic = float(((counts - expected) ** 2).sum() / expected)
    threshold = float(stats.chi2.ppf(CHI2_QUANTILE, cells - 1))
    return UniformityReport(samples, grid, statistic, threshold, cells - 1)


# -- the invariant set S0 ----------------------------------------------------

@dataclass(frozen=True)
class SurfaceSample:
    """Fiber ``[a, b]`` of ``S0`` over base point ``x`` in height coordinates."""

    x: tuple
    a: float
    b: float
    depth: int


@dataclass(frozen=True)
class SurfaceFrame:
    """Witness, slab and constants fixing the height coordinate frame."""

    witness: tuple
    k1: int
    k2: int
    offset: Fraction

    def sigma(self, x) -> Fraction:
        return height(self.witness, tuple(x) + (0,))


def surface_frame(sys: SkewProductSystem, witness=None) -> SurfaceFrame:
    lam = sys.fiber_eigenvalue
    if lam < 2:
        raise UnsupportedOrientationError(
            f"fiber eigenvalue {lam} < 2; the surface needs an orientation preserving expansion")
    if sys.n - 1 > 2:
        raise InvalidInputError("surface grids are limited to base dimension <= 2")
    if witness is None:
        witness = algebra.transverse_invariant_hyperplane(linear_part(sys), lam)
        if witness is None:
            raise InvalidInputError("no invariant hyperplane transverse to e_n exists")
    witness = tuple(Fraction(w) for w in witness)
    k1, k2 = slab_bounds(sys, witness)
    offset = height(witness, sys.base.translation + (0,)) + sys.fiber_offset
    return SurfaceFrame(witness, k1, k2, offset)


def grid_points(m: int, grid: int) -> list[tuple]:
    axis = [Fraction(i, grid) for i in range(grid)]
    pts: list[tuple] = [()]
    for _ in range(m):
        pts = [p + (v,) for p in pts for v in axis]
    return pts


def _theta(sys: SkewProductSystem, frame: SurfaceFrame, x0: tuple, depth: int) -> list[float]:
    """``sigma(h_hat^j(x0)) mod 1`` for ``j < depth``, computed exactly.

    Translating ``x`` by ``w_n Z^m`` changes ``sigma`` by integers along the
    whole forward orbit, so the base orbit is reduced modulo ``w_n``.
    """
    period = abs(frame.witness[-1].numerator)
    out = []
    x = x0
    for _ in range(depth):
        s = frame.sigma(x)
        out.append(float(s - math.floor(s)))
        x = tuple(v - period * math.floor(v / period) for v in sys.base.lift(x))
    return out


def surface_intervals(sys: SkewProductSystem, points, depth: int, frame: SurfaceFrame | None = None,
                      backend=None) -> np.ndarray:
    """``(P, depth + 1, 2)`` array of the nested intervals at every depth."""
    frame = frame or surface_frame(sys)
    if depth < 0:
        raise InvalidInputError("depth must be >= 0")
    theta = np.array([_theta(sys, frame, tuple(p), depth) for p in points],
                     dtype=np.float64).reshape(len(points), depth)
    return _kernels.pullback_intervals(theta, frame.offset, sys.fiber_eigenvalue,
                                       frame.k1, frame.k2, pack(sys), backend)


def surface(sys: SkewProductSystem, base_grid: int, depth: int, witness=None,
            select: str | None = None, backend=None) -> list[SurfaceSample]:
    """Approximate ``S0`` fiberwise on a uniform base grid.

    The fiber of ``S0`` over ``x`` is the set of heights whose forward orbit
    stays in the slab ``[k1, k2]``; it is the limit of the pullbacks of the
    slab along the forward base orbit.  ``select="max"`` or ``"min"``
    collapses each interval to that endpoint.
    """
    frame = surface_frame(sys, witness)
    pts = grid_points(sys.n - 1, base_grid)
    iv = surface_intervals(sys, pts, depth, frame, backend)[:, depth, :]
    out = []
    for p, (a, b) in zip(pts, iv):
        if select == "max":
            a = b
        elif select == "min":
            b = a
        elif select is not None:
            raise InvalidInputError(f"unknown selection {select!r}")
        out.append(SurfaceSample(p, float(a), float(b), depth))
    return out


def _fiber_image(sys, frame, x, u, packed):
    s = frame.sigma(x)
    th = float(s - math.floor(s))
    shift = sys.fiber_eigenvalue * th + float(frame.offset)
    return shift + float(_kernels.fiber_lift(np.array([u - th]), packed)[0])


def surface_invariance_residual(sys: SkewProductSystem, samples: list[SurfaceSample],
                                witness=None, backend=None) -> float:
    """Largest Hausdorff distance between the image of a stored interval and
    the stored interval over the image base point.

    Image points that land on the grid up to a translation in the hyperplane
    lattice are looked up; any other image interval is recomputed directly
    at the same depth.
    """
    frame = surface_frame(sys, witness)
    packed = pack(sys)
    table = {s.x: s for s in samples}
    worst = 0.0
    for s in samples:
        img = sys.base.lift(s.x)
        shift = tuple(math.floor(v) for v in img)
        key = tuple(v - z for v, z in zip(img, shift))
        hit = table.get(key)
        if hit is not None and frame.sigma(shift).denominator == 1 and hit.depth == s.depth:
            a2, b2 = hit.a, hit.b
        else:
            a2, b2 = surface_intervals(sys, [img], s.depth, frame, backend)[0, s.depth]
        fa = _fiber_image(sys, frame, s.x, s.a, packed)
        fb = _fiber_image(sys, frame, s.x, s.b, packed)
        worst = max(worst, abs(fa - a2), abs(fb - b2))
    return worst
