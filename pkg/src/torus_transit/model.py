"""Skew-product endomorphisms ``f(x, t) = (A_h x + b, c.x + beta + psi(t))``.

Points are tuples.  Rational coordinates give exact results; float
coordinates go through the same formulas in double precision.  The lift
acts on R^n without reduction, the torus map reduces every coordinate to
[0, 1).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import algebra
from .algebra.matrix import as_int_matrix, matvec
from .errors import (DegeneratePointError, DimensionError, InvalidInputError,
                     SingularMatrixError, UnsupportedOrientationError)
from .rational import as_rational, reduce_mod1


@dataclass(frozen=True)
class PiecewiseLinearCircleMap:
    """Circle covering given by a monotone piecewise affine lift on [0, 1].

    ``lift_values[i]`` is the lift at ``breakpoints[i]``; the lift is affine in
    between and extends to R by ``lift(t + 1) = lift(t) + degree``.
    """

    breakpoints: tuple
    lift_values: tuple

    def __post_init__(self):
        bp = tuple(as_rational(x) for x in self.breakpoints)
        lv = tuple(as_rational(x) for x in self.lift_values)
        if len(bp) != len(lv) or len(bp) < 2:
            raise InvalidInputError("need matching breakpoints and lift values (>= 2)")
        if bp[0] != 0 or bp[-1] != 1:
            raise InvalidInputError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(bp, bp[1:])):
            raise InvalidInputError("breakpoints must be strictly increasing")
        d = lv[-1] - lv[0]
        if d.denominator != 1 or d == 0:
            raise InvalidInputError(
                f"lift increment {d} must be a nonzero integer (degree of a covering)")
        diffs = [b - a for a, b in zip(lv, lv[1:])]
        if not (all(x > 0 for x in diffs) or all(x < 0 for x in diffs)):
            raise InvalidInputError("lift must be strictly monotone")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "lift_values", lv)

    @classmethod
    def linear(cls, degree: int = 1) -> PiecewiseLinearCircleMap:
        return cls((0, 1), (0, degree))

    @property
    def degree(self) -> int:
        """Signed degree: negative when the map reverses orientation."""
        return int(self.lift_values[-1] - self.lift_values[0])

    @property
    def slopes(self) -> tuple[Fraction, ...]:
        bp, lv = self.breakpoints, self.lift_values
        return tuple((lv[i + 1] - lv[i]) / (bp[i + 1] - bp[i])
                     for i in range(len(bp) - 1))

    def _piece(self, frac) -> int:
        # left piece at an exact breakpoint
        return min(max(bisect_left(self.breakpoints, frac) - 1, 0),
                   len(self.breakpoints) - 2)

    def lift(self, t):
        k = math.floor(t)
        frac = t - k
        i = self._piece(frac)
        return (self.lift_values[i] + self.slopes[i] * (frac - self.breakpoints[i])
                + self.degree * k)

    def __call__(self, t):
        return reduce_mod1(self.lift(t))

    def slope_at(self, t) -> Fraction:
        return self.slopes[self._piece(reduce_mod1(t))]

    def breakpoint_images(self) -> frozenset:
        return frozenset(reduce_mod1(v) for v in self.lift_values)

    def preimages(self, s) -> list[tuple[Fraction, Fraction]]:
        """All ``(t, slope)`` with ``t`` in [0, 1) and ``psi(t) = s mod 1``."""
        s = reduce_mod1(as_rational(s))
        bp, lv = self.breakpoints, self.lift_values
        out = []
        for i, slope in enumerate(self.slopes):
            lo, hi = lv[i], lv[i + 1]
            if slope > 0:  # lo <= s + j < hi
                js = range(math.ceil(lo - s), math.ceil(hi - s))
            else:  # hi < s + j <= lo
                js = range(math.floor(hi - s) + 1, math.floor(lo - s) + 1)
            for j in js:
                t = reduce_mod1(bp[i] + (s + j - lo) / slope)
                out.append((t, slope))
        return sorted(out)


@dataclass(frozen=True)
class AffineBaseMap:
    """``h(x) = A_h x + b mod 1`` on the (n-1)-torus, ``det A_h != 0``."""

    matrix: tuple
    translation: tuple

    def __post_init__(self):
        a = as_int_matrix(self.matrix)
        algebra.matrix.require_square(a)
        b = tuple(as_rational(x) for x in self.translation)
        if len(b) != len(a):
            raise DimensionError("translation length must match the base matrix")
        if not a:
            raise DimensionError("the base must have dimension >= 1")
        if algebra.determinant(a) == 0:
            raise SingularMatrixError("base matrix must be nonsingular (a covering)")
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "translation", b)

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def degree(self) -> int:
        return abs(algebra.determinant(self.matrix))

    def lift(self, x: Sequence) -> tuple:
        if len(x) != self.dim:
            raise DimensionError(f"base point must have {self.dim} coordinates")
        return tuple(y + b for y, b in zip(matvec(self.matrix, x), self.translation))

    def __call__(self, x: Sequence) -> tuple:
        return tuple(reduce_mod1(y) for y in self.lift(x))

    def inverse_lift(self, y: Sequence) -> tuple:
        """Exact ``A_h^{-1} (y - b)``."""
        rhs = tuple(as_rational(v) - b for v, b in zip(y, self.translation))
        return algebra.matrix.solve(self.matrix, rhs)

    def preimages(self, y: Sequence) -> list[tuple]:
        """All ``|det A_h|`` points of the torus mapped to ``y``.

        With ``U A V = D`` the solutions of ``A x = y - b + z`` modulo Z^m are
        ``V D^{-1} (U (y - b) + r)`` for ``0 <= r_i < d_i``.
        """
        snf = algebra.smith_normal_form(self.matrix)
        d = snf.diagonal
        rhs = matvec(snf.U, tuple(as_rational(v) - b for v, b in zip(y, self.translation)))
        out = []
        for r in _box(d):
            scaled = tuple((rhs[i] + r[i]) / d[i] for i in range(len(d)))
            out.append(tuple(reduce_mod1(v) for v in matvec(snf.V, scaled)))
        return sorted(out)


def _box(bounds):
    if not bounds:
        yield ()
        return
    for head in range(bounds[0]):
        for tail in _box(bounds[1:]):
            yield (head,) + tail


@dataclass(frozen=True)
class SkewProductSystem:
    """``f(x, t) = (h(x), c.x + beta + psi(t))`` on the n-torus."""

    base: AffineBaseMap
    coupling: tuple
    fiber_offset: Fraction
    fiber: PiecewiseLinearCircleMap

    def __post_init__(self):
        c = tuple(self.coupling)
        for x in c:
            if isinstance(x, bool) or not isinstance(x, int):
                raise InvalidInputError("coupling entries must be integers")
        if len(c) != self.base.dim:
            raise DimensionError("coupling length must match the base dimension")
        object.__setattr__(self, "coupling", c)
        object.__setattr__(self, "fiber_offset", as_rational(self.fiber_offset))

    @property
    def n(self) -> int:
        return self.base.dim + 1

    @property
    def fiber_eigenvalue(self) -> int:
        """Signed eigenvalue of the linear part on ``e_n``."""
        return self.fiber.degree

    @property
    def fiber_degree(self) -> int:
        return abs(self.fiber.degree)

    @property
    def base_degree(self) -> int:
        return self.base.degree

    @property
    def degree(self) -> int:
        return self.fiber_degree * self.base_degree


def _split(sys: SkewProductSystem, p: Sequence):
    if len(p) != sys.n:
        raise DimensionError(f"point must have {sys.n} coordinates, got {len(p)}")
    return tuple(p[:-1]), p[-1]


def lift_eval(sys: SkewProductSystem, p: Sequence) -> tuple:
    """The lift ``(A_h x + b, c.x + beta + psi_hat(t))`` on R^n."""
    x, t = _split(sys, p)
    fiber = (sum(c * xi for c, xi in zip(sys.coupling, x))
             + sys.fiber_offset + sys.fiber.lift(t))
    return sys.base.lift(x) + (fiber,)


def evaluate(sys: SkewProductSystem, p: Sequence) -> tuple:
    return tuple(reduce_mod1(v) for v in lift_eval(sys, p))


def linear_part(sys: SkewProductSystem) -> tuple:
    """Block matrix ``[[A_h, 0], [c, lambda_n]]``."""
    rows = [row + (0,) for row in sys.base.matrix]
    rows.append(sys.coupling + (sys.fiber_eigenvalue,))
    return tuple(rows)


def circle_preimages(psi: PiecewiseLinearCircleMap, s) -> list[tuple[Fraction, Fraction]]:
    return psi.preimages(s)


def system_preimages(sys: SkewProductSystem, q: Sequence) -> list[tuple[tuple, Fraction]]:
    """Every preimage of ``q`` with its Jacobian ``|det A_h| * |slope|``.

    Raises DegeneratePointError when some fiber target is the image of a
    breakpoint, where the one-sided slopes disagree.
    """
    y, s = _split(sys, tuple(as_rational(v) for v in q))
    bad = sys.fiber.breakpoint_images()
    jac_base = sys.base_degree
    out = []
    for x in sys.base.preimages(y):
        target = reduce_mod1(s - sum(c * xi for c, xi in zip(sys.coupling, x))
                             - sys.fiber_offset)
        if target in bad:
            raise DegeneratePointError(
                f"fiber target {target} over base point {x} is a breakpoint image")
        for t, slope in sys.fiber.preimages(target):
            out.append((x + (t,), jac_base * abs(slope)))
    return out


def reciprocal_jacobian_sum(sys: SkewProductSystem, q: Sequence) -> Fraction:
    """Sum of ``1/J`` over the preimages of ``q``; equals 1 iff the density is preserved at q."""
    return sum((1 / j for _, j in system_preimages(sys, q)), Fraction(0))


def _fiber_deviations(sys: SkewProductSystem, shift=Fraction(0)):
    d = sys.fiber_eigenvalue
    return [abs(shift + sys.fiber_offset + v - d * t)
            for t, v in zip(sys.fiber.breakpoints, sys.fiber.lift_values)]


def lift_deviation_bound(sys: SkewProductSystem) -> Fraction:
    """Exact ``sup |f_hat(p) - A_f p|`` (sup-norm) over R^n.

    On the unit cube the difference is ``(b, beta + psi_hat(t) - lambda_n t)``,
    piecewise affine in ``t`` and constant in ``x``; it is Z^n periodic.
    """
    base = [abs(b) for b in sys.base.translation]
    return max(base + _fiber_deviations(sys))


def height(witness: Sequence, p: Sequence):
    """Fiber height ``w.p / w_n`` measured from the hyperplane ``w.p = 0``."""
    return sum(w * x for w, x in zip(witness, p)) / witness[-1]


def height_deviation_bound(sys: SkewProductSystem, witness: Sequence) -> Fraction:
    """Exact ``sup |H(f_hat(p)) - lambda_n H(p)|`` for the height ``H`` of ``witness``.

    Because ``w^T A_f = lambda_n w^T`` the deviation is
    ``H(b, 0) + beta + psi_hat(t) - lambda_n t``, independent of ``x``.
    """
    af = linear_part(sys)
    if witness[-1] == 0 or not algebra.is_left_eigenvector(af, witness, sys.fiber_eigenvalue):
        raise InvalidInputError("witness is not a transverse left eigenvector of A_f")
    shift = height(witness, sys.base.translation + (0,))
    return max(_fiber_deviations(sys, shift))


def slab_bounds_for(bound, degree: int) -> tuple[int, int]:
    """Smallest symmetric integer slab with ``degree*k2 - bound >= k2``."""
    if degree < 2:
        raise UnsupportedOrientationError(
            f"fiber eigenvalue {degree} < 2; pass to the square of the map by hand")
    k2 = math.ceil(Fraction(bound) / (degree - 1))
    return -k2, k2


def slab_bounds(sys: SkewProductSystem, witness: Sequence | None = None) -> tuple[int, int]:
    """Integer slab ``[k1, k2]`` whose preimage under the lift lies inside it.

    Without a witness the sup-norm deviation bound is used; with one, the
    exact height deviation in the frame of its hyperplane.
    """
    if sys.fiber_eigenvalue < 2:
        raise UnsupportedOrientationError(
            f"fiber eigenvalue {sys.fiber_eigenvalue} < 2; pass to the square of "
            "the map by hand (not representable in this family)")
    bound = (lift_deviation_bound(sys) if witness is None
             else height_deviation_bound(sys, witness))
    return slab_bounds_for(bound, sys.fiber_eigenvalue)


def identity_system(n: int = 2) -> SkewProductSystem:
    m = n - 1
    return SkewProductSystem(AffineBaseMap(algebra.identity(m), (0,) * m),
                             (0,) * m, Fraction(0), PiecewiseLinearCircleMap.linear(1))


def linear_system(base_matrix, coupling, fiber_degree: int) -> SkewProductSystem:
    """Linear toral endomorphism with block-triangular matrix (zero offsets)."""
    a = as_int_matrix(base_matrix)
    return SkewProductSystem(AffineBaseMap(a, (0,) * len(a)), tuple(coupling),
                             Fraction(0), PiecewiseLinearCircleMap.linear(fiber_degree))
