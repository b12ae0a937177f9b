"""The conservative skew products with a contracting fiber.

Base ``h = 2 Id`` on T^m (m = n - 1), coupling ``x_1 + ... + x_m`` and fiber
``psi(t) = phi(t + 1/(4 lam)) - 1/4``, where ``phi`` has slope ``lam`` on
``[0, 1/(2 lam)]`` and slope ``eta = (2k-1) lam / (2 lam - 1)`` on the rest,
with degree ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import algebra
from .errors import InvalidParameterError
from .model import (AffineBaseMap, PiecewiseLinearCircleMap, SkewProductSystem,
                    evaluate)
from .rational import as_rational

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class Theorem3Params:
    n: int
    k: int
    lam: Fraction

    def __post_init__(self):
        lam = as_rational(self.lam)
        object.__setattr__(self, "lam", lam)
        if self.n < 2:
            raise InvalidParameterError(f"n = {self.n} must be >= 2")
        if self.k < 2:
            raise InvalidParameterError(f"k = {self.k} must be >= 2")
        if lam == HALF:
            raise InvalidParameterError("lambda = 1/2 makes 2*lambda - 1 = 0 in eta")
        if not HALF < lam < 1:
            raise InvalidParameterError(f"lambda = {lam} must lie in (1/2, 1)")

    @property
    def m(self) -> int:
        return self.n - 1

    @property
    def eta(self) -> Fraction:
        return (2 * self.k - 1) * self.lam / (2 * self.lam - 1)

    @property
    def shift(self) -> Fraction:
        """``1/(4 lam)``: half the length of the contracting interval."""
        return 1 / (4 * self.lam)


def contraction_expansion_map(k: int, lam) -> PiecewiseLinearCircleMap:
    """The unshifted ``phi``: slope ``lam`` then ``eta``, lift from 0 to ``k``."""
    p = Theorem3Params(2, k, lam)
    cut = 1 / (2 * p.lam)
    return PiecewiseLinearCircleMap((0, cut, 1), (0, HALF, k))


def fiber_map(params: Theorem3Params, contraction=None) -> PiecewiseLinearCircleMap:
    """``phi(t + c) - 1/4`` with ``c = 1/(4 lam)`` unrolled on [0, 1].

    Breakpoints ``0, c, 1 - c, 1``; slopes ``lam, eta, lam``.  Passing a
    different ``contraction`` slope keeps the breakpoints and degree and
    lets the middle slope absorb the change.
    """
    c = params.shift
    lam = params.lam if contraction is None else as_rational(contraction)
    rise = lam * c
    return PiecewiseLinearCircleMap((0, c, 1 - c, 1),
                                    (0, rise, params.k - rise, params.k))


def build_theorem3(params: Theorem3Params) -> SkewProductSystem:
    m = params.m
    base = AffineBaseMap(algebra.identity(m, 2), (0,) * m)
    return SkewProductSystem(base, (1,) * m, Fraction(0), fiber_map(params))


def build_perturbed(params: Theorem3Params, delta=Fraction(1, 100)) -> SkewProductSystem:
    """Family member whose contracting slope is bumped to ``lam + delta``.

    Breakpoints stay put, so the contracting image no longer has length
    1/2 and the reciprocal Jacobian sum drifts away from 1.
    """
    sys = build_theorem3(params)
    fiber = fiber_map(params, params.lam + as_rational(delta))
    return SkewProductSystem(sys.base, sys.coupling, sys.fiber_offset, fiber)


def match_theorem3(sys: SkewProductSystem) -> Theorem3Params | None:
    """Recover the parameters if ``sys`` is exactly a member of the family."""
    try:
        params = Theorem3Params(sys.n, sys.fiber.degree, sys.fiber.slopes[0])
    except InvalidParameterError:
        return None
    return params if build_theorem3(params) == sys else None


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class IdentityReport:
    params: Theorem3Params
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def failures(self) -> list[IdentityCheck]:
        return [c for c in self.checks if not c.ok]


def theorem3_identities(params: Theorem3Params) -> IdentityReport:
    """Check the defining identities of the family in exact arithmetic.

    The values on both sides are read off the constructed fiber map rather
    than recomputed from the closed forms, so a construction bug shows up.
    """
    lam, k = params.lam, params.k
    fiber = build_theorem3(params).fiber
    slopes = fiber.slopes
    eta = slopes[1]
    c = params.shift
    checks = [
        IdentityCheck("eta = (2k-1)lam/(2lam-1)", eta, (2 * k - 1) * lam / (2 * lam - 1)),
        IdentityCheck("1/lam + (2k-1)/eta = 2", 1 / slopes[0] + (2 * k - 1) / eta, Fraction(2)),
        IdentityCheck("eta(1 - 1/(2lam)) + 1/2 = k", eta * (1 - 1 / (2 * lam)) + HALF, Fraction(k)),
        IdentityCheck("contracting length = 1/(2lam)",
                      fiber.breakpoints[1] + (1 - fiber.breakpoints[-2]), 1 / (2 * lam)),
        IdentityCheck("contracting image length = 1/2",
                      (fiber.lift_values[1] - fiber.lift_values[0])
                      + (fiber.lift_values[-1] - fiber.lift_values[-2]), HALF),
        IdentityCheck("degree = k", Fraction(fiber.degree), Fraction(k)),
        IdentityCheck("psi(0) = 0", fiber.lift_values[0], Fraction(0)),
        IdentityCheck("contracting slopes = lam", min(slopes[0], slopes[-1]), lam),
        IdentityCheck("shift = 1/(4lam)", fiber.breakpoints[1], c),
    ]
    return IdentityReport(params, tuple(checks))


def contraction_witness(params: Theorem3Params):
    """Fixed point ``x0 = 0`` of ``h`` and the interval ``(-c, c)`` around
    ``t = 0`` (lift coordinates) on which the fiber map over ``x0`` has slope ``lam``.
    """
    sys = build_theorem3(params)
    x0 = (Fraction(0),) * params.m
    if sys.base(x0) != x0:
        raise AssertionError("0 is not fixed by the base map")
    c = params.shift
    fiber = sys.fiber
    if not (fiber.slopes[0] == fiber.slopes[-1] == params.lam < 1):
        raise AssertionError("fiber is not contracting near 0")
    if evaluate(sys, x0 + (Fraction(0),)) != x0 + (Fraction(0),):
        raise AssertionError("f(0) != 0")
    return x0, (-c, c)
