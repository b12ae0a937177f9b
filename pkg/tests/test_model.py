from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from torus_transit import algebra, family, model
from torus_transit.errors import (DegeneratePointError, DimensionError, InvalidInputError,
                                  SingularMatrixError, UnsupportedOrientationError)
from torus_transit.model import (AffineBaseMap, PiecewiseLinearCircleMap, SkewProductSystem,
                                 evaluate, lift_eval, linear_part)

from strategies import rationals, unit_rationals

F = Fraction
FAM_22 = family.build_theorem3(family.Theorem3Params(2, 2, F(3, 4)))
FAM_23 = family.build_theorem3(family.Theorem3Params(2, 3, F(3, 4)))


@st.composite
def circle_maps(draw):
    pieces = draw(st.integers(1, 4))
    cuts = sorted(set(draw(st.lists(st.builds(F, st.integers(1, 29), st.just(30)),
                                    min_size=pieces - 1, max_size=pieces - 1))))
    bp = (F(0), *cuts, F(1))
    deg = draw(st.integers(-4, 4).filter(bool))
    sign = 1 if deg > 0 else -1
    weights = draw(st.lists(st.integers(1, 9), min_size=len(bp) - 1, max_size=len(bp) - 1))
    start = draw(rationals)
    total = sum(weights)
    lv = [start]
    for w in weights:
        lv.append(lv[-1] + sign * F(abs(deg) * w, total))
    return PiecewiseLinearCircleMap(bp, tuple(lv))


@st.composite
def systems(draw, max_m=2):
    m = draw(st.integers(1, max_m))
    while True:
        a = tuple(tuple(draw(st.integers(-3, 3)) for _ in range(m)) for _ in range(m))
        if algebra.determinant(a) != 0:
            break
    b = tuple(draw(st.builds(F, st.integers(-3, 3), st.integers(1, 4))) for _ in range(m))
    c = tuple(draw(st.integers(-3, 3)) for _ in range(m))
    beta = draw(st.builds(F, st.integers(-3, 3), st.integers(1, 5)))
    return SkewProductSystem(AffineBaseMap(a, b), c, beta, draw(circle_maps()))


# -- circle maps ---------------------------------------------------------------

def test_circle_map_validation():
    with pytest.raises(InvalidInputError):
        PiecewiseLinearCircleMap((0, 1), (0, 0))
    with pytest.raises(InvalidInputError):
        PiecewiseLinearCircleMap((0, F(1, 2), 1), (0, F(3, 2), 1))
    with pytest.raises(InvalidInputError):
        PiecewiseLinearCircleMap((0, 1), (0, F(1, 2)))
    with pytest.raises(InvalidInputError):
        PiecewiseLinearCircleMap((F(1, 3), 1), (0, 1))
    with pytest.raises(InvalidInputError):
        PiecewiseLinearCircleMap((0, 1), (0, 1.0))


def test_circle_preimage_examples():
    phi = family.contraction_expansion_map(2, F(3, 4))
    assert model.circle_preimages(phi, F(1, 4)) == [(F(1, 3), F(3, 4)), (F(5, 6), F(9, 2))]
    ident = PiecewiseLinearCircleMap.linear(1)
    assert model.circle_preimages(ident, F(2, 7)) == [(F(2, 7), 1)]


@given(circle_maps(), unit_rationals)
def test_circle_preimages_are_exact_and_complete(psi, s):
    pre = psi.preimages(s)
    if s in psi.breakpoint_images():
        return
    assert len(pre) == abs(psi.degree)
    for t, slope in pre:
        assert 0 <= t < 1
        assert psi(t) == s
        assert slope == psi.slope_at(t)
    assert len({t for t, _ in pre}) == len(pre)


@given(circle_maps(), rationals, st.integers(-3, 3))
def test_circle_lift_degree_equivariance(psi, t, k):
    assert psi.lift(t + k) == psi.lift(t) + k * psi.degree


# -- base maps -----------------------------------------------------------------

def test_base_map_rejects_singular():
    with pytest.raises(SingularMatrixError):
        AffineBaseMap(((1, 2), (2, 4)), (0, 0))
    with pytest.raises(DimensionError):
        AffineBaseMap(((2,),), (0, 0))


@given(systems(), st.data())
def test_base_preimages(sys, data):
    base = sys.base
    y = tuple(data.draw(unit_rationals) for _ in range(base.dim))
    pre = base.preimages(y)
    assert len(pre) == len(set(pre)) == base.degree
    for x in pre:
        assert all(0 <= v < 1 for v in x)
        assert base(x) == y


def test_base_preimages_of_doubling_square():
    base = AffineBaseMap(((2, 0), (0, 2)), (0, 0))
    assert len(base.preimages((F(1, 3), F(1, 5)))) == 4


# -- systems -------------------------------------------------------------------

def test_eval_examples():
    assert evaluate(FAM_23, (F(0), F(0))) == (0, 0)
    ident = model.identity_system(3)
    p = (F(1, 3), F(2, 7), F(5, 11))
    assert evaluate(ident, p) == p
    for t in (F(1, 100), F(1, 17), F(-1, 50)):
        assert lift_eval(FAM_22, (0, t)) == (0, F(3, 4) * t)


def test_eval_dimension_error():
    with pytest.raises(DimensionError):
        evaluate(FAM_23, (F(0),))


def test_eval_float_path():
    out = evaluate(FAM_23, (0.25, 0.5))
    assert out[0] == 0.5
    assert isinstance(out[1], float)


def test_lift_examples():
    assert FAM_22.fiber.lift(1) - FAM_22.fiber.lift(0) == 2
    lin = model.linear_system(((2, 1), (1, 1)), (3, -1), 4)
    p = (F(1, 3), F(-2, 5), F(7, 4))
    assert lift_eval(lin, p) == algebra.matvec(linear_part(lin), p)


def test_linear_part_examples():
    assert linear_part(FAM_23) == ((2, 0), (1, 3))
    t32 = family.build_theorem3(family.Theorem3Params(3, 2, F(3, 4)))
    assert linear_part(t32) == ((2, 0, 0), (0, 2, 0), (1, 1, 2))
    assert linear_part(model.identity_system(3)) == algebra.identity(3)


@given(systems(), st.data())
def test_lift_lattice_equivariance(sys, data):
    p = tuple(data.draw(rationals) for _ in range(sys.n))
    v = tuple(data.draw(st.integers(-2, 2)) for _ in range(sys.n))
    shifted = lift_eval(sys, tuple(a + b for a, b in zip(p, v)))
    expected = tuple(a + b for a, b in zip(lift_eval(sys, p),
                                           algebra.matvec(linear_part(sys), v)))
    assert shifted == expected


@given(systems(), st.data())
def test_projection_equivariance(sys, data):
    p = tuple(data.draw(rationals) for _ in range(sys.n))
    reduced = tuple(x - (x.numerator // x.denominator) for x in p)
    assert evaluate(sys, reduced) == tuple(v - (v.numerator // v.denominator)
                                           for v in lift_eval(sys, p))


@given(systems(), st.data())
def test_semiconjugacy_to_base(sys, data):
    x = tuple(data.draw(unit_rationals) for _ in range(sys.n - 1))
    t1, t2 = data.draw(unit_rationals), data.draw(unit_rationals)
    assert evaluate(sys, x + (t1,))[:-1] == evaluate(sys, x + (t2,))[:-1] == sys.base(x)


@given(systems())
def test_char_poly_factors_through_base(sys):
    t = sympy.symbols("t")
    lhs = sympy.Poly(list(reversed(algebra.char_poly(linear_part(sys)))), t)
    rhs = sympy.Poly(list(reversed(algebra.char_poly(sys.base.matrix))), t) * sympy.Poly(
        t - sys.fiber_eigenvalue, t)
    assert lhs == rhs


@given(systems(), st.data())
def test_system_preimage_count_and_images(sys, data):
    q = tuple(data.draw(unit_rationals) for _ in range(sys.n))
    try:
        pre = model.system_preimages(sys, q)
    except DegeneratePointError:
        return
    assert len(pre) == abs(algebra.determinant(linear_part(sys))) == sys.degree
    for p, jac in pre:
        assert evaluate(sys, p) == q
        assert jac == sys.base_degree * abs(sys.fiber.slope_at(p[-1]))


def test_system_preimages_theorem3_example():
    q = (F(1, 7), F(2, 11))
    jacs = sorted(j for _, j in model.system_preimages(FAM_22, q))
    assert len(jacs) == 4
    assert model.reciprocal_jacobian_sum(FAM_22, q) == 1
    # 2 base preimages, each with one contracting and one expanding fiber preimage
    # or two expanding ones
    assert set(jacs) <= {F(3, 2), F(9)}
    ident = model.identity_system(2)
    assert model.system_preimages(ident, (F(1, 3), F(1, 2))) == [((F(1, 3), F(1, 2)), 1)]


def test_system_preimages_jacobian_pattern():
    # over the base preimages 0 and 1/2 of y = 0 the fiber targets are 1/5 and
    # 7/10; only 1/5 lies in the image [0, 1/4] u [3/4, 1] of the contracting pieces
    q = (F(0), F(1, 5))
    jacs = sorted(j for _, j in model.system_preimages(FAM_22, q))
    assert jacs == [F(3, 2), 9, 9, 9]
    assert sum(1 / j for j in jacs) == 1


def test_system_preimages_degenerate():
    with pytest.raises(DegeneratePointError):
        model.system_preimages(FAM_22, (F(0), F(0)))


# -- deviation bounds and slabs ------------------------------------------------

def test_lift_deviation_examples():
    assert model.lift_deviation_bound(model.linear_system(((2,),), (1,), 3)) == 0
    half = SkewProductSystem(AffineBaseMap(((2,),), (F(1, 2),)), (1,), 0,
                             PiecewiseLinearCircleMap.linear(3))
    assert model.lift_deviation_bound(half) == F(1, 2)
    # |psi_hat(t) - 2t| at the breakpoints 0, 1/3, 2/3, 1 of the k = 2 fiber
    fiber = FAM_22.fiber
    expected = max(abs(v - 2 * b) for b, v in zip(fiber.breakpoints, fiber.lift_values))
    assert model.lift_deviation_bound(FAM_22) == expected == F(5, 12)


@given(systems(max_m=1), st.data())
def test_lift_deviation_bound_dominates_samples(sys, data):
    bound = model.lift_deviation_bound(sys)
    p = tuple(data.draw(rationals) for _ in range(sys.n))
    diff = [a - b for a, b in zip(lift_eval(sys, p), algebra.matvec(linear_part(sys), p))]
    assert max(abs(d) for d in diff) <= bound


@pytest.mark.parametrize("bound, degree, expected", [
    (0, 2, (0, 0)), (3, 2, (-3, 3)), (3, 4, (-1, 1)), (F(5, 12), 3, (-1, 1)),
])
def test_slab_bounds_examples(bound, degree, expected):
    assert model.slab_bounds_for(bound, degree) == expected


def test_slab_bounds_orientation():
    rev = model.linear_system(((2,),), (0,), -2)
    with pytest.raises(UnsupportedOrientationError):
        model.slab_bounds(rev)
    with pytest.raises(UnsupportedOrientationError):
        model.slab_bounds(model.identity_system(2))


@given(st.builds(F, st.integers(0, 200), st.integers(1, 20)), st.integers(2, 9))
def test_slab_inequalities(bound, degree):
    k1, k2 = model.slab_bounds_for(bound, degree)
    assert degree * k2 - bound >= k2
    assert degree * k1 + bound <= k1
    if k2 > 0:
        assert degree * (k2 - 1) - bound < k2 - 1


def test_height_deviation_requires_eigenvector():
    with pytest.raises(InvalidInputError):
        model.height_deviation_bound(FAM_23, (1, 0))


def test_height_deviation_matches_lift_deviation_without_translation():
    w = algebra.transverse_invariant_hyperplane(linear_part(FAM_23), 3)
    assert model.height_deviation_bound(FAM_23, w) == model.lift_deviation_bound(FAM_23)
