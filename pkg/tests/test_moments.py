import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiclassical_moments.exceptions import DimensionMismatchError, MissingMomentError
from semiclassical_moments.moments import (
    BasicVariable,
    MomentExpression,
    MomentIndex,
    PhasePoint,
    coordinate_layout,
    enumerate_moments,
    evaluate,
    gaussian_point,
    is_physical,
    moment_order,
    truncate,
    uncertainty_defects,
)
from strategies import expressions, single


@pytest.mark.parametrize(
    "idx, order",
    [
        (MomentIndex((2,), (0,)), 2),
        (MomentIndex((1, 0), (0, 1)), 2),
        (MomentIndex((2,), (1,)), 3),
    ],
)
def test_moment_order(idx, order):
    assert moment_order(idx) == order


@pytest.mark.parametrize("N, s, count", [(1, 2, 3), (1, 3, 7), (2, 2, 10), (1, 4, 12), (2, 3, 30)])
def test_enumerate_moments_counts(N, s, count):
    assert len(enumerate_moments(N, s)) == count


def test_enumerate_moments_canonical_order():
    names = [str(idx) for idx in enumerate_moments(1, 3)]
    assert names == ["d(q^2)", "d(q pi)", "d(pi^2)", "d(q^3)", "d(q^2 pi)", "d(q pi^2)", "d(pi^3)"]


def test_moment_names_for_two_pairs():
    assert str(MomentIndex((1, 0), (0, 1))) == "d(q1 pi2)"
    assert str(MomentIndex((1, 1), (0, 0))) == "d(q1 q2)"


def test_enumerate_moments_rejects_first_order():
    with pytest.raises(ValueError):
        enumerate_moments(1, 1)


def test_coordinate_layout_starts_with_basic_variables():
    layout = coordinate_layout(1, 2)
    assert layout[:2] == [BasicVariable.q(), BasicVariable.pi()]
    assert layout[2:] == enumerate_moments(1, 2)


def test_first_order_moments_vanish_and_zeroth_order_is_one():
    assert MomentExpression.of(MomentIndex.single(1, 0)).is_zero()
    assert MomentExpression.of(MomentIndex.single(0, 0), 3) == MomentExpression.constant(3)
    product = single(2, 0) * MomentExpression.of(MomentIndex.single(0, 1))
    assert product.is_zero()


def test_truncate_examples():
    q2, p2 = single(2, 0), single(0, 2)
    q2p = single(2, 1)
    assert truncate(q2 * p2 + q2p, 3) == q2p
    assert truncate(q2 * p2 + single(2, 2), 3).is_zero()
    assert truncate(MomentExpression.hbar(2), 3).is_zero()
    assert truncate(single(3, 0), 3) == single(3, 0)


def test_hbar_counts_as_order_two():
    assert (MomentExpression.hbar(1) * single(2, 0)).max_order() == 4
    assert MomentExpression.hbar(1).truncate(2) == MomentExpression.hbar(1)


@given(expressions(), st.integers(min_value=2, max_value=6))
def test_truncate_is_idempotent(e, s):
    once = truncate(e, s)
    assert truncate(once, s) == once
    assert once.max_order() <= s


@given(expressions(), st.integers(min_value=2, max_value=6), st.integers(min_value=2, max_value=6))
def test_truncate_composes_to_lowest_order(e, s, t):
    assert truncate(truncate(e, s), t) == truncate(e, min(s, t))


@given(expressions(), expressions(), st.integers(min_value=-3, max_value=3))
def test_evaluate_is_linear(a, b, c):
    point = gaussian_point(1, 4, [1.3], 0.7, center=[0.4, -0.2], correlations=[0.3])
    left = (a * c + b).evaluate(point)
    right = c * a.evaluate(point) + b.evaluate(point)
    assert left == pytest.approx(right, rel=1e-9, abs=1e-9)


def test_evaluate_examples():
    point = gaussian_point(1, 2, [3**0.5], 1.0)
    assert evaluate(MomentExpression.of(MomentIndex.single(2, 0), 2), point) == pytest.approx(6.0)
    ground = gaussian_point(1, 2, [1.0], 1.0)
    uncertainty = single(2, 0) * single(0, 2) - single(1, 1) * single(1, 1)
    assert evaluate(uncertainty, ground) == pytest.approx(0.25)
    assert evaluate(MomentExpression.hbar(2), gaussian_point(1, 2, [1.0], 2.0)) == pytest.approx(4.0)


def test_gaussian_point_ground_state():
    point = gaussian_point(1, 3, [1.0], 1.0)
    assert point.value(MomentIndex.single(2, 0)) == pytest.approx(1.0)
    assert point.value(MomentIndex.single(1, 1)) == 0.0
    assert point.value(MomentIndex.single(0, 2)) == pytest.approx(0.25)
    assert all(point.value(idx) == 0.0 for idx in enumerate_moments(1, 3) if idx.order == 3)


def test_gaussian_point_two_pairs():
    point = gaussian_point(2, 2, [1.0, 2.0], 1.0)
    assert point.value(MomentIndex((0, 2), (0, 0))) == pytest.approx(4.0)
    assert point.value(MomentIndex((0, 0), (0, 2))) == pytest.approx(1 / 16)
    assert point.value(MomentIndex((1, 1), (0, 0))) == 0.0
    assert point.value(MomentIndex((1, 0), (0, 1))) == 0.0


def test_gaussian_fourth_moments_follow_wick():
    sigma2 = 0.64
    point = gaussian_point(1, 4, [0.8], 0.5)
    pp = point.value(MomentIndex.single(0, 2))
    assert point.value(MomentIndex.single(4, 0)) == pytest.approx(3 * sigma2**2)
    assert point.value(MomentIndex.single(2, 2)) == pytest.approx(sigma2 * pp)
    assert point.value(MomentIndex.single(3, 1)) == 0.0


@pytest.mark.parametrize("correlation", [0.0, 0.3, -1.2])
def test_squeezed_gaussian_saturates_uncertainty(correlation):
    point = gaussian_point(1, 2, [0.9], 1.0, correlations=[correlation])
    assert point.value(MomentIndex.single(1, 1)) == pytest.approx(correlation)
    assert point.value(MomentIndex.single(0, 2)) == pytest.approx((0.25 + correlation**2) / 0.81)
    assert uncertainty_defects(point)[0] == pytest.approx(0.0, abs=1e-12)
    assert is_physical(point)


def test_is_physical_rejects_uncertainty_violation():
    moments = {
        MomentIndex.single(2, 0): 1.0,
        MomentIndex.single(1, 1): 0.0,
        MomentIndex.single(0, 2): 0.01,
    }
    assert not is_physical(PhasePoint(N=1, order=2, hbar=1.0, moments=moments))


def test_phase_point_requires_every_moment():
    with pytest.raises(MissingMomentError):
        PhasePoint(N=1, order=2, hbar=1.0, moments={MomentIndex.single(2, 0): 1.0})


def test_phase_point_value_beyond_order():
    point = gaussian_point(1, 2, [1.0], 1.0)
    with pytest.raises(MissingMomentError):
        point.value(MomentIndex.single(3, 0))


def test_phase_point_rejects_bad_input():
    with pytest.raises(ValueError):
        gaussian_point(1, 2, [1.0], 0.0)
    with pytest.raises(DimensionMismatchError):
        PhasePoint.from_vector(1, 2, 1.0, [0.0, 0.0, 1.0])
    with pytest.raises(DimensionMismatchError):
        gaussian_point(2, 2, [1.0], 1.0)


def test_phase_point_vector_layout():
    point = gaussian_point(1, 2, [2.0], 1.0, center=[0.5, -1.0])
    vector = point.as_vector()
    assert list(vector) == pytest.approx([0.5, -1.0, 4.0, 0.0, 1 / 16])
    assert PhasePoint.from_vector(1, 2, 1.0, vector) == point


def test_mixed_dimensions_are_rejected():
    mixed = single(2, 0) + MomentExpression.moment((2, 0), (0, 0))
    with pytest.raises(DimensionMismatchError):
        mixed.N
