import math

import numpy as np
import pytest
import sympy

from semiclassical_moments.charts import (
    CHARTS,
    PRINTED_VARIANT,
    ThirdOrderVariant,
    adjudicate_third_order_variant,
    chart_n1s2,
    chart_n1s3,
    chart_n2s2,
    chart_n2s2_quadratic,
    chart_su2,
    chart_su11,
    dirac_observable_defect,
    flow,
    get_chart,
    jacobian_rank,
    quadratic_to_parameter_free,
    quartic_casimir,
    su11_casimir,
    third_order_action_matrices,
    verify_chart,
    verify_chart_samples,
)
from semiclassical_moments.exceptions import ChartDomainError, DimensionMismatchError, MissingInverseError
from semiclassical_moments.lie import casimir_trace
from semiclassical_moments.moments import MomentExpression, MomentIndex, gaussian_point, moment_symbol
from strategies import random_point, single

Q2 = MomentIndex.single(2, 0)
QP = MomentIndex.single(1, 1)
P2 = MomentIndex.single(0, 2)


def test_n1s2_forward_and_inverse():
    chart = chart_n1s2()
    moments = chart.forward({"s": 2, "ps": 3, "U": 4})
    assert moments == {"d(q^2)": pytest.approx(4.0), "d(q pi)": pytest.approx(6.0), "d(pi^2)": pytest.approx(10.0)}
    assert chart.inverse([4.0, 6.0, 10.0]) == pytest.approx({"s": 2.0, "ps": 3.0, "U": 4.0})


def test_n1s2_saturated_casimir_gives_ground_state():
    point = chart_n1s2().to_point({"s": 1.0, "ps": 0.0, "U": 0.25})
    ground = gaussian_point(1, 2, [1.0], 1.0)
    assert point.as_vector() == pytest.approx(ground.as_vector())


def test_n1s2_forward_is_exact():
    chart = chart_n1s2()
    U = chart.symbols["U"]
    qq, qp, pp = chart.forward_expressions()
    assert sympy.simplify(qq * pp - qp**2 - U) == 0
    assert verify_chart(chart, {"s": 1.3, "ps": -0.2, "U": 0.7}).pushforward_defect <= 1e-12


@pytest.mark.parametrize("name, rank", [("n1s2", 3), ("n2s2", 10), ("n1s3", 7), ("n2s2-quadratic", 7), ("su2", 3)])
def test_jacobian_rank(rng, name, rank):
    chart = get_chart(name)
    for _ in range(10):
        assert jacobian_rank(chart, chart.sample(rng)) == rank


@pytest.mark.parametrize("name", ["n1s2", "n2s2", "su2", "su11"])
def test_faithful_charts_pass_verification(name):
    summary = verify_chart_samples(get_chart(name), samples=100, seed=3)
    assert summary.passed
    assert summary.statuses == ["pass"]
    assert summary.max_pushforward_defect <= 1e-9
    assert summary.max_round_trip_defect <= 1e-9


def test_n1s3_passes_verification():
    chart = chart_n1s3()
    summary = verify_chart_samples(chart, samples=50, seed=5)
    assert summary.passed
    assert summary.jacobian_ranks == [7]
    assert summary.max_canonical_defect <= 1e-9


def test_n1s3_forward_preserves_quartic_casimir(rng):
    chart = chart_n1s3()
    for _ in range(20):
        coords = chart.sample(rng)
        moments = chart.forward(coords)
        a, b, c, d = (moments[name] for name in ("d(q^3)", "d(q^2 pi)", "d(q pi^2)", "d(pi^3)"))
        assert quartic_casimir(a, b, c, d) == pytest.approx(coords["U1"], rel=1e-9)


def test_n1s3_third_moment_of_position(rng):
    chart = chart_n1s3()
    coords = chart.sample(rng)
    s1, s2, s3, U1 = coords["s1"], coords["s2"], coords["s3"], coords["U1"]
    radicand = chart.variant.casimir_sign * U1 / (16 * s2 * s3**2 - 4 * s2)
    expected = s1**3 / math.sqrt(s2) * radicand**0.25
    assert chart.forward(coords)["d(q^3)"] == pytest.approx(expected, rel=1e-12)


@pytest.mark.slow
def test_third_order_variant_adjudication():
    variant, outcomes = adjudicate_third_order_variant(samples=10)
    assert variant == ThirdOrderVariant()
    assert outcomes[variant]
    assert PRINTED_VARIANT in outcomes


def test_third_order_variant_validation():
    with pytest.raises(ValueError):
        ThirdOrderVariant(q2pi_factor="q3")
    with pytest.raises(ValueError):
        ThirdOrderVariant(casimir_sign=0)


def test_third_order_action_is_spin_three_halves():
    matrices = third_order_action_matrices()
    assert matrices["C"] == sympy.diag(-3, -1, 1, 3)
    B, A = matrices["B"], matrices["A"]
    assert (B[0, 1], B[1, 2], B[2, 3]) == (1, 2, 3)
    assert (A[1, 0], A[2, 1], A[3, 2]) == (3, 2, 1)
    assert matrices["K"] == -sympy.Rational(15, 4) * sympy.eye(4)


def test_n2s2_recovers_pair_ratio(rng):
    chart = chart_n2s2()
    for _ in range(10):
        coords = chart.sample(rng)
        moments = chart.forward(coords)
        f6 = moments["d(q1^2)"] * moments["d(q2^2)"] / moments["d(q1 q2)"] ** 2
        assert f6 == pytest.approx(coords["s3"], rel=1e-12)


def test_n2s2_inverse_round_trip(rng):
    chart = chart_n2s2()
    coords = chart.sample(rng)
    assert chart.from_point(chart.to_point(coords)) == pytest.approx(coords, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("angle", [0.0, 0.5, -1.2, 2.8])
def test_n2s2_angle_keeps_its_quadrant(rng, angle):
    chart = chart_n2s2()
    coords = {**chart.sample(rng), "s4": angle}
    assert chart.from_point(chart.to_point(coords))["s4"] == pytest.approx(angle, abs=1e-9)


def test_quadratic_chart_is_not_faithful():
    summary = verify_chart_samples(chart_n2s2_quadratic(), samples=100, seed=1)
    assert summary.passed
    assert summary.jacobian_ranks == [7]
    assert summary.statuses == ["non-faithful: jacobian rank 7"]
    assert summary.max_pushforward_defect <= 1e-9
    assert summary.max_canonical_defect is None


def test_quadratic_chart_moments():
    chart = chart_n2s2_quadratic()
    coords = {"s1": 0.5, "s2": 1.5, "s3": 2.0, "s4": -1.0, "p1": 0.1, "p2": 0.2, "p3": -0.3, "p4": 0.4, "U1": 1.0, "U2": 0.5}
    assert chart.forward(coords)["d(q1^2)"] == pytest.approx(0.5**2 + 2.0**2)
    free = quadratic_to_parameter_free(coords)
    assert free["S3"] == 2.0
    assert free["P1"] == pytest.approx(0.1 + 0.5 * 1.5 * 1.0 * (1 / 1.5**2 - 1 / 0.5**2))


def test_quadratic_chart_casimir_depends_on_coordinates():
    chart = chart_n2s2_quadratic()
    coords = {"s1": 0.8, "s2": 1.1, "s3": 1.4, "s4": 0.6, "p1": 0.3, "p2": -0.2, "p3": 0.5, "p4": 0.1, "U1": 1.0, "U2": 0.7}
    base = casimir_trace(1, chart.to_point(coords))
    moved = casimir_trace(1, chart.to_point({**coords, "p3": 0.9}))
    assert abs(moved - base) > 1e-6


def test_quadratic_chart_has_no_inverse():
    chart = chart_n2s2_quadratic()
    assert not chart.has_inverse
    with pytest.raises(MissingInverseError):
        chart.inverse([1.0] * 10)


def test_su2_chart():
    chart = chart_su2()
    values = chart.forward({"phi": 0.0, "Sz": 0.0, "S2": 4.0})
    assert values == pytest.approx({"Sx": 2.0, "Sy": 0.0, "Sz": 0.0})
    report = verify_chart(chart, {"phi": 0.4, "Sz": 0.3, "S2": 2.0})
    assert report.canonical_defect <= 1e-12
    with pytest.raises(ChartDomainError):
        chart.forward({"phi": 0.0, "Sz": 1.0, "S2": 1.0})
    with pytest.raises(ChartDomainError):
        chart.inverse({"Sx": 0.0, "Sy": 0.0, "Sz": 1.0})


def test_su11_casimir_identity(rng):
    chart = chart_su11()
    for _ in range(10):
        coords = chart.sample(rng)
        K0, K1, K2 = chart.forward_vector(coords)
        assert su11_casimir(K0, K1, K2) == pytest.approx(-coords["k"] ** 2, rel=1e-9)


def test_chart_domain_errors():
    with pytest.raises(ChartDomainError) as info:
        chart_n1s2().forward({"s": -1.0, "ps": 0.0, "U": 1.0})
    assert info.value.chart == "n1s2"
    with pytest.raises(DimensionMismatchError):
        chart_n1s2().forward({"s": 1.0})
    degenerate = gaussian_point(2, 2, [1.0, 1.0], 1.0)
    with pytest.raises(ChartDomainError):
        chart_n2s2().from_point(degenerate)


def test_get_chart():
    assert set(CHARTS) == {"n1s2", "n2s2", "n1s3", "n2s2-quadratic", "su2", "su11"}
    assert get_chart("n1s2", hbar=0.5).hbar == 0.5
    assert get_chart("su2", hbar=0.5).name == "su2"
    with pytest.raises(KeyError):
        get_chart("n3s2")
    description = get_chart("n2s2").describe()
    assert (description["canonical_dim"], description["casimir_count"], description["inverse"]) == (8, 2, True)


def test_flow_of_position_spread():
    p0 = gaussian_point(1, 2, [1.2], 1.0, correlations=[0.3])
    qq, qp, pp = (p0.value(idx) for idx in (Q2, QP, P2))
    uncertainty = single(2, 0) * single(0, 2) - single(1, 1) * single(1, 1)
    result = flow(MomentExpression.of(Q2), p0, 2.0, steps=20, conserved={"U": uncertainty})
    t = result.times
    assert result.series(Q2) == pytest.approx(np.full_like(t, qq), abs=1e-10)
    assert result.series(QP) == pytest.approx(qp - 2 * qq * t, abs=1e-9)
    assert result.series(P2) == pytest.approx(pp - 4 * qp * t + 4 * qq * t**2, abs=1e-8)
    assert result.drift("U") <= 1e-9 * max(1.0, abs(result.conserved["U"][0]))


def test_flow_of_square_root_shifts_correlation():
    p0 = gaussian_point(1, 2, [1.5], 1.0)
    generator = sympy.sqrt(moment_symbol(Q2))
    result = flow(generator, p0, -0.5, steps=10)
    assert result.series(QP)[-1] == pytest.approx(1.5 * 0.5, rel=1e-9)


def test_flow_rejects_order_beyond_point():
    with pytest.raises(DimensionMismatchError):
        flow(MomentExpression.of(Q2), gaussian_point(1, 2, [1.0], 1.0), 1.0, s=3)


def test_dirac_observables(rng):
    point = random_point(rng, 2, 2)
    f3 = MomentExpression.moment((1, 0), (0, 1)) * MomentExpression.moment((0, 1), (1, 0)) - MomentExpression.moment(
        (1, 1), (0, 0)
    ) * MomentExpression.moment((0, 0), (1, 1))
    generators = [MomentIndex((2, 0), (0, 0)), MomentIndex((1, 0), (1, 0)), MomentIndex((0, 2), (0, 0)), MomentIndex((0, 1), (0, 1))]
    assert dirac_observable_defect(f3, generators, point, 2) <= 1e-10 * max(1.0, abs(f3.evaluate(point)))

    single_point = random_point(rng, 1, 2)
    uncertainty = single(2, 0) * single(0, 2) - single(1, 1) * single(1, 1)
    assert dirac_observable_defect(uncertainty, [Q2, QP, P2], single_point, 2) <= 1e-12

    spread = dirac_observable_defect(P2, [Q2], single_point, 2)
    assert spread == pytest.approx(4 * abs(single_point.value(QP)))
