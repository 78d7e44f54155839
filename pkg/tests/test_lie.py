import numpy as np
import pytest

from semiclassical_moments.brackets import bracket_general
from semiclassical_moments.exceptions import DimensionMismatchError
from semiclassical_moments.lie import (
    adjoint_matrix,
    block_ordered_pairs,
    bosonic_relation_violations,
    c_series_cartan_matrix,
    c_series_roots,
    cartan_metric,
    casimir_bracket_defect,
    casimir_expression,
    casimir_trace,
    classification_report,
    complex_sp2_generators,
    expected_cartan_metric,
    holstein_primakoff_generators,
    metric_determinant,
    nilpotency_index,
    nonfaithful_bosonic_generators,
    off_cartan_generators,
    pair_moment,
    reality_violation,
    root_system,
    second_order_pairs,
    sp2n_isomorphism,
    sp2n_relation_violations,
    structure_constants,
)
from semiclassical_moments.moments import MomentExpression, MomentIndex, enumerate_moments, gaussian_point
from strategies import random_point


@pytest.mark.parametrize("N", [1, 2, 3])
def test_structure_constants_reproduce_brackets(N):
    constants = structure_constants(N)
    for P in constants.pairs:
        for Q in constants.pairs:
            expected = bracket_general(pair_moment(N, P), pair_moment(N, Q), N)
            assert constants.bracket(P, Q) == expected


def test_structure_constants_single_pair_coefficients():
    constants = structure_constants(1)
    q2, qp, p2 = constants.pairs
    assert constants.bracket(q2, qp) == MomentExpression.of(MomentIndex.single(2, 0), 2)
    assert constants.bracket(qp, p2) == MomentExpression.of(MomentIndex.single(0, 2), 2)
    assert constants.bracket(q2, p2) == MomentExpression.of(MomentIndex.single(1, 1), 4)


def test_positions_commute():
    constants = structure_constants(2)
    assert constants.bracket((0, 0), (0, 1)).is_zero()
    assert constants.bracket((0, 1), (1, 1)).is_zero()


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_cartan_metric_closed_form(N):
    assert np.array_equal(cartan_metric(N), expected_cartan_metric(N))


def test_cartan_metric_single_pair():
    ordering = [(1, 1), (0, 1), (0, 0)]
    assert cartan_metric(1, ordering).tolist() == [[0, 0, -16], [0, 8, 0], [-16, 0, 0]]
    assert metric_determinant(1) == -2048


def test_cartan_metric_two_pairs_block_ordering():
    expected = np.zeros((10, 10), dtype=int)
    for i, j, value in [(0, 2, -24), (3, 5, -24), (6, 9, -12), (7, 8, 12)]:
        expected[i, j] = expected[j, i] = value
    expected[1, 1] = expected[4, 4] = 12
    assert np.array_equal(cartan_metric(2, block_ordered_pairs(2)), expected)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_cartan_metric_is_nondegenerate(N):
    assert metric_determinant(N) != 0


@pytest.mark.parametrize("N", [1, 2, 3])
def test_off_cartan_generators_have_nilpotent_adjoint(N):
    for generator in off_cartan_generators(N):
        assert nilpotency_index(generator, N) == 3


@pytest.mark.parametrize("N", [1, 2, 3])
def test_cartan_generators_are_diagonal_with_small_integer_eigenvalues(N):
    for j in range(N):
        ad = adjoint_matrix(pair_moment(N, (j, N + j)), N)
        assert np.array_equal(ad, np.diag(np.diag(ad)))
        assert set(np.diag(ad)) <= {0, 1, -1, 2, -2}
        assert nilpotency_index(pair_moment(N, (j, N + j)), N) is None


def test_cartan_generators_commute_and_are_orthogonal():
    N = 3
    cartan = [(j, N + j) for j in range(N)]
    constants = structure_constants(N)
    for P in cartan:
        for Q in cartan:
            assert constants.bracket(P, Q).is_zero()
    gram = cartan_metric(N, cartan)
    assert np.array_equal(gram, gram[0, 0] * np.eye(N, dtype=int))


def test_adjoint_rejects_foreign_generator():
    with pytest.raises(DimensionMismatchError):
        adjoint_matrix(MomentIndex.single(2, 0), 2)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_root_system_is_c_series(N):
    data = root_system(N)
    assert data.classification == f"C_{N}"
    assert np.array_equal(np.array(data.cartan_matrix), c_series_cartan_matrix(N))
    assert sorted(data.roots) == sorted(c_series_roots(N).elements())


def test_cartan_matrices():
    assert root_system(1).cartan_matrix == [[2]]
    assert root_system(2).cartan_matrix == [[2, -1], [-2, 2]]
    assert root_system(3).cartan_matrix == [[2, -1, 0], [-1, 2, -1], [0, -2, 2]]


def test_simple_root_moments():
    data = root_system(3)
    assert [str(idx) for idx in data.simple_root_moments] == ["d(q2 pi1)", "d(q3 pi2)", "d(pi3^2)"]


def test_classification_report():
    report = classification_report(2)
    assert report.dimension == 10
    assert report.classification == "C_2"
    assert report.cartan_matrix == [[2, -1], [-2, 2]]
    assert report.metric_determinant == metric_determinant(2)
    payload = report.model_dump(by_alias=True)
    assert payload["schema"] == "semiclassical-moments/1"


def test_casimir_trace_single_pair():
    point = gaussian_point(1, 2, [1.0], 1.0)
    assert casimir_trace(1, point) == pytest.approx(-0.5)
    squeezed = gaussian_point(1, 2, [0.7], 0.3, correlations=[0.4])
    q2, qp, p2 = (squeezed.value(idx) for idx in enumerate_moments(1, 2))
    assert casimir_trace(1, squeezed) == pytest.approx(-2 * (q2 * p2 - qp * qp))


def test_casimir_trace_degree_is_bounded():
    with pytest.raises(ValueError):
        casimir_trace(2, gaussian_point(1, 2, [1.0], 1.0))


@pytest.mark.parametrize("N", [1, 2, 3])
def test_casimirs_commute_with_second_order_moments(rng, N):
    for _ in range(100):
        point = random_point(rng, N, 2)
        for m in range(1, N + 1):
            scale = max(1.0, abs(casimir_trace(m, point)))
            assert casimir_bracket_defect(m, point) <= 1e-9 * scale


@pytest.mark.parametrize("N, m", [(1, 1), (2, 1), (2, 2)])
def test_casimir_expression_is_central(N, m):
    casimir = casimir_expression(m, N)
    for idx in enumerate_moments(N, 2):
        assert bracket_general(casimir, idx, N).is_zero()


def test_casimir_expression_matches_trace(rng):
    point = random_point(rng, 2, 2)
    for m in (1, 2):
        assert casimir_expression(m, 2).evaluate(point) == pytest.approx(casimir_trace(m, point), rel=1e-10)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_sp2n_relations_hold_for_moments(N):
    assert sp2n_relation_violations(N) == []


@pytest.mark.parametrize("N, n", [(1, 1), (1, 2), (2, 1)])
def test_bosonic_realization_relations(N, n):
    assert bosonic_relation_violations(N, n) == []


def test_sp2n_isomorphism_values(rng):
    point = random_point(rng, 2, 2)
    generators = sp2n_isomorphism(point)
    assert generators["B"][0, 1] == point.value(MomentIndex((1, 1), (0, 0)))
    assert generators["A"][1, 1] == point.value(MomentIndex((0, 0), (0, 2)))
    assert generators["C"][0, 1] == point.value(MomentIndex((1, 0), (0, 1)))
    assert np.array_equal(generators["A"], generators["A"].T)


def test_nonfaithful_bosonic_generators():
    bosons = [[1 + 2j, 0.5j]]
    generators = nonfaithful_bosonic_generators(1, 2, bosons)
    assert generators["A"] == pytest.approx(np.conj(generators["B"]))
    assert generators["C"][0, 0] == pytest.approx(abs(1 + 2j) ** 2 + abs(0.5j) ** 2)
    zero = nonfaithful_bosonic_generators(2, 1, [[0], [0]])
    assert all(not np.any(matrix) for matrix in zero.values())
    with pytest.raises(DimensionMismatchError):
        nonfaithful_bosonic_generators(2, 2, bosons)


def test_complex_realizations_are_not_real():
    assert reality_violation(complex_sp2_generators(0.3, -0.4, 0.5)) > 0
    assert reality_violation(holstein_primakoff_generators(0.2 + 0.1j, 0.75)) > 0


def test_pair_ordering_matches_enumeration():
    for N in (1, 2):
        assert [pair_moment(N, pair) for pair in second_order_pairs(N)] == enumerate_moments(N, 2)
