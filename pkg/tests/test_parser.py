import pytest

from semiclassical_moments.exceptions import MomentParseError
from semiclassical_moments.moments import MomentExpression, MomentIndex
from semiclassical_moments.utils import (
    expression_from_sympy,
    format_expression,
    format_moment,
    parse_assignments,
    parse_expression,
    parse_moment,
    parse_moment_assignments,
)
from semiclassical_moments.utils.validator import as_list, moment_names
from strategies import single


@pytest.mark.parametrize(
    "text, expected",
    [
        ("d(q^2)", MomentIndex.single(2, 0)),
        ("d(q pi)", MomentIndex.single(1, 1)),
        ("d(pi q)", MomentIndex.single(1, 1)),
        ("  d(q q pi)", MomentIndex.single(2, 1)),
        ("d(q1 pi2)", MomentIndex((1, 0), (0, 1))),
        ("d(q2^3)", MomentIndex((0, 3), (0, 0))),
    ],
)
def test_parse_moment(text, expected):
    assert parse_moment(text) == expected


def test_parse_moment_pads_to_requested_dimension():
    assert parse_moment("d(q^2)", N=2) == MomentIndex((2, 0), (0, 0))


@pytest.mark.parametrize(
    "text, position",
    [
        ("q^2", 0),
        ("d(q^2", 5),
        ("d(qq)", 3),
        ("d(x)", 2),
        ("d()", 2),
    ],
)
def test_parse_moment_errors_carry_position(text, position):
    with pytest.raises(MomentParseError) as info:
        parse_moment(text)
    assert info.value.position == position
    assert info.value.text == text


def test_parse_moment_rejects_index_beyond_dimension():
    with pytest.raises(MomentParseError):
        parse_moment("d(q3)", N=2)


@pytest.mark.parametrize(
    "idx, text",
    [
        (MomentIndex.single(2, 0), "d(q^2)"),
        (MomentIndex.single(1, 2), "d(q pi^2)"),
        (MomentIndex((1, 1), (0, 0)), "d(q1 q2)"),
        (MomentIndex((0, 0), (1, 1)), "d(pi1 pi2)"),
    ],
)
def test_format_moment(idx, text):
    assert format_moment(idx) == text
    assert parse_moment(text, idx.N) == idx


def test_format_expression():
    assert format_expression(MomentExpression.of(MomentIndex.single(2, 0), 2)) == "2*d(q^2)"
    assert format_expression(MomentExpression()) == "0"
    assert format_expression(MomentExpression.hbar(2, "1/2")) == "1/2*hbar^2"


def test_expression_round_trip_through_sympy():
    parsed = expression_from_sympy(parse_expression("d(q^2)*d(pi^2) - d(q pi)^2"))
    assert parsed == single(2, 0) * single(0, 2) - single(1, 1) * single(1, 1)


def test_expression_with_hbar_and_rationals():
    parsed = expression_from_sympy(parse_expression("2*d(q^2) + hbar^2/4"))
    assert parsed == MomentExpression.of(MomentIndex.single(2, 0), 2) + MomentExpression.hbar(2, "1/4")


def test_expression_with_basic_variables():
    parsed = expression_from_sympy(parse_expression("q1^2*d(q^2)", 1))
    assert parsed.max_order() == 2
    assert len(parsed) == 1


def test_invalid_expression():
    with pytest.raises(MomentParseError):
        parse_expression("d(q^2) +* )")


def test_irrational_coefficient_is_rejected():
    with pytest.raises(MomentParseError):
        expression_from_sympy(parse_expression("sqrt(2)*d(q^2)"))


def test_parse_assignments():
    assert parse_assignments("s=2, ps=3,U=4") == {"s": 2.0, "ps": 3.0, "U": 4.0}
    assert parse_moment_assignments("d(q^2)=4,d(q pi)=6") == {
        MomentIndex.single(2, 0): 4.0,
        MomentIndex.single(1, 1): 6.0,
    }


@pytest.mark.parametrize("text", ["s=2,ps", "s=two"])
def test_parse_assignments_errors(text):
    with pytest.raises(MomentParseError):
        parse_assignments(text)


def test_moment_names_validator_normalizes_keys():
    normalize = moment_names()
    assert normalize({"d(pi q)": 1.0, "d(q^2)": 2.0}) == {"d(q pi)": 1.0, "d(q^2)": 2.0}
    with pytest.raises(ValueError):
        normalize({"d(q pi)": 1.0, "d(pi q)": 2.0})
    with pytest.raises(ValueError):
        normalize({"q^2": 1.0})


def test_as_list():
    assert as_list(1.5) == [1.5]
    assert as_list([1.0, 2.0]) == [1.0, 2.0]
    assert as_list(True) is True
