"""Text grammar for moments and expressions.

A moment is written ``d(q1^2 pi1)`` for Δ(q_1²π_1). Factors are separated by
whitespace, the variable index may be omitted for the first pair and repeated
factors multiply. Expressions use sympy syntax around moment tokens, e.g.
``sqrt(d(q^2))`` or ``d(q^2)*d(pi^2) - d(q pi)^2``.
"""
import re
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy

from ..exceptions import MomentParseError
from ..moments import (
    BasicVariable,
    MomentExpression,
    MomentIndex,
    basic_symbol,
    factor_from_symbol,
    hbar_symbol,
    moment_symbol,
)

_FACTOR_RE = re.compile(r"(pi|q)(\d*)(?:\^(\d+))?")
_MOMENT_TOKEN_RE = re.compile(r"d\(([^()]*)\)")
_BASIC_TOKEN_RE = re.compile(r"\b(pi|q)(\d+)\b")


def parse_moment(text: str, N: Optional[int] = None) -> MomentIndex:
    # Step 1 - Envelope "d( ... )"
    stripped = text.strip()
    offset = len(text) - len(text.lstrip())
    if not stripped.startswith("d("):
        raise MomentParseError("expected 'd('", text, offset)
    if not stripped.endswith(")"):
        raise MomentParseError("expected closing ')'", text, offset + len(stripped))
    body = stripped[2:-1]
    body_offset = offset + 2

    # Step 2 - Factors
    powers: Dict[Tuple[str, int], int] = {}
    position = 0
    while position < len(body):
        if body[position].isspace():
            position += 1
            continue
        match = _FACTOR_RE.match(body, position)
        if not match:
            raise MomentParseError("expected 'q' or 'pi' factor", text, body_offset + position)
        kind, index, power = match.groups()
        index_value = int(index) if index else 1
        if index_value < 1:
            raise MomentParseError("variable index starts at 1", text, body_offset + position)
        power_value = int(power) if power else 1
        key = (kind, index_value)
        powers[key] = powers.get(key, 0) + power_value
        position = match.end()
        if position < len(body) and not body[position].isspace():
            raise MomentParseError("expected whitespace between factors", text, body_offset + position)
    if not powers:
        raise MomentParseError("empty moment", text, body_offset)

    # Step 3 - Dimension
    largest = max(index for _, index in powers)
    if N is None:
        N = largest
    elif largest > N:
        raise MomentParseError(f"variable index {largest} exceeds N={N}", text, offset)
    k = [0] * N
    l = [0] * N
    for (kind, index), power in powers.items():
        (l if kind == "pi" else k)[index - 1] += power
    return MomentIndex(tuple(k), tuple(l))


def format_moment(idx: MomentIndex) -> str:
    if idx.order == 0:
        return "1"
    parts: List[str] = []
    for kind, powers in (("q", idx.k), ("pi", idx.l)):
        for j, power in enumerate(powers):
            if not power:
                continue
            name = kind if idx.N == 1 else f"{kind}{j + 1}"
            parts.append(name if power == 1 else f"{name}^{power}")
    return f"d({' '.join(parts)})"


def _format_coefficient(value: Fraction, bare: bool) -> str:
    magnitude = abs(value)
    if bare:
        return str(magnitude)
    if magnitude == 1:
        return ""
    return f"{magnitude}*"


def format_expression(expression: MomentExpression) -> str:
    pieces: List[str] = []
    for (factors, hbar_power), coefficient in expression.terms():
        grouped: List[Tuple[object, int]] = []
        for factor in factors:
            if grouped and grouped[-1][0] == factor:
                grouped[-1] = (factor, grouped[-1][1] + 1)
            else:
                grouped.append((factor, 1))
        names = []
        for factor, power in grouped:
            name = str(factor)
            names.append(name if power == 1 else f"{name}^{power}")
        if hbar_power:
            names.append("hbar" if hbar_power == 1 else f"hbar^{hbar_power}")
        body = "*".join(names)
        text = _format_coefficient(coefficient, bare=not body) + body
        sign = "-" if coefficient < 0 else "+"
        if not pieces:
            pieces.append(text if sign == "+" else f"-{text}")
        else:
            pieces.append(f"{sign} {text}")
    return " ".join(pieces) if pieces else "0"


def parse_expression(text: str, N: Optional[int] = None) -> sympy.Expr:
    """sympy expression in moment, basic-variable and ``hbar`` symbols."""
    local: Dict[str, sympy.Symbol] = {"hbar": hbar_symbol()}

    def replace_moment(match: "re.Match[str]") -> str:
        idx = parse_moment(match.group(0), N)
        symbol = moment_symbol(idx)
        local[symbol.name] = symbol
        return symbol.name

    def replace_basic(match: "re.Match[str]") -> str:
        var = BasicVariable(match.group(1) == "pi", int(match.group(2)) - 1)
        symbol = basic_symbol(var)
        local[symbol.name] = symbol
        return symbol.name

    rewritten = _MOMENT_TOKEN_RE.sub(replace_moment, text)
    rewritten = _BASIC_TOKEN_RE.sub(replace_basic, rewritten)
    try:
        return sympy.sympify(rewritten, locals=local)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise MomentParseError(f"invalid expression ({exc})", text, 0) from None


def expression_from_sympy(expr: sympy.Expr) -> MomentExpression:
    """Convert a polynomial with rational coefficients back into a MomentExpression."""
    expr = sympy.sympify(expr)
    h = hbar_symbol()
    generators = sorted(expr.free_symbols, key=lambda sym: sym.name)
    if not generators:
        return MomentExpression.constant(_rational(expr))
    poly = sympy.Poly(sympy.expand(expr), *generators)
    terms = {}
    for powers, coefficient in poly.terms():
        monomial_factors = []
        hbar_power = 0
        for generator, power in zip(generators, powers):
            if generator == h:
                hbar_power = power
            else:
                monomial_factors.extend([factor_from_symbol(generator)] * power)
        terms[(tuple(monomial_factors), hbar_power)] = _rational(coefficient)
    return MomentExpression(terms)


def _rational(value: sympy.Expr) -> Fraction:
    value = sympy.nsimplify(value)
    if not value.is_Rational:
        raise MomentParseError(f"coefficient {value} is not rational", str(value), 0)
    return Fraction(int(value.p), int(value.q))


def parse_assignments(text: str) -> Dict[str, float]:
    """``s=2,ps=3,U=4`` style coordinate lists."""
    values: Dict[str, float] = {}
    position = 0
    for chunk in text.split(","):
        if not chunk.strip():
            position += len(chunk) + 1
            continue
        if "=" not in chunk:
            raise MomentParseError("expected name=value", text, position)
        name, raw = chunk.split("=", 1)
        try:
            values[name.strip()] = float(raw)
        except ValueError:
            raise MomentParseError(f"invalid number {raw.strip()!r}", text, position + len(name) + 1) from None
        position += len(chunk) + 1
    return values


def parse_moment_assignments(text: str, N: Optional[int] = None) -> Dict[MomentIndex, float]:
    """``d(q^2)=4,d(q pi)=6`` style moment lists."""
    return {parse_moment(name, N): value for name, value in parse_assignments(text).items()}
