from .parser import (
    expression_from_sympy,
    format_expression,
    format_moment,
    parse_assignments,
    parse_expression,
    parse_moment,
    parse_moment_assignments,
)
from .validator import as_list, moment_names
