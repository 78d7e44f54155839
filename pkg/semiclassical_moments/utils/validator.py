from typing import Any, Dict, Mapping, Optional

from ..exceptions import MomentParseError
from .parser import format_moment, parse_moment


def as_list(value: Any) -> Any:
    """Accept a bare number where a per-pair list is expected (N = 1)."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [value]
    return value


def moment_names(N: Optional[int] = None):
    """Validator rewriting moment-name keys (``d(pi q)``, ``d(q^1 pi)``, …) to canonical text."""

    def normalize(value: Any) -> Any:
        if not isinstance(value, Mapping):
            return value
        result: Dict[str, Any] = {}
        for key, item in value.items():
            try:
                name = format_moment(parse_moment(str(key), N))
            except MomentParseError as exc:
                raise ValueError(str(exc)) from None
            if name in result:
                raise ValueError(f"moment {name} given twice")
            result[name] = item
        return result

    return normalize
