from enum import Enum
from typing import Any, Dict


class RegressionKind(str, Enum):
    """Restoration map family"""

    LINEAR = "linear"
    SPLINE = "spline"


# Sort order of kinds inside a selection report
KIND_ORDER = {RegressionKind.LINEAR: 0, RegressionKind.SPLINE: 1}

# Default adapter per regression kind
DEFAULT_REGRESSION_ROUTING = {
    "linear": "linear",
    "spline": "spline",
}


def get_regression_routing(config: Dict[str, Any] = None) -> Dict[str, str]:
    """Get kind -> adapter routing with defaults and overrides"""
    config = config or {}
    config_routing = config.get("regression_routing", {})
    return {**DEFAULT_REGRESSION_ROUTING, **config_routing}


def get_regression_kind(name: str) -> RegressionKind:
    """Parse a regression kind, accepting a few spellings"""
    aliases = {"additive": "spline", "bspline": "spline", "b-spline": "spline"}
    normalized = aliases.get(name.strip().lower(), name.strip().lower())
    try:
        return RegressionKind(normalized)
    except ValueError:
        raise ValueError(f"Unknown regression kind '{name}'")
