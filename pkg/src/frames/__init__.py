import logging
from typing import Any, Dict, Optional

from src.frames.base import CoframeSpec
from src.frames.builtin import BUILTIN_COFRAMES
from src.frames.bundle import (FrameBundle, MetricField, MovingFrame,
                               build_frame_bundle, levi_civita_covariant)
from src.frames.expression import ExpressionCoframe

logger = logging.getLogger(__name__)


def get_coframe(name: str, params: Optional[Dict[str, Any]] = None) -> CoframeSpec:
    """Factory function to get a built-in coframe spec.

    Args:
        name: The coframe identifier (e.g., 'screw', 'umbilical').
        params: Keyword parameters of the coframe (e.g., {'b0': 0.1}).

    Returns:
        A coframe spec instance

    Raises:
        ValueError: If the name is not supported or a parameter is unknown
    """
    name = name.lower()
    params = params or {}
    if name not in BUILTIN_COFRAMES:
        raise ValueError(f"Coframe {name} is not supported. "
                         f"Please choose from: {', '.join(CoframeSpec.get_supported_coframes())}")
    try:
        spec = BUILTIN_COFRAMES[name](**params)
    except TypeError as e:
        raise ValueError(f"Invalid parameters {params} for coframe {name}: {e}") from e
    logger.debug(f"Created coframe {spec!r}")
    return spec


__all__ = [
    "CoframeSpec", "ExpressionCoframe", "FrameBundle", "MetricField", "MovingFrame",
    "build_frame_bundle", "get_coframe", "levi_civita_covariant",
]
