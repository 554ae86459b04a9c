import logging

logger = logging.getLogger(__name__)


def check_residual(relation: str, residual: float, tolerance: float) -> bool:
    """
    Validate that a residual stays within tolerance.

    Args:
        relation: Relation being checked, used in the log message
        residual: Measured residual
        tolerance: Allowed residual

    Returns:
        bool: True if the relation holds, False otherwise
    """
    is_valid = residual <= tolerance
    if not is_valid:
        logger.warning(f"{relation}: residual {residual:.3e} exceeds tolerance {tolerance:.1e}")

    return is_valid
