"""Belief-propagation decoding-complexity model.

Complexity is counted as message updates per information bit and scales as
``iterations * dv / R * log2(M)``.
"""
from __future__ import annotations

import math

__all__ = ["decoding_complexity", "iterations_for_budget", "BASELINE"]

#: Reference decoder: 4-ary format, rate 5/6, mean variable degree 4, 50 iterations.
BASELINE = {"rate": 5 / 6, "dv": 4.0, "iterations": 50, "M": 4}


def decoding_complexity(rate: float, dv: float, iterations: float, M: int) -> float:
    if not 0 < rate <= 1:
        raise ValueError("code rate must lie in (0, 1]")
    return iterations * dv / rate * math.log2(M)


def iterations_for_budget(budget: float, rate: float, dv: float, M: int) -> int:
    """Largest whole iteration count whose complexity does not exceed ``budget``."""
    per_iter = decoding_complexity(rate, dv, 1, M)
    return int(math.floor(budget / per_iter + 1e-9))
