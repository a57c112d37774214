"""Convenience chain: arrangement -> critical points -> cycles -> matrix."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .arrangement import Arrangement, build_arrangement, build_lines, build_side_arrangement
from .critical import (
    CriticalPoint,
    IndeterminacyPoint,
    ValueGroup,
    critical_catalog,
    group_values,
    indeterminacy_points,
)
from .cycles import SkewIntMatrix, VanishingCycle, build_intersection_matrix, enumerate_cycles


@dataclass
class FibrationData:
    """Everything the downstream modules consume, built once per degree."""

    arr: Arrangement
    p_sub: Arrangement
    q_sub: Arrangement
    points: list[CriticalPoint]
    indeterminacy: list[IndeterminacyPoint]
    groups: list[ValueGroup]
    cycles: list[VanishingCycle]
    matrix: SkewIntMatrix

    @property
    def d(self) -> int:
        return self.arr.d


def build_pipeline(d: int, epsilon: Fraction = Fraction(0)) -> FibrationData:
    arr = build_arrangement(build_lines(d, epsilon))
    p_sub = build_side_arrangement(arr, "P")
    q_sub = build_side_arrangement(arr, "Q")
    points = critical_catalog(arr, p_sub=p_sub, q_sub=q_sub)
    indet = indeterminacy_points(arr)
    groups = group_values(points)
    cycles = enumerate_cycles(arr, points, groups)
    matrix = build_intersection_matrix(arr, cycles, points, p_sub, q_sub)
    return FibrationData(arr, p_sub, q_sub, points, indet, groups, cycles, matrix)
