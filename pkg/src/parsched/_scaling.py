"""Common-denominator scaling so hot loops can compare plain integers.

Multiplying every quantity by the least common multiple of all involved
denominators preserves every comparison exactly; the engines then work
on integers only.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = ["common_scale", "scale_values"]


def common_scale(values: Iterable[Fraction]) -> int:
    scale = 1
    for v in values:
        scale = math.lcm(scale, Fraction(v).denominator)
    return scale


def scale_values(values: Sequence[Fraction], scale: int) -> list[int]:
    out = []
    for v in values:
        f = Fraction(v) * scale
        if f.denominator != 1:
            raise ValueError("scale is not a common denominator of the values")
        out.append(f.numerator)
    return out
