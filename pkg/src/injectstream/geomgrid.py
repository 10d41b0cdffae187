"""Integer exponent windows on a geometric grid base**j.

Guess managers keep the set of integer exponents j whose powers lie in a
moving value window.  Exponent bounds computed via float logarithms get
snapped by direct power comparisons (with a 1e-12 relative slack) so a value
sitting exactly on a grid power cannot flip its exponent by one ulp.
"""

from __future__ import annotations

import math


def snap_floor_log(base: float, x: float) -> int:
    """Largest integer j with base**j <= x (x > 0, base > 1)."""
    j = math.floor(math.log(x) / math.log(base) + 1e-9)
    while base ** (j + 1) <= x * (1 + 1e-12):
        j += 1
    while base**j > x * (1 + 1e-12):
        j -= 1
    return j


def snap_ceil_log(base: float, x: float) -> int:
    """Smallest integer j with base**j >= x (x > 0, base > 1)."""
    j = math.ceil(math.log(x) / math.log(base) - 1e-9)
    while base ** (j - 1) >= x * (1 - 1e-12):
        j -= 1
    while base**j < x * (1 - 1e-12):
        j += 1
    return j
