"""General functions to simplify code"""
import math
import re
from fractions import Fraction

from ivp2Tube.interval.core import scalar


def get_numbers(string):
    """Extracts all digit runs from a string and returns them as a list of ints."""
    return [int(i) for i in ''.join((ch if ch.isdigit() else ' ') for ch in string).split()]


def parse_streams(text):
    """'0,2,2;1;' -> [[0, 2, 2], [1], []] (streams separated by ';')."""
    text = text.strip()
    if not text:
        return []
    streams = []
    for part in text.split(";"):
        if re.search(r"[^0-9,\s]", part):
            raise ValueError(f"stream {part!r} may only hold digits separated by commas")
        streams.append(get_numbers(part))
    return streams


def as_fraction(value):
    if isinstance(value, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(*value.as_integer_ratio())


def parse_dyadic(value):
    """Exact mpf for a dyadic rational given as int, float, mpf or text ('3/8', '0.375')."""
    try:
        fraction = as_fraction(value)
    except (ValueError, ZeroDivisionError, AttributeError, TypeError):
        raise ValueError(f"{value!r} is not a number") from None
    den = fraction.denominator
    if den & (den - 1):
        raise ValueError(f"{value!r} is not a dyadic rational")
    return scalar(fraction)


def cantor_pair(k, i):
    return (k + i) * (k + i + 1) // 2 + i


def cantor_unpair(m):
    """Inverse of cantor_pair: m -> (k, i)."""
    w = (math.isqrt(8 * m + 1) - 1) // 2
    i = m - w * (w + 1) // 2
    return w - i, i
