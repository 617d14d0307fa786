"""Outward-rounded interval arithmetic over binary floating-point endpoints.

Endpoints are ``mpmath.mpf`` values. Every operation works on the raw libmp
tuples so that the lower endpoint is rounded toward -inf and the upper one
toward +inf at the working precision.
"""
import threading
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence, Tuple

from mpmath import libmp, mp

ROUND_DOWN = libmp.round_floor
ROUND_UP = libmp.round_ceiling

DEFAULT_PRECISION = 53
_TINY_EXPONENT = -4000


class _PrecisionState(threading.local):
    bits = DEFAULT_PRECISION


_state = _PrecisionState()


def set_precision(bits):
    """Set the working precision (significand bits) for the calling thread."""
    bits = int(bits)
    if bits < 24:
        raise ValueError(f"precision must be at least 24 bits, got {bits}")
    _state.bits = bits


def get_precision():
    return _state.bits


@contextmanager
def working_precision(bits):
    """Run a block at ``bits`` of precision, restoring the previous setting on exit."""
    previous = get_precision()
    set_precision(bits)
    try:
        yield
    finally:
        _state.bits = previous


def _wrap(raw):
    return mp.make_mpf(raw)


def _raw(value):
    return value._mpf_


def scalar(value, rnd=ROUND_DOWN):
    """Convert ``value`` to an mpf, exactly when possible, else rounded by ``rnd``."""
    if isinstance(value, type(mp.zero)):
        return value
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return _wrap(libmp.from_int(value))
    if isinstance(value, float):
        return _wrap(libmp.from_float(value, 53, rnd))
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        den = value.denominator
        if den & (den - 1) == 0:
            return _wrap(libmp.from_man_exp(value.numerator, -(den.bit_length() - 1)))
        return _wrap(libmp.from_rational(value.numerator, den, get_precision(), rnd))
    raise TypeError(f"cannot convert {value!r} to an interval endpoint")


def to_fraction(value):
    p, q = libmp.to_rational(_raw(value))
    return Fraction(p, q)


def _ulp_raw(raw, prec):
    sign, man, exp, bc = raw
    if not man:
        return libmp.from_man_exp(1, _TINY_EXPONENT)
    return libmp.from_man_exp(1, exp + bc - prec)


def next_up(value, prec=None):
    prec = prec or get_precision()
    raw = _raw(value)
    return _wrap(libmp.mpf_add(raw, _ulp_raw(raw, prec), prec, ROUND_UP))


def next_down(value, prec=None):
    prec = prec or get_precision()
    raw = _raw(value)
    return _wrap(libmp.mpf_sub(raw, _ulp_raw(raw, prec), prec, ROUND_DOWN))


def add_down(a, b):
    return _wrap(libmp.mpf_add(_raw(a), _raw(b), get_precision(), ROUND_DOWN))


def add_up(a, b):
    return _wrap(libmp.mpf_add(_raw(a), _raw(b), get_precision(), ROUND_UP))


def sub_down(a, b):
    return _wrap(libmp.mpf_sub(_raw(a), _raw(b), get_precision(), ROUND_DOWN))


def sub_up(a, b):
    return _wrap(libmp.mpf_sub(_raw(a), _raw(b), get_precision(), ROUND_UP))


def mul_down(a, b):
    return _wrap(libmp.mpf_mul(_raw(a), _raw(b), get_precision(), ROUND_DOWN))


def mul_up(a, b):
    return _wrap(libmp.mpf_mul(_raw(a), _raw(b), get_precision(), ROUND_UP))


def div_down(a, b, prec=None):
    return _wrap(libmp.mpf_div(_raw(a), _raw(b), prec or get_precision(), ROUND_DOWN))


def div_up(a, b, prec=None):
    return _wrap(libmp.mpf_div(_raw(a), _raw(b), prec or get_precision(), ROUND_UP))


def exact_add(a, b):
    return _wrap(libmp.mpf_add(_raw(a), _raw(b)))


def exact_sub(a, b):
    return _wrap(libmp.mpf_sub(_raw(a), _raw(b)))


def exact_mul(a, b):
    return _wrap(libmp.mpf_mul(_raw(a), _raw(b)))


def shift(value, n):
    """value * 2**n, exact."""
    return _wrap(libmp.mpf_shift(_raw(value), n))


def neg(value):
    return _wrap(libmp.mpf_neg(_raw(value)))


def exact_abs(value):
    return _wrap(libmp.mpf_abs(_raw(value)))


def _cbrt_directed(value, rnd):
    """Cube root of a real value rounded in direction ``rnd``, one ulp outward."""
    raw = _raw(value)
    if not raw[1]:
        return value
    negative = raw[0] == 1
    magnitude = libmp.mpf_neg(raw) if negative else raw
    inner_rnd = rnd
    if negative:
        inner_rnd = ROUND_UP if rnd == ROUND_DOWN else ROUND_DOWN
    root = libmp.mpf_cbrt(magnitude, get_precision(), inner_rnd)
    if libmp.mpf_mul(libmp.mpf_mul(root, root), root) != magnitude:
        step = _ulp_raw(root, get_precision())
        if inner_rnd == ROUND_UP:
            root = libmp.mpf_add(root, step, get_precision(), ROUND_UP)
        else:
            root = libmp.mpf_sub(root, step, get_precision(), ROUND_DOWN)
    return _wrap(libmp.mpf_neg(root) if negative else root)


def dyadic_str(value):
    """Exact decimal rendering of a binary floating-point value."""
    sign, man, exp, bc = _raw(value)
    if not man:
        return "0"
    prefix = "-" if sign else ""
    if exp >= 0:
        return prefix + str(man << exp)
    digits = str(man * 5 ** (-exp)).rjust(-exp + 1, "0")
    head, tail = digits[:exp], digits[exp:].rstrip("0")
    return prefix + head + ("." + tail if tail else "")


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with lo <= hi."""
    lo: object
    hi: object

    def __post_init__(self):
        if not (mp.isfinite(self.lo) and mp.isfinite(self.hi)):
            raise ValueError("interval endpoints must be finite")
        if self.lo > self.hi:
            raise ValueError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, value):
        lo = scalar(value, ROUND_DOWN)
        hi = scalar(value, ROUND_UP)
        return cls(lo, hi)

    @classmethod
    def of(cls, lo, hi=None):
        """Outward-rounded interval from two numbers (or one for a point)."""
        if hi is None:
            return cls.point(lo)
        return cls(scalar(lo, ROUND_DOWN), scalar(hi, ROUND_UP))

    @property
    def is_point(self):
        return self.lo == self.hi

    def __add__(self, other):
        return Interval(add_down(self.lo, other.lo), add_up(self.hi, other.hi))

    def __sub__(self, other):
        return Interval(sub_down(self.lo, other.hi), sub_up(self.hi, other.lo))

    def __neg__(self):
        return Interval(neg(self.hi), neg(self.lo))

    def __mul__(self, other):
        corners = ((self.lo, other.lo), (self.lo, other.hi), (self.hi, other.lo), (self.hi, other.hi))
        lo = min(mul_down(u, v) for u, v in corners)
        hi = max(mul_up(u, v) for u, v in corners)
        return Interval(lo, hi)

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(mp.zero, max(neg(self.lo), self.hi))

    def sqr(self):
        a = abs(self)
        return Interval(mul_down(a.lo, a.lo), mul_up(a.hi, a.hi))

    def minimum(self, other):
        return Interval(min(self.lo, other.lo), min(self.hi, other.hi))

    def maximum(self, other):
        return Interval(max(self.lo, other.lo), max(self.hi, other.hi))

    def scale2(self, n):
        """Multiply by 2**n (exact)."""
        return Interval(shift(self.lo, n), shift(self.hi, n))

    def scbrt(self):
        return Interval(_cbrt_directed(self.lo, ROUND_DOWN), _cbrt_directed(self.hi, ROUND_UP))

    def hull(self, other):
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other) -> Optional["Interval"]:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            return None
        return Interval(lo, hi)

    def width(self):
        return sub_up(self.hi, self.lo)

    def mid(self):
        total = libmp.mpf_add(_raw(self.lo), _raw(self.hi), get_precision() + 1, libmp.round_nearest)
        return shift(_wrap(total), -1)

    def contains(self, value):
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def interior_contains(self, other):
        """other sits inside self with at least one ulp of margin on both sides."""
        return next_up(self.lo) <= other.lo and other.hi <= next_down(self.hi)

    def inflate(self, radius):
        return Interval(sub_down(self.lo, radius), add_up(self.hi, radius))

    def __repr__(self):
        return f"[{dyadic_str(self.lo)}, {dyadic_str(self.hi)}]"


ZERO = Interval(mp.zero, mp.zero)


@dataclass(frozen=True)
class IBox:
    """Cartesian product of intervals."""
    components: Tuple[Interval, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if not self.components:
            raise ValueError("a box needs at least one component")

    @classmethod
    def point(cls, values):
        return cls(tuple(Interval.point(v) for v in values))

    def __len__(self):
        return len(self.components)

    def __getitem__(self, index):
        return self.components[index]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other):
        return IBox(tuple(u + v for u, v in zip(self.components, other.components)))

    def __sub__(self, other):
        return IBox(tuple(u - v for u, v in zip(self.components, other.components)))

    def scaled(self, factor: Interval):
        return IBox(tuple(c * factor for c in self.components))

    def replace(self, index, value):
        parts = list(self.components)
        parts[index] = value
        return IBox(tuple(parts))

    def hull(self, other):
        return IBox(tuple(u.hull(v) for u, v in zip(self.components, other.components)))

    def intersect(self, other) -> Optional["IBox"]:
        parts = []
        for u, v in zip(self.components, other.components):
            both = u.intersect(v)
            if both is None:
                return None
            parts.append(both)
        return IBox(tuple(parts))

    def contains(self, other):
        if isinstance(other, IBox):
            return all(u.contains(v) for u, v in zip(self.components, other.components))
        return all(u.contains(v) for u, v in zip(self.components, other))

    def inflate(self, radius):
        return IBox(tuple(c.inflate(radius) for c in self.components))

    def widths(self):
        return [c.width() for c in self.components]

    def max_width(self):
        return max(self.widths())

    def norm_max(self):
        return iv_norm_max(self)

    def __repr__(self):
        return "(" + ", ".join(repr(c) for c in self.components) + ")"


_ARITH = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "neg": lambda a, b: -a,
    "abs": lambda a, b: abs(a),
    "min": lambda a, b: a.minimum(b),
    "max": lambda a, b: a.maximum(b),
}


def iv_arith(op, a, b=None):
    try:
        return _ARITH[op](a, b)
    except KeyError:
        raise ValueError(f"unknown interval operation {op!r}") from None


def iv_scbrt(a):
    return a.scbrt()


def iv_norm_max(box: IBox) -> Interval:
    return reduce(lambda acc, c: acc.maximum(abs(c)), box.components[1:], abs(box.components[0]))


def iv_set_ops(op, a, b=None):
    if op == "hull":
        return a.hull(b)
    if op == "intersect":
        return a.intersect(b)
    if op == "width":
        return a.width()
    if op == "contains":
        return a.contains(b)
    if op == "is_empty_intersection":
        return a.intersect(b) is None
    raise ValueError(f"unknown set operation {op!r}")


def hull_all(intervals: Sequence[Interval]) -> Interval:
    return reduce(Interval.hull, intervals)
