"""Aberth gadget right-hand sides driven by LLPO bit streams.

A stream p over {0, 1, 2} (implicitly padded with 2s) defines

* T(p, i) = 2^-j for the first j with p(j) = i, else 0;
* the pulse h_p(x) = max(0, 1 - |2x - 1|) * (T(p, 1) - T(p, 0));
* the amplifier s(x, y) = 9x(1 - x) * sign(y)|y|^(1/3);
* g_p = h_p on [0, 1], s(x - 1, y) on [1, 2], -s(x - 2, y) on [2, 3],
  -h_p(x - 3) on [3, 4] and 0 elsewhere.

The parallel right-hand side places a scaled copy of g_{p_i} in every cell
[-2^-m, -2^-(m+1)] with m = cantor_pair(k, i) and mirrors it to x > 0.
Inside cell m, y = 2^(-2(m+3)) * yhat where yhat solves the unscaled gadget.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from mpmath import mp

from ivp2Tube.errors import DimensionError, DomainViolation, ParameterError, SchemaError
from ivp2Tube.interval.core import IBox, Interval, ZERO, exact_add, hull_all, neg, scalar, shift
from ivp2Tube.rhs.right_hand_side import RightHandSide
from ivp2Tube.utils.general import cantor_unpair

ORACLE_PRECISION = 160

_ONE = Interval.point(1)
_QUARTER = Interval.point(Fraction(1, 4))
_HALF = Interval.point(Fraction(1, 2))
_NINE = Interval.point(9)
_NINE_QUARTERS = Interval.point(Fraction(9, 4))

PIECES = ((0, 1), (1, 2), (2, 3), (3, 4))


@dataclass(frozen=True)
class BitStream:
    """Finite prefix of an LLPO input; every later position holds 2."""
    entries: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        bad = [e for e in self.entries if e not in (0, 1, 2)]
        if bad:
            raise DomainViolation(f"stream entries must be 0, 1 or 2, got {bad[0]}")
        if 0 in self.entries and 1 in self.entries:
            raise DomainViolation(f"stream {list(self.entries)} contains both 0 and 1")

    def __getitem__(self, j):
        return self.entries[j] if j < len(self.entries) else 2

    def first(self, bit):
        """Position of the first occurrence of ``bit`` or None."""
        try:
            return self.entries.index(bit)
        except ValueError:
            return None

    def llpo(self):
        """Answers accepted for this stream: bits that never occur."""
        return {bit for bit in (0, 1) if bit not in self.entries}

    def to_list(self):
        return list(self.entries)


def _t_fraction(p, i):
    j = p.first(i)
    return Fraction(0) if j is None else Fraction(1, 2 ** j)


def t_value(p: BitStream, i):
    return scalar(_t_fraction(p, i))


def peak(p: BitStream):
    """T(p, 1) - T(p, 0) as an exact Fraction."""
    return _t_fraction(p, 1) - _t_fraction(p, 0)


def eval_h(p: BitStream, x: Interval) -> Interval:
    height = Interval.point(peak(p))
    triangle = (_ONE - abs(x.scale2(1) - _ONE)).maximum(ZERO)
    return triangle * height


def _amplifier(u: Interval, y: Interval) -> Interval:
    """s(u, y) for u inside [0, 1]; u(1 - u) is taken as 1/4 - (u - 1/2)^2."""
    bump = _QUARTER - (u - _HALF).sqr()
    return _NINE * bump * y.scbrt()


def eval_s(x: Interval, y: Interval) -> Interval:
    return _amplifier(x, y)


def eval_g(p: BitStream, x: Interval, y: Interval) -> Interval:
    values = []
    if x.lo < 0 or x.hi > 4:
        values.append(ZERO)
    for index, (lo, hi) in enumerate(PIECES):
        part = x.intersect(Interval.of(lo, hi))
        if part is None:
            continue
        local = part - Interval.point(lo)
        if index == 0:
            values.append(eval_h(p, local))
        elif index == 1:
            values.append(_amplifier(local, y))
        elif index == 2:
            values.append(-_amplifier(local, y))
        else:
            values.append(-eval_h(p, local))
    return hull_all(values)


def tail_bound(cell_budget, y: Interval) -> Interval:
    """Bound on every cell beyond the budget: max(2^-(m+3), 9/4 * (2^-(m+3) sup|y|)^(1/3))."""
    scale = cell_budget + 4
    pulse = shift(mp.one, -scale)
    amplified = (Interval(mp.zero, shift(abs(y).hi, -scale)).scbrt() * _NINE_QUARTERS).hi
    bound = max(pulse, amplified)
    return Interval(neg(bound), bound)


def cell_support(m):
    return Interval(neg(shift(mp.one, -m)), neg(shift(mp.one, -(m + 1))))


def sample_point(m):
    """-2^-m + 2^-(m+2), where the scaled gadget sits at x = 2."""
    return exact_add(neg(shift(mp.one, -m)), shift(mp.one, -(m + 2)))


def _first_cell(x_lo, cell_budget):
    """One less than the smallest m whose cell meets [x_lo, 0]."""
    if x_lo >= 0:
        return cell_budget + 1
    _, exponent = mp.frexp(x_lo)
    return max(0, -exponent - 1)


def _negative_side(streams, cell_budget, x: Interval, y: Interval) -> Interval:
    values = []
    if x.lo < -1:
        values.append(ZERO)
    for m in range(_first_cell(x.lo, cell_budget), cell_budget + 1):
        left = neg(shift(mp.one, -m))
        if x.hi < left:
            break
        part = x.intersect(cell_support(m))
        if part is None:
            continue
        _, i = cantor_unpair(m)
        if i >= len(streams):
            values.append(ZERO)
            continue
        x_hat = (part - Interval(left, left)).scale2(m + 3)
        y_hat = y.scale2(2 * (m + 3))
        values.append(eval_g(streams[i], x_hat, y_hat).scale2(-(m + 3)))
    if x.hi >= neg(shift(mp.one, -(cell_budget + 1))):
        values.append(tail_bound(cell_budget, y))
    return hull_all(values)


def eval_parallel_f(streams, cell_budget, x: Interval, y: Interval) -> Interval:
    values = []
    if x.lo <= 0:
        values.append(_negative_side(streams, cell_budget, Interval(x.lo, min(x.hi, mp.zero)), y))
    if x.hi >= 0:
        values.append(_negative_side(streams, cell_budget, -Interval(max(x.lo, mp.zero), x.hi), y))
    return hull_all(values)


class GadgetRef(RightHandSide):
    """Built-in gadget right-hand side (n = 1)."""
    kind = None

    def __init__(self):
        super().__init__(1)


class SingleGadget(GadgetRef):
    kind = "single"

    def __init__(self, stream: BitStream):
        super().__init__()
        self.stream = stream

    def eval_box(self, box: IBox) -> IBox:
        self.check_box(box)
        return IBox((eval_g(self.stream, box[0], box[1]),))

    def describe(self):
        return {"gadget": {"stream": self.stream.to_list()}}

    def __repr__(self):
        return f"SingleGadget({self.stream.to_list()})"


class ParallelGadget(GadgetRef):
    kind = "parallel"

    def __init__(self, streams, cell_budget):
        super().__init__()
        if cell_budget < 1:
            raise ParameterError(f"cell_budget must be at least 1, got {cell_budget}")
        self.streams = tuple(streams)
        self.cell_budget = cell_budget

    def eval_box(self, box: IBox) -> IBox:
        self.check_box(box)
        return IBox((eval_parallel_f(self.streams, self.cell_budget, box[0], box[1]),))

    def describe(self):
        return {"gadget": {"streams": [s.to_list() for s in self.streams], "cell_budget": self.cell_budget}}

    def cells_for(self, i):
        """Cells m <= cell_budget that carry stream i, in increasing order."""
        return [m for m in range(self.cell_budget + 1) if cantor_unpair(m)[1] == i]

    def __repr__(self):
        return f"ParallelGadget({[s.to_list() for s in self.streams]}, cell_budget={self.cell_budget})"


def _mp(value):
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / value.denominator
    return mp.mpf(value)


def _rise(x):
    """x^2 (3 - 2x), the integral of 6x(1 - x)."""
    return x * x * (3 - 2 * x)


def closed_solution_s(y0, sign, c, x):
    """Solution of y' = s(x, y), y(0) = y0, evaluated at x in [0, 1].

    For y0 != 0 the solution is unique and ``sign``/``c`` must be left unset
    (or agree with y0). For y0 = 0 the member of the funnel is picked by
    ``sign`` and the release point ``c``: zero on [0, c], then
    sign * (x^2(3 - 2x) - c^2(3 - 2c))^(3/2).
    """
    with mp.workprec(ORACLE_PRECISION):
        y0, x = _mp(y0), _mp(x)
        if not 0 <= x <= 1:
            raise ParameterError(f"x must lie in [0, 1], got {x}")
        if y0 != 0:
            if c is not None:
                raise ParameterError("c selects a funnel member and needs y0 = 0")
            if sign is not None and sign != mp.sign(y0):
                raise ParameterError(f"sign {sign} contradicts y0 = {y0}")
            z = _rise(x) + mp.cbrt(abs(y0)) ** 2
            return +(mp.sign(y0) * mp.sqrt(z) ** 3)
        if c is None or sign not in (1, -1):
            raise ParameterError("y0 = 0 needs sign in {-1, 1} and c in [0, 1]")
        c = _mp(c)
        if not 0 <= c <= 1:
            raise ParameterError(f"c must lie in [0, 1], got {c}")
        if x <= c:
            return mp.zero
        return +(sign * mp.sqrt(_rise(x) - _rise(c)) ** 3)


def _triangle_integral(x):
    """Integral of max(0, 1 - |2t - 1|) over [0, x] for x in [0, 1]."""
    if x <= mp.mpf(1) / 2:
        return x * x
    return 2 * x - x * x - mp.mpf(1) / 2


def closed_solution_g(p: BitStream, x, sign=1, c=0):
    """Solution of y' = g_p(x, y), y(0) = 0, at any x.

    ``sign`` and ``c`` pick the funnel member when the pulse vanishes (no
    forced bit). Every member returns to 0 at x = 4.
    """
    with mp.workprec(ORACLE_PRECISION):
        x = _mp(x)
        height = _mp(peak(p))
        if x <= 0:
            return mp.zero
        if x <= 1:
            return +(height * _triangle_integral(x))
        y1 = height / 2
        if x <= 2:
            if y1 != 0:
                return closed_solution_s(y1, None, None, x - 1)
            return closed_solution_s(0, sign, c, x - 1)
        y2 = closed_solution_s(y1, None, None, 1) if y1 != 0 else closed_solution_s(0, sign, c, 1)
        if x <= 3:
            z = mp.cbrt(abs(y2)) ** 2 - _rise(x - 2)
            return +(mp.sign(y2) * mp.sqrt(max(z, mp.zero)) ** 3)
        y3 = mp.sign(y2) * mp.sqrt(max(mp.cbrt(abs(y2)) ** 2 - 1, mp.zero)) ** 3
        if x <= 4:
            return +(y3 - height * _triangle_integral(x - 3))
        return +(y3 - height / 2)


def from_document(options, dimension):
    """Gadget right-hand side from the instance-file ``{"gadget": ...}`` entry."""
    if dimension != 1:
        raise DimensionError(f"gadget right-hand sides have dimension 1, got {dimension}")
    if not isinstance(options, dict):
        raise SchemaError("gadget entry must be an object")
    if "stream" in options:
        return SingleGadget(BitStream(_entries(options["stream"])))
    if "streams" not in options:
        raise SchemaError("gadget entry needs 'stream' or 'streams'")
    streams = options["streams"]
    if not isinstance(streams, list):
        raise SchemaError("gadget 'streams' must be an array of arrays")
    cell_budget = options.get("cell_budget", 5)
    if isinstance(cell_budget, bool) or not isinstance(cell_budget, int):
        raise SchemaError("gadget 'cell_budget' must be an integer")
    return ParallelGadget([BitStream(_entries(s)) for s in streams], cell_budget)


def _entries(value):
    if not isinstance(value, list) or any(isinstance(e, bool) or not isinstance(e, int) for e in value):
        raise SchemaError(f"stream must be an array of integers, got {value!r}")
    return tuple(value)
