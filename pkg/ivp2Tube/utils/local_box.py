import heapq
import itertools
import logging
from fractions import Fraction

from mpmath import mp

from ivp2Tube.errors import NotInDomain
from ivp2Tube.interval.core import (IBox, Interval, add_up, dyadic_str, exact_add, exact_mul, exact_sub,
                                    get_precision, scalar, shift, sub_down, to_fraction)
from ivp2Tube.models.application import SolveConfig
from ivp2Tube.models.instance import LocalBox

logger = logging.getLogger("appLogger.local_box")


def _as_box(anchor):
    if isinstance(anchor, IBox):
        return anchor
    return IBox.point(anchor)


def _norm(rhs, box):
    return rhs.eval_box(box).norm_max()


def _split(box):
    """Halve the widest component; None when it cannot be split any further."""
    index = max(range(len(box)), key=lambda i: (box[i].width(), -i))
    component = box[index]
    middle = component.mid()
    if not component.lo < middle < component.hi:
        return None
    return (box.replace(index, Interval(component.lo, middle)),
            box.replace(index, Interval(middle, component.hi)))


def compute_bound_M(rhs, K: IBox, budget=256):
    """Upper bound of max ||f|| over K plus one.

    Best-first subdivision: the box with the largest upper bound is split
    until that bound is within 2^-(precision/2) of the best value seen at a
    box centre, or ``budget`` evaluations are spent.
    """
    counter = itertools.count()
    tolerance = shift(mp.one, -(get_precision() // 2))
    centre = IBox(tuple(Interval.point(c.mid()) for c in K))
    lower = _norm(rhs, centre).lo
    heap = [(-_norm(rhs, K).hi, next(counter), K)]
    evaluations = 2
    while evaluations < budget:
        upper = -heap[0][0]
        if sub_down(upper, lower) <= tolerance:
            break
        box = heap[0][2]
        children = _split(box)
        if children is None:
            break
        heapq.heappop(heap)
        for child in children:
            heapq.heappush(heap, (-_norm(rhs, child).hi, next(counter), child))
            centre = IBox(tuple(Interval.point(c.mid()) for c in child))
            lower = max(lower, _norm(rhs, centre).lo)
            evaluations += 2
    upper = -heap[0][0]
    logger.debug(f"sup ||f|| over K in [{dyadic_str(lower)}, {dyadic_str(upper)}] after {evaluations} evaluations")
    return add_up(upper, mp.one)


def half_width(delta, M):
    """Largest w of the form 2^e or 3 * 2^(e-1) with w <= 3 delta/(4M).

    Any such w also has w > delta/(2M). Keeping w this coarse puts dyadic
    points near x0 (gadget sample points among them) on the grid.
    """
    limit = 3 * to_fraction(delta) / (4 * to_fraction(M))
    e = limit.numerator.bit_length() - limit.denominator.bit_length()
    if Fraction(2) ** e > limit:
        e -= 1
    w = 3 * Fraction(2) ** (e - 1)
    w = scalar(w if w <= limit else Fraction(2) ** e)
    assert exact_mul(shift(M, 1), w) > delta and exact_mul(M, w) <= delta
    return w


def select_local_box(inst, x, anchor, cfg: SolveConfig = None) -> LocalBox:
    """First ball/radius pair in the sweep order that verifiably holds the anchor.

    Pairs are tried as k = 0, 1, 2, ... and for each k the balls m = 0..k.
    Pair (m, k) is accepted when sup ||c_m - z|| over the anchor box is
    below r_m - 2^-k.
    """
    cfg = cfg or SolveConfig()
    anchor = _as_box(anchor)
    point = IBox((Interval.point(x),) + anchor.components)
    balls = inst.domain.balls
    for k in range(cfg.sweep_budget + 1):
        step = shift(mp.one, -k)
        for m in range(min(k, len(balls) - 1) + 1):
            ball = balls[m]
            if ball.distance_to(point).hi < sub_down(ball.radius, step):
                return _build(inst, x, anchor, point, m, k, step, cfg)
    raise NotInDomain(f"no ball verifiably contains x = {dyadic_str(x)}, y = {anchor!r} "
                      f"within {cfg.sweep_budget + 1} sweeps")


def _build(inst, x, anchor, point, m, k, delta, cfg):
    K = point.inflate(delta)
    M = compute_bound_M(inst.rhs, K, cfg.bound_budget)
    w = half_width(delta, M)
    local_box = LocalBox(m_sel=m, k_sel=k, delta=delta, K=K, M=M,
                         a=exact_sub(x, w), b=exact_add(x, w), x0=x, anchor=anchor)
    logger.info(f"Local box at x = {dyadic_str(x)}: ball {m}, delta = 2^-{k}, M = {dyadic_str(M)}, "
                f"[{dyadic_str(local_box.a)}, {dyadic_str(local_box.b)}]")
    return local_box
