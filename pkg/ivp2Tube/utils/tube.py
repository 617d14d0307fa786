"""Function enclosures on a dyadic grid and the interval Picard operator.

A tube over [a, b] with depth L holds one box per grid node
x_j = a + j h, h = (b - a) / 2^L. It stands for every M-Lipschitz function
y with y(x0) in anchor_value and y(x_j) in node j for all j.
"""
import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional, Tuple

from mpmath import mp

from ivp2Tube.errors import DegenerateSplit, OutOfRange, SchemaError
from ivp2Tube.interval.core import (IBox, Interval, dyadic_str, exact_abs, exact_add, exact_mul, exact_sub, mul_up,
                                    next_down, next_up, scalar, shift, to_fraction)
from ivp2Tube.models.instance import box_from_pairs
from ivp2Tube.utils.general import parse_dyadic

logger = logging.getLogger("appLogger.tube")

DEFAULT_DEPTH = 8
EDGE_SUBSTEPS_LOG = 2
EDGE_PASSES = 3


class InclusionVerdict(Enum):
    INSIDE = "Inside"
    EMPTY = "Empty"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Tube:
    a: object
    b: object
    depth: int
    nodes: Tuple[IBox, ...]
    lip: object
    anchor: int
    anchor_value: IBox

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if len(self.nodes) != 2 ** self.depth + 1:
            raise ValueError(f"depth {self.depth} needs {2 ** self.depth + 1} nodes, got {len(self.nodes)}")
        if not 0 <= self.anchor < len(self.nodes):
            raise ValueError(f"anchor index {self.anchor} outside the grid")

    @property
    def h(self):
        return shift(exact_sub(self.b, self.a), -self.depth)

    @property
    def x0(self):
        return self.x(self.anchor)

    @property
    def dimension(self):
        return len(self.anchor_value)

    def x(self, j):
        return exact_add(self.a, exact_mul(self.h, mp.mpf(j)))

    def grid(self):
        return [self.x(j) for j in range(len(self.nodes))]

    def with_nodes(self, nodes):
        return replace(self, nodes=tuple(nodes))

    def cone_radius(self, j):
        """Upper bound of M |x_j - x0|."""
        return mul_up(self.lip, exact_mul(self.h, mp.mpf(abs(j - self.anchor))))

    def widest(self):
        """(node, component) of the widest node interval; ties go to the smallest indices."""
        best = None
        for j, node in enumerate(self.nodes):
            for i, component in enumerate(node):
                width = component.width()
                if best is None or width > best[0]:
                    best = (width, j, i)
        return best[1], best[2]

    def max_width(self):
        return max(node.max_width() for node in self.nodes)

    def hull(self, other: "Tube") -> "Tube":
        if (self.a, self.b, self.depth, self.anchor) != (other.a, other.b, other.depth, other.anchor):
            raise ValueError("hull needs tubes on the same grid")
        return Tube(self.a, self.b, self.depth, tuple(u.hull(v) for u, v in zip(self.nodes, other.nodes)),
                    max(self.lip, other.lip), self.anchor, self.anchor_value.hull(other.anchor_value))

    def tighten(self) -> Optional["Tube"]:
        """Propagate |y(x_{j+1}) - y(x_j)| <= M h forwards and backwards; None if a node empties."""
        step = mul_up(self.lip, self.h)
        nodes = list(self.nodes)
        pinned = nodes[self.anchor].intersect(self.anchor_value)
        if pinned is None:
            return None
        nodes[self.anchor] = pinned
        for j in range(len(nodes) - 1):
            nodes[j + 1] = nodes[j + 1].intersect(nodes[j].inflate(step))
            if nodes[j + 1] is None:
                return None
        for j in range(len(nodes) - 1, 0, -1):
            nodes[j - 1] = nodes[j - 1].intersect(nodes[j].inflate(step))
            if nodes[j - 1] is None:
                return None
        return self.with_nodes(nodes)

    def contains_samples(self, values):
        """values[j] is a point (tuple of numbers) that must lie in node j."""
        return all(node.contains(tuple(scalar(v) for v in value)) for node, value in zip(self.nodes, values))

    def to_dict(self):
        return {
            "a": dyadic_str(self.a),
            "b": dyadic_str(self.b),
            "depth": self.depth,
            "lip": dyadic_str(self.lip),
            "anchor": self.anchor,
            "anchor_value": [[dyadic_str(c.lo), dyadic_str(c.hi)] for c in self.anchor_value],
            "nodes": [[[dyadic_str(c.lo), dyadic_str(c.hi)] for c in node] for node in self.nodes],
        }

    @classmethod
    def from_dict(cls, document):
        try:
            return cls(a=parse_dyadic(document["a"]), b=parse_dyadic(document["b"]),
                       depth=int(document["depth"]),
                       nodes=tuple(box_from_pairs(node) for node in document["nodes"]),
                       lip=parse_dyadic(document["lip"]), anchor=int(document["anchor"]),
                       anchor_value=box_from_pairs(document["anchor_value"]))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed tube: {e}") from None

    def to_rows(self):
        """CSV rows: header, then x, lo_1, hi_1, ..., lo_n, hi_n per node."""
        header = ["x"]
        for i in range(1, self.dimension + 1):
            header += [f"lo_{i}", f"hi_{i}"]
        rows = [header]
        for j, node in enumerate(self.nodes):
            row = [dyadic_str(self.x(j))]
            for component in node:
                row += [dyadic_str(component.lo), dyadic_str(component.hi)]
            rows.append(row)
        return rows


class RefineOutcome(NamedTuple):
    tube: Tube
    verdict: InclusionVerdict
    rounds: int


def grid_index(a, h, x):
    """j with a + j h = x; ValueError when x is not a grid node."""
    offset = (to_fraction(x) - to_fraction(a)) / to_fraction(h)
    if offset.denominator != 1:
        raise ValueError(f"{dyadic_str(x)} is not a grid node")
    return int(offset)


def initial_tube(lb, anchor_value: IBox, depth=DEFAULT_DEPTH) -> Tube:
    """The Lipschitz cone anchor_value +- M |x - x0| clipped to the delta-ball."""
    if depth < 1:
        raise ValueError(f"depth must be at least 1, got {depth}")
    h = shift(exact_sub(lb.b, lb.a), -depth)
    anchor = grid_index(lb.a, h, lb.x0)
    shell = Tube(lb.a, lb.b, depth, (anchor_value,) * (2 ** depth + 1), lb.M, anchor, anchor_value)
    return shell.with_nodes(_cone(shell, lb))


def _cone(t: Tube, lb):
    nodes = []
    for j in range(len(t.nodes)):
        node = t.anchor_value.inflate(t.cone_radius(j)).intersect(lb.ball)
        nodes.append(node if node is not None else t.anchor_value)
    return nodes


def _cell(t: Tube, j, lb=None):
    """x range of cell j and the box every M-Lipschitz function threading nodes j, j+1 stays in."""
    cell_x = Interval(t.x(j), t.x(j + 1))
    cell_y = t.nodes[j].hull(t.nodes[j + 1]).inflate(mul_up(t.lip, shift(t.h, -1)))
    if lb is not None:
        cell_y = cell_y.intersect(lb.ball) or cell_y
    return cell_x, cell_y


def _narrow(rhs, t: Tube, j, cell_x, cell_y, slope):
    """Cell box for solutions only: y(s) in Y_j + [0, h] f and in Y_{j+1} - [0, h] f."""
    reach = slope.scaled(Interval(mp.zero, t.h))
    narrowed = (t.nodes[j] + reach).intersect(t.nodes[j + 1] - reach)
    narrowed = narrowed.intersect(cell_y) if narrowed is not None else None
    if narrowed is None:
        return None
    return rhs.eval_box(IBox((cell_x,) + narrowed.components))


def _accumulate(t: Tube, slopes):
    width = Interval(t.h, t.h)
    image = [None] * len(t.nodes)
    image[t.anchor] = t.anchor_value
    for j in range(t.anchor, len(t.nodes) - 1):
        image[j + 1] = image[j] + slopes[j].scaled(width)
    for j in range(t.anchor, 0, -1):
        image[j - 1] = image[j] - slopes[j - 1].scaled(width)
    return image


def _images(rhs, lb, t: Tube, narrow):
    """Picard image of the whole tube and, with ``narrow``, the sharper image valid for solutions.

    The second image is None when some cell holds no solution at all.
    """
    slopes, narrowed = [], []
    for j in range(len(t.nodes) - 1):
        cell_x, cell_y = _cell(t, j, lb)
        slope = rhs.eval_box(IBox((cell_x,) + cell_y.components))
        slopes.append(slope)
        if narrow and narrowed is not None:
            sharper = _narrow(rhs, t, j, cell_x, cell_y, slope)
            narrowed = None if sharper is None else narrowed + [sharper]
    image = _accumulate(t, slopes)
    if not narrow:
        return image, image
    return image, (_accumulate(t, narrowed) if narrowed is not None else None)


def picard_image(rhs, lb, t: Tube):
    """Node enclosures of y0 + integral of f(s, y(s)) from x0 for every y in the tube (before clipping)."""
    return _images(rhs, lb, t, narrow=False)[0]


def picard_step(rhs, lb, t: Tube) -> Tube:
    image = picard_image(rhs, lb, t)
    nodes = []
    for raw, cone in zip(image, _cone(t, lb)):
        clipped = raw.intersect(cone)
        nodes.append(clipped if clipped is not None else raw)
    return t.with_nodes(nodes)


def _strictly_inside(image, t: Tube):
    for j, (raw, node) in enumerate(zip(image, t.nodes)):
        if j == t.anchor:
            if not node.contains(raw):
                return False
        elif not all(outer.interior_contains(inner) for outer, inner in zip(node, raw)):
            return False
    return True


def _intersect_all(image, t: Tube, lb):
    if image is None:
        return None
    nodes = []
    for raw, cone, node in zip(image, _cone(t, lb), t.nodes):
        both = node.intersect(raw)
        both = both.intersect(cone) if both is not None else None
        if both is None:
            return None
        nodes.append(both)
    return nodes


def _edge_step(rhs, x_from, x_to, value, lip):
    """Enclosure at x_to of every solution through (x_from, value), scalar case.

    None when f is not bounded by lip around the start.
    """
    length = exact_abs(exact_sub(x_to, x_from))
    forward = x_to > x_from
    cell_x = Interval(min(x_from, x_to), max(x_from, x_to))
    start = Interval(value, value)
    reach = Interval(mp.zero, length)
    box = start.inflate(mul_up(lip, length))
    slope = rhs.eval_box(IBox((cell_x, box)))[0]
    if not Interval(-lip, lip).contains(slope):
        return None
    for _ in range(EDGE_PASSES - 1):
        drift = slope * reach
        box = (start + drift if forward else start - drift).intersect(box) or box
        slope = rhs.eval_box(IBox((cell_x, box)))[0]
    drift = slope * Interval(length, length)
    return start + drift if forward else start - drift


def _follow_edge(rhs, t: Tube, j, k, value, upper):
    """Bound at node k of the maximal (``upper``) or minimal solution leaving node j at ``value``."""
    start = t.x(j)
    step = shift(exact_sub(t.x(k), start), -EDGE_SUBSTEPS_LOG)
    for i in range(2 ** EDGE_SUBSTEPS_LOG):
        x_from = exact_add(start, exact_mul(step, mp.mpf(i)))
        reached = _edge_step(rhs, x_from, exact_add(x_from, step), value, t.lip)
        if reached is None:
            return None
        value = reached.hi if upper else reached.lo
    return value


def edge_sweep(rhs, t: Tube) -> Optional[Tube]:
    """Contract a scalar tube along its edges; None if a node empties.

    With n = 1 every solution below the top of node j stays below the
    maximal solution through that point (and above the minimal one through
    the bottom), so the extremal solutions leaving the anchor bound every
    node in turn. Funnels that close up after y changes sign stay narrow.
    """
    nodes = list(t.nodes)
    for order, direction in ((range(t.anchor, len(nodes) - 1), 1), (range(t.anchor, 0, -1), -1)):
        for j in order:
            k = j + direction
            current, target = nodes[j][0], nodes[k][0]
            hi = _follow_edge(rhs, t, j, k, current.hi, upper=True)
            lo = _follow_edge(rhs, t, j, k, current.lo, upper=False)
            hi = target.hi if hi is None else min(hi, target.hi)
            lo = target.lo if lo is None else max(lo, target.lo)
            if lo > hi:
                return None
            nodes[k] = IBox((Interval(lo, hi),))
    return t.with_nodes(nodes)


def check_inclusion(rhs, lb, t: Tube) -> InclusionVerdict:
    """Inside: T#(t) lies strictly inside t. Empty: no solution can thread t."""
    image, sharp = _images(rhs, lb, t, narrow=True)
    if _intersect_all(sharp, t, lb) is None:
        return InclusionVerdict.EMPTY
    if _strictly_inside(image, t):
        return InclusionVerdict.INSIDE
    return InclusionVerdict.UNKNOWN


def _shrunk(old: Tube, new: Tube):
    for before, after in zip(old.nodes, new.nodes):
        for u, v in zip(before, after):
            if v.lo > next_up(u.lo) or v.hi < next_down(u.hi):
                return True
    return False


def refine(t: Tube, rhs, lb, rounds) -> RefineOutcome:
    """Contract t until nothing moves by more than one ulp.

    Each round intersects t with the image of its solutions; scalar tubes
    also get one edge sweep in the first round. The verdict is
    Inside once the image of the whole tube lands strictly inside the tube
    being contracted, Empty when an intersection runs empty.
    """
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    verdict = InclusionVerdict.UNKNOWN
    for done in range(1, rounds + 1):
        image, sharp = _images(rhs, lb, t, narrow=True)
        if verdict is not InclusionVerdict.INSIDE and _strictly_inside(image, t):
            verdict = InclusionVerdict.INSIDE
        nodes = _intersect_all(sharp, t, lb)
        contracted = t.with_nodes(nodes).tighten() if nodes is not None else None
        if contracted is not None and done == 1 and t.dimension == 1:
            contracted = edge_sweep(rhs, contracted)
        if contracted is None:
            logger.debug(f"Tube emptied in refine round {done}")
            return RefineOutcome(t, InclusionVerdict.EMPTY, done)
        if not _shrunk(t, contracted):
            return RefineOutcome(contracted, verdict, done)
        t = contracted
    return RefineOutcome(t, verdict, rounds)


def _locate(t: Tube, x):
    x = scalar(x)
    if not t.a <= x <= t.b:
        raise OutOfRange(f"x = {dyadic_str(x)} outside [{dyadic_str(t.a)}, {dyadic_str(t.b)}]")
    return x, (to_fraction(x) - to_fraction(t.a)) / to_fraction(t.h)


def evaluate(t: Tube, x) -> IBox:
    x, offset = _locate(t, x)
    j = min(round(offset), len(t.nodes) - 1)
    return t.nodes[j].inflate(mul_up(t.lip, exact_abs(exact_sub(x, t.x(j)))))


def evaluate_solutions(t: Tube, rhs, x) -> Optional[IBox]:
    """Enclosure of y(x) for the solutions threading t, sharper than ``evaluate`` off the grid.

    None when no solution threads the cell around x.
    """
    x, offset = _locate(t, x)
    if offset.denominator == 1:
        return t.nodes[int(offset)]
    coarse = evaluate(t, x)
    j = int(offset)
    cell_x, cell_y = _cell(t, j)
    slope = _narrow(rhs, t, j, cell_x, cell_y, rhs.eval_box(IBox((cell_x,) + cell_y.components)))
    if slope is None:
        return None
    after = exact_sub(x, t.x(j))
    before = exact_sub(t.x(j + 1), x)
    value = (t.nodes[j] + slope.scaled(Interval(after, after))).intersect(
        t.nodes[j + 1] - slope.scaled(Interval(before, before)))
    return value.intersect(coarse) if value is not None else None


def bisect(t: Tube, node, component) -> Tuple[Tube, Tube]:
    """Split one node component at its midpoint and propagate to the neighbours."""
    interval = t.nodes[node][component]
    if next_up(next_up(interval.lo)) >= interval.hi:
        raise DegenerateSplit(f"node {node} component {component} is {interval!r}")
    middle = interval.mid()
    children = []
    for part in (Interval(interval.lo, middle), Interval(middle, interval.hi)):
        nodes = list(t.nodes)
        nodes[node] = nodes[node].replace(component, part)
        child = t.with_nodes(nodes)
        children.append(child.tighten() or child)
    return children[0], children[1]
