"""Extension of the solution set toward the maximal interval of existence.

Round 1 solves at (x0, y0). Every later round restarts at the current
endpoints, anchored at the interval enclosure the previous segment gives
there, and glues the outer half of the new local interval.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional

from ivp2Tube.errors import NotInDomain, OutOfRange, SchemaError, StepBoundViolation
from ivp2Tube.interval.core import IBox, dyadic_str, scalar, to_fraction, working_precision
from ivp2Tube.models.application import SolveConfig
from ivp2Tube.utils.general import parse_dyadic
from ivp2Tube.utils.solver import enclose_all
from ivp2Tube.utils.tube import Tube, evaluate

logger = logging.getLogger("appLogger.extender")

GROWING = "growing"
BOUNDARY_REACHED = "boundary-reached"
NO_ENCLOSURE = "no-enclosure"


@dataclass
class Segment:
    lo: object
    hi: object
    tube: Tube

    def covers(self, x):
        return self.lo <= x <= self.hi

    def to_dict(self):
        return {"lo": dyadic_str(self.lo), "hi": dyadic_str(self.hi), "tube": self.tube.to_dict()}

    @classmethod
    def from_dict(cls, document):
        try:
            return cls(parse_dyadic(document["lo"]), parse_dyadic(document["hi"]), Tube.from_dict(document["tube"]))
        except (KeyError, TypeError, ValueError) as e:
            raise SchemaError(f"malformed segment: {e}") from None


@dataclass
class SideStep:
    """One local solve at an endpoint."""
    status: str
    delta: object = None
    M: object = None
    start: object = None
    end: object = None

    def to_dict(self):
        document = {"status": self.status}
        if self.delta is not None:
            document.update(delta=dyadic_str(self.delta), M=dyadic_str(self.M))
        return document


@dataclass
class RoundRecord:
    round: int
    a: object
    b: object
    left: SideStep
    right: SideStep

    def to_dict(self):
        return {"round": self.round, "a": dyadic_str(self.a), "b": dyadic_str(self.b),
                "left": self.left.to_dict(), "right": self.right.to_dict()}


@dataclass
class ExtensionState:
    x0: object
    a: object
    b: object
    left_value: Optional[IBox] = None
    right_value: Optional[IBox] = None
    left_status: str = GROWING
    right_status: str = GROWING
    segments: List[Segment] = field(default_factory=list)
    records: List[RoundRecord] = field(default_factory=list)

    @property
    def round(self):
        return len(self.records)

    def glued(self):
        """Segments ordered by position."""
        return sorted(self.segments, key=lambda s: s.lo)

    def evaluate(self, x) -> IBox:
        """Intersection of the enclosures every segment covering x gives there."""
        x = scalar(x)
        found = None
        for segment in self.segments:
            if segment.covers(x):
                value = evaluate(segment.tube, x)
                found = value if found is None else (found.intersect(value) or found)
        if found is None:
            raise OutOfRange(f"x = {dyadic_str(x)} outside [{dyadic_str(self.a)}, {dyadic_str(self.b)}]")
        return found

    def rows(self):
        """Glued CSV rows: the grid nodes of every segment that fall inside it, junctions once."""
        rows = []
        seen = set()
        for segment in self.glued():
            table = segment.tube.to_rows()
            if not rows:
                rows.append(table[0])
            for j, row in enumerate(table[1:]):
                x = segment.tube.x(j)
                if segment.covers(x) and row[0] not in seen:
                    seen.add(row[0])
                    rows.append(row)
        return rows


def _union(inst, x, anchor, cfg):
    """(union tube, local box) of one local solve; union is None when every branch was pruned."""
    result = enclose_all(inst, (x, anchor), cfg)
    return result.union(), result.local_box


def _grow(inst, x, anchor, cfg, outward):
    try:
        union, local_box = _union(inst, x, anchor, cfg)
    except NotInDomain as e:
        logger.info(f"Side at x = {dyadic_str(x)} frozen: {e}")
        return SideStep(BOUNDARY_REACHED), None
    if union is None:
        return SideStep(NO_ENCLOSURE, local_box.delta, local_box.M), None
    end = local_box.b if outward > 0 else local_box.a
    return SideStep(GROWING, local_box.delta, local_box.M, x, end), union


def extend(inst, rounds, cfg: SolveConfig = None, on_round: Callable[[RoundRecord], None] = None) -> ExtensionState:
    cfg = cfg or SolveConfig()
    if rounds < 1:
        raise ValueError(f"rounds must be at least 1, got {rounds}")
    with working_precision(cfg.precision):
        return _extend(inst, rounds, cfg, on_round)


def _extend(inst, rounds, cfg, on_round):
    anchor = IBox.point(inst.y0)
    union, local_box = _union(inst, inst.x0, anchor, cfg)
    state = ExtensionState(inst.x0, local_box.a, local_box.b)
    if union is None:
        state.left_status = state.right_status = NO_ENCLOSURE
        first = SideStep(NO_ENCLOSURE, local_box.delta, local_box.M)
        _record(state, RoundRecord(1, state.a, state.b, first, first), on_round)
        return state
    state.segments.append(Segment(local_box.a, local_box.b, union))
    state.left_value = union.nodes[0]
    state.right_value = union.nodes[-1]
    left = SideStep(GROWING, local_box.delta, local_box.M, inst.x0, local_box.a)
    right = SideStep(GROWING, local_box.delta, local_box.M, inst.x0, local_box.b)
    _record(state, RoundRecord(1, state.a, state.b, left, right), on_round)

    for number in range(2, rounds + 1):
        if state.left_status != GROWING and state.right_status != GROWING:
            break
        left, right = _sides(inst, state, cfg)
        _apply(state, left, right)
        _record(state, RoundRecord(number, state.a, state.b, left[0], right[0]), on_round)
    return state


def _sides(inst, state, cfg):
    jobs = []
    if state.left_status == GROWING:
        jobs.append(("left", state.a, state.left_value, -1))
    if state.right_status == GROWING:
        jobs.append(("right", state.b, state.right_value, 1))

    def run(job):
        return _grow(inst, job[1], job[2], cfg, job[3])

    if cfg.workers > 1 and len(jobs) == 2:
        with ThreadPoolExecutor(max_workers=2) as pool:
            outcomes = list(pool.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]
    by_side = {job[0]: outcome for job, outcome in zip(jobs, outcomes)}
    left = by_side.get("left", (SideStep(state.left_status), None))
    right = by_side.get("right", (SideStep(state.right_status), None))
    return left, right


def _apply(state, left, right):
    (left_step, left_tube), (right_step, right_tube) = left, right
    if left_tube is not None:
        state.segments.append(Segment(left_step.end, left_step.start, left_tube))
        state.left_value = left_tube.nodes[0]
        state.a = left_step.end
    elif state.left_status == GROWING:
        state.left_status = left_step.status
    if right_tube is not None:
        state.segments.append(Segment(right_step.start, right_step.end, right_tube))
        state.right_value = right_tube.nodes[-1]
        state.b = right_step.end
    elif state.right_status == GROWING:
        state.right_status = right_step.status


def _record(state, record, on_round):
    state.records.append(record)
    logger.info(f"Round {record.round}: [{dyadic_str(record.a)}, {dyadic_str(record.b)}]")
    if on_round is not None:
        on_round(record)


def _margin(step: SideStep):
    gained = abs(to_fraction(step.end) - to_fraction(step.start))
    return gained - to_fraction(step.delta) / (2 * to_fraction(step.M))


def step_lower_bound_check(state: ExtensionState):
    """Per-round margins (gain - delta / 2M) for every growing side; raises when one is not positive."""
    report = []
    offending = []
    for record in state.records:
        entry = {"round": record.round}
        for side in ("left", "right"):
            step = getattr(record, side)
            if step.status == GROWING and step.end is not None:
                margin = _margin(step)
                entry[side] = margin
                if margin <= 0:
                    offending.append(record.round)
        report.append(entry)
    if offending:
        raise StepBoundViolation(sorted(set(offending)))
    return report


def margins_to_dict(report):
    return [{key: (str(value) if isinstance(value, Fraction) else value) for key, value in entry.items()}
            for entry in report]
