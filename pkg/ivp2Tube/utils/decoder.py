"""Read LLPO answers off enclosures of gadget solutions.

Cell m of stream i sits on [-2^-m, -2^-(m+1)]; at t_m = -2^-m + 2^-(m+2)
every solution satisfies

    y(t_m) > -2^(-2(m+3))  =>  0 is a valid answer for p_i
    y(t_m) <  2^(-2(m+3))  =>  1 is a valid answer for p_i

For a single gadget the sample point is x = 2 with threshold 1.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from mpmath import mp

from ivp2Tube.errors import CellUnavailable
from ivp2Tube.interval.core import dyadic_str, hull_all, shift
from ivp2Tube.rhs.gadget import sample_point
from ivp2Tube.utils.tube import InclusionVerdict, Tube, evaluate_solutions

logger = logging.getLogger("appLogger.decoder")


@dataclass
class Coverage:
    """Tubes to decode from.

    Every ``inside`` tube holds at least one solution; every group holds all
    solutions on the span of its tubes.
    """
    inside: List[Tuple[str, Tube]] = field(default_factory=list)
    groups: List[List[Tuple[str, Tube]]] = field(default_factory=list)

    @classmethod
    def from_solve_result(cls, result):
        inside = [(branch.name, branch.tube) for branch in result.confirmed
                  if branch.verdict is InclusionVerdict.INSIDE]
        everything = [(branch.name, branch.tube) for branch in result.branches]
        return cls(inside, [everything] if everything else [])

    @classmethod
    def from_extension(cls, segments):
        """One group per glued segment: each segment tube holds every solution on its span."""
        return cls([], [[(f"segment-{index}", segment.tube)] for index, segment in enumerate(segments)])

    def tubes(self):
        seen = []
        for name, tube in self.inside + [member for group in self.groups for member in group]:
            if all(name != other for other, _ in seen):
                seen.append((name, tube))
        return seen

    def covers(self, x):
        return any(tube.a <= x <= tube.b for _, tube in self.tubes())


@dataclass
class BitReport:
    index: int
    bit: Optional[int]
    certified: bool
    cell: Optional[int] = None
    sample_point: object = None
    witness: Optional[str] = None

    def to_dict(self):
        return {
            "index": self.index,
            "bit": self.bit,
            "certified": self.certified,
            "cell": self.cell,
            "sample_point": dyadic_str(self.sample_point) if self.sample_point is not None else None,
            "witness": self.witness,
        }


def _bit_for(value, threshold):
    if value[0].lo > -threshold:
        return 0
    if value[0].hi < threshold:
        return 1
    return None


def _sample_sites(gadget, index):
    """(cell, sample point, threshold) in the order they are tried."""
    if gadget.kind == "single":
        return [(None, mp.mpf(2), mp.one)] if index == 0 else []
    return [(m, sample_point(m), shift(mp.one, -2 * (m + 3))) for m in gadget.cells_for(index)]


def _values(tubes, rhs, x):
    found = []
    for name, tube in tubes:
        if tube.a <= x <= tube.b:
            found.append((name, evaluate_solutions(tube, rhs, x)))
    return found


def _certify(coverage, rhs, x, threshold):
    for name, value in _values(coverage.inside, rhs, x):
        bit = _bit_for(value, threshold) if value is not None else None
        if bit is not None:
            return bit, name
    for number, group in enumerate(coverage.groups):
        values = _values(group, rhs, x)
        if not values:
            continue
        present = [value[0] for _, value in values if value is not None]
        if not present:
            continue
        if all(v.lo > -threshold for v in present):
            bit = 0
        elif all(v.hi < threshold for v in present):
            bit = 1
        else:
            continue
        return bit, "union" if len(coverage.groups) == 1 else f"group-{number}"
    return None, None


def _heuristic(coverage, rhs, x):
    values = [value[0] for _, value in _values(coverage.tubes(), rhs, x) if value is not None]
    if not values:
        return 0
    return 0 if hull_all(values).mid() >= 0 else 1


def decode_bit(coverage: Coverage, gadget, index, strict=True) -> BitReport:
    sites = [site for site in _sample_sites(gadget, index) if coverage.covers(site[1])]
    if not sites:
        if strict:
            raise CellUnavailable(index)
        return BitReport(index, None, False)
    for cell, x, threshold in sites:
        bit, witness = _certify(coverage, gadget, x, threshold)
        if bit is not None:
            logger.debug(f"Stream {index}: bit {bit} certified at cell {cell} by {witness}")
            return BitReport(index, bit, True, cell, x, witness)
    cell, x, _ = sites[0]
    logger.info(f"Stream {index}: no certificate at any of {len(sites)} sample point(s), emitting heuristic bit")
    return BitReport(index, _heuristic(coverage, gadget, x), False, cell, x)


def decode_llpo(coverage: Coverage, gadget, indices, strict=True):
    """index -> BitReport for every requested stream index."""
    return {index: decode_bit(coverage, gadget, index, strict) for index in sorted(set(indices))}
