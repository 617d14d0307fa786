import logging
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Tuple

from ivp2Tube.errors import DegenerateSplit, NotProvenUnique
from ivp2Tube.interval.core import ROUND_DOWN, IBox, dyadic_str, scalar, working_precision
from ivp2Tube.models.application import SolveConfig
from ivp2Tube.models.instance import LocalBox
from ivp2Tube.utils.local_box import select_local_box
from ivp2Tube.utils.tube import InclusionVerdict, Tube, bisect, initial_tube, refine

logger = logging.getLogger("appLogger.solver")


@dataclass
class Branch:
    tube: Tube
    verdict: InclusionVerdict = InclusionVerdict.UNKNOWN
    path: Tuple[str, ...] = ()

    @property
    def name(self):
        return "root" if not self.path else "/".join(self.path)

    def to_dict(self):
        return {"id": self.name, "verdict": self.verdict.value, "path": list(self.path), "tube": self.tube.to_dict()}

    @classmethod
    def from_dict(cls, document):
        return cls(Tube.from_dict(document["tube"]), InclusionVerdict(document["verdict"]), tuple(document["path"]))


@dataclass
class SolveResult:
    local_box: LocalBox
    confirmed: List[Branch] = field(default_factory=list)
    undecided: List[Branch] = field(default_factory=list)
    pruned_count: int = 0
    bisections: int = 0

    @property
    def branches(self):
        """Confirmed tubes first, then undecided ones, each in creation order."""
        return self.confirmed + self.undecided

    def union(self) -> Tube:
        """Single tube holding every solution on [a, b]; None when everything was pruned."""
        tubes = [branch.tube for branch in self.branches]
        if not tubes:
            return None
        union = tubes[0]
        for tube in tubes[1:]:
            union = union.hull(tube)
        return union


def _anchor_box(anchor):
    if isinstance(anchor, IBox):
        return anchor
    return IBox.point(anchor)


def _refine_branch(branch, rhs, local_box, cfg):
    with working_precision(cfg.precision):
        return refine(branch.tube, rhs, local_box, cfg.refine_rounds)


def _outcomes(batch, rhs, local_box, cfg, pool):
    if pool is None:
        return [_refine_branch(branch, rhs, local_box, cfg) for branch in batch]
    return list(pool.map(lambda branch: _refine_branch(branch, rhs, local_box, cfg), batch))


def enclose_all(inst, at, cfg: SolveConfig = None) -> SolveResult:
    """Branch and prune over the local solution set at ``at = (x, y)``.

    Only branches refined to Empty are dropped, so confirmed and undecided
    tubes together hold every solution on the local interval. The caller's
    working precision is left untouched.
    """
    cfg = cfg or SolveConfig()
    with working_precision(cfg.precision):
        return _enclose(inst, at, cfg)


def _enclose(inst, at, cfg):
    x, anchor = at
    x = scalar(x)
    anchor = _anchor_box(anchor)
    local_box = select_local_box(inst, x, anchor, cfg)
    result = SolveResult(local_box)
    worklist = deque([Branch(initial_tube(local_box, anchor, cfg.grid_depth))])

    pool = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None
    try:
        while worklist:
            batch = [worklist.popleft() for _ in range(min(cfg.workers, len(worklist)))]
            for branch, outcome in zip(batch, _outcomes(batch, inst.rhs, local_box, cfg, pool)):
                _classify(result, worklist, branch, outcome, cfg)
    finally:
        if pool is not None:
            pool.shutdown()

    logger.info(f"Solved at x = {dyadic_str(x)}: {len(result.confirmed)} confirmed, "
                f"{len(result.undecided)} undecided, {result.pruned_count} pruned, "
                f"{result.bisections} bisections")
    return result


def _classify(result, worklist, branch, outcome, cfg):
    if outcome.verdict is InclusionVerdict.EMPTY:
        result.pruned_count += 1
        logger.debug(f"Branch {branch.name} pruned after {outcome.rounds} rounds")
        return
    tube = outcome.tube
    inside = outcome.verdict is InclusionVerdict.INSIDE
    settled = Branch(tube, outcome.verdict, branch.path)
    budget_left = result.bisections < cfg.max_bisections
    if inside and (tube.max_width() <= scalar(cfg.target_width, ROUND_DOWN) or not budget_left):
        result.confirmed.append(settled)
        return
    if not budget_left:
        result.undecided.append(settled)
        return
    node, component = tube.widest()
    try:
        left, right = bisect(tube, node, component)
    except DegenerateSplit:
        (result.confirmed if inside else result.undecided).append(settled)
        return
    result.bisections += 1
    worklist.append(Branch(left, path=branch.path + (f"{node}.{component}L",)))
    worklist.append(Branch(right, path=branch.path + (f"{node}.{component}R",)))


def solve_unique(inst, at, cfg: SolveConfig = None) -> Tube:
    result = enclose_all(inst, at, cfg)
    if len(result.confirmed) == 1 and not result.undecided:
        return result.confirmed[0].tube
    raise NotProvenUnique(f"{len(result.confirmed)} confirmed and {len(result.undecided)} undecided tubes",
                          result)
