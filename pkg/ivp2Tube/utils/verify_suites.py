"""Oracle comparison suites behind ``ivp2Tube verify``."""
import logging
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List

from mpmath import mp

from ivp2Tube.errors import UsageError
from ivp2Tube.interval.core import IBox, Interval, iv_arith, iv_norm_max, iv_set_ops, scalar, to_fraction
from ivp2Tube.models.application import SolveConfig
from ivp2Tube.models.instance import instance_from_dict
from ivp2Tube.rhs.expression import parse
from ivp2Tube.rhs.gadget import BitStream, closed_solution_g, closed_solution_s
from ivp2Tube.utils.decoder import Coverage, decode_bit, decode_llpo
from ivp2Tube.utils.extender import extend, step_lower_bound_check
from ivp2Tube.utils.solver import enclose_all

logger = logging.getLogger("appLogger.verify")

SUITES = ("closed-forms", "funnel", "decode", "extension", "interval")
ORACLE_PRECISION = 160

FUNNEL_DEPTH = 6
FUNNEL_ROUNDS = 10
DECODE_DEPTH = 10
DECODE_ROUNDS = 6
DECODE_CELL_BUDGET = 10
FORCING_DEPTH = 5
FORCING_ROUNDS = 40


@dataclass
class Check:
    name: str
    passed: bool
    margin: object = None

    def to_dict(self):
        margin = self.margin
        if isinstance(margin, Fraction):
            margin = float(margin)
        elif margin is not None and not isinstance(margin, (int, float, str)):
            margin = float(margin)
        return {"name": self.name, "passed": self.passed, "margin": margin}


@dataclass
class SuiteReport:
    suite: str
    checks: List[Check] = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def add(self, name, passed, margin=None):
        self.checks.append(Check(name, bool(passed), margin))
        if not passed:
            logger.warning(f"[{self.suite}] {name} failed (margin {margin})")

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


def instance(rhs, x0=0, y0=(0,), domain=None):
    return instance_from_dict({
        "dimension": len(y0),
        "rhs": rhs,
        "domain": domain or {"auto_growing": True},
        "x0": str(x0),
        "y0": [str(v) for v in y0],
    })


def _random_interval(rng, scale=2 ** 10):
    u = Fraction(rng.randint(-4 * scale, 4 * scale), scale)
    v = Fraction(rng.randint(-4 * scale, 4 * scale), scale)
    return min(u, v), max(u, v)


def _sample(rng, lo, hi):
    return lo + (hi - lo) * Fraction(rng.randint(0, 1024), 1024)


_EXACT = {
    "add": lambda s, t: s + t,
    "sub": lambda s, t: s - t,
    "mul": lambda s, t: s * t,
    "neg": lambda s, t: -s,
    "abs": lambda s, t: abs(s),
    "min": min,
    "max": max,
}


def interval_suite(samples=100_000, seed=7):
    """Containment, isotonicity and cube composition on random dyadic intervals."""
    report = SuiteReport("interval")
    rng = random.Random(seed)
    failures = {"containment": 0, "isotonicity": 0, "cube": 0, "expression": 0}
    expression = parse("9*x*(1-x)*scbrt(y1) - min(abs(y1), x) + max(x, y1) * -2", 1)
    for _ in range(samples):
        op = rng.choice(sorted(_EXACT) + ["scbrt", "norm"])
        (alo, ahi), (blo, bhi) = _random_interval(rng), _random_interval(rng)
        a, b = Interval.of(alo, ahi), Interval.of(blo, bhi)
        s, t = _sample(rng, alo, ahi), _sample(rng, blo, bhi)
        wide_a = a.inflate(scalar(Fraction(1, 8)))
        if op == "scbrt":
            result = a.scbrt()
            with mp.workprec(ORACLE_PRECISION):
                root = mp.cbrt(abs(mp.mpf(s.numerator) / s.denominator))
                root = root if s >= 0 else -root
                if not (result.lo <= root <= result.hi):
                    failures["containment"] += 1
            if not wide_a.scbrt().contains(result):
                failures["isotonicity"] += 1
            cube_lo = to_fraction(result.lo) ** 3
            cube_hi = to_fraction(result.hi) ** 3
            if not (cube_lo <= alo and ahi <= cube_hi):
                failures["cube"] += 1
        elif op == "norm":
            box = IBox((a, b))
            if not iv_norm_max(box).contains(scalar(max(abs(s), abs(t)))):
                failures["containment"] += 1
            if not iv_norm_max(IBox((wide_a, b))).contains(iv_norm_max(box)):
                failures["isotonicity"] += 1
        else:
            result = iv_arith(op, a, b)
            if not result.contains(scalar(_EXACT[op](s, t))):
                failures["containment"] += 1
            if not iv_arith(op, wide_a, b).contains(result):
                failures["isotonicity"] += 1
        if not iv_set_ops("contains", iv_set_ops("hull", a, b), a):
            failures["containment"] += 1
        point = IBox.point((s, t))
        value = expression.eval_box(point)[0]
        with mp.workprec(ORACLE_PRECISION):
            sm, tm = mp.mpf(s.numerator) / s.denominator, mp.mpf(t.numerator) / t.denominator
            exact = 9 * sm * (1 - sm) * mp.sign(tm) * mp.cbrt(abs(tm)) - min(abs(tm), sm) + max(sm, tm) * -2
            if not (value.lo <= exact <= value.hi):
                failures["expression"] += 1
    for name, count in failures.items():
        report.add(f"{name} over {samples} samples", count == 0, count)
    return report


def closed_forms_suite(cfg: SolveConfig):
    report = SuiteReport("closed-forms")
    with mp.workprec(64):
        worst = mp.zero
        for y0, sign, c in ((1, None, None), (Fraction(-1, 2), None, None), (0, 1, Fraction(1, 4)), (0, -1, 0)):
            for k in range(1, 201):
                x = mp.mpf(k) / 202
                step = mp.mpf(2) ** -20
                y = closed_solution_s(y0, sign, c, x)
                slope = (closed_solution_s(y0, sign, c, x + step) - closed_solution_s(y0, sign, c, x - step)) / (2 * step)
                expected = 9 * x * (1 - x) * mp.sign(y) * mp.cbrt(abs(y))
                if abs(expected) > mp.mpf(10) ** -3:
                    worst = max(worst, abs(slope - expected) / abs(expected))
        report.add("s closed forms solve the ODE (relative derivative error)", worst <= mp.mpf(10) ** -6, float(worst))

    for entries in ((0,), (1,), (2, 0), (2, 2, 1), ()):
        stream = BitStream(entries)
        value = closed_solution_g(stream, 4)
        report.add(f"gadget {list(entries)} returns to zero at x = 4", abs(value) < mp.mpf(10) ** -30, float(abs(value)))

    exp_cfg = replace(cfg, grid_depth=10)
    result = enclose_all(instance({"expr": "y1"}, 0, (1,)), (0, (1,)), exp_cfg)
    inside = all(branch.tube.contains_samples([(mp.exp(x),) for x in branch.tube.grid()])
                 for branch in result.confirmed)
    report.add("exp tube confirmed", len(result.confirmed) >= 1 and not result.undecided, len(result.confirmed))
    report.add("exp tube contains e^x at every node", inside)
    if result.confirmed:
        width = max(branch.tube.max_width() for branch in result.confirmed)
        report.add("exp tube width <= 1e-2", width <= mp.mpf("0.01"), float(width))
    return report


def funnel_samples(tube, sign, c):
    """Funnel member of the all-2 single gadget at the grid nodes (x0 = 1, y0 = 0)."""
    values = []
    for x in tube.grid():
        u = to_fraction(x) - 1
        values.append((closed_solution_s(0, sign, c, u) if u > 0 else 0,))
    return values


def funnel_suite(cfg: SolveConfig, budgets=(8, 16, 64)):
    report = SuiteReport("funnel")
    inst = instance({"gadget": {"stream": []}}, 1, (0,))
    funnel_cfg = replace(cfg, grid_depth=min(cfg.grid_depth, FUNNEL_DEPTH),
                         refine_rounds=min(cfg.refine_rounds, FUNNEL_ROUNDS))
    for budget in budgets:
        result = enclose_all(inst, (1, (0,)), replace(funnel_cfg, max_bisections=budget))
        tubes = [branch.tube for branch in result.branches]
        missed = 0
        for sign in (1, -1):
            for c in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
                samples = funnel_samples(tubes[0], sign, c) if tubes else []
                for j, (value,) in enumerate(samples):
                    if not any(tube.nodes[j][0].contains(scalar(value)) for tube in tubes):
                        missed += 1
        report.add(f"union holds every funnel sample, budget {budget}", bool(tubes) and missed == 0, missed)
    return report


def random_streams(rng, count=3, length=8):
    """1..count streams; a forced entry, if any, sits in the first three positions."""
    streams = []
    for _ in range(rng.randint(1, count)):
        forced = rng.choice((0, 1, None))
        entries = [2] * rng.randint(0, length)
        if forced is not None and entries:
            entries[rng.randrange(min(3, len(entries)))] = forced
        streams.append(entries)
    return streams


def random_forced_stream(rng, length=8):
    entries = [2] * rng.randint(1, length)
    entries[rng.randrange(min(3, len(entries)))] = rng.choice((0, 1))
    return entries


def decode_cfg(cfg: SolveConfig):
    """Fine grid, a single refined tube and few Picard rounds: the edge sweep does the work."""
    return replace(cfg, grid_depth=max(cfg.grid_depth, DECODE_DEPTH), max_bisections=0,
                   refine_rounds=min(cfg.refine_rounds, DECODE_ROUNDS))


def sign_forcing_checks(report, cfg: SolveConfig, instances=10, seed=5):
    """Single gadgets with a forced bit, extended from (0, 0) past x = 2 and decoded there."""
    rng = random.Random(seed)
    forcing_cfg = replace(cfg, grid_depth=min(cfg.grid_depth, FORCING_DEPTH), max_bisections=0,
                          refine_rounds=min(cfg.refine_rounds, DECODE_ROUNDS))
    failed = 0
    for _ in range(instances):
        entries = random_forced_stream(rng)
        inst = instance({"gadget": {"stream": entries}})
        state = extend(inst, FORCING_ROUNDS, forcing_cfg)
        bit_report = decode_bit(Coverage.from_extension(state.glued()), inst.rhs, 0, strict=False)
        if not bit_report.certified or bit_report.bit not in BitStream(entries).llpo():
            failed += 1
            logger.info(f"Sign forcing missed for stream {entries}: bit {bit_report.bit}, "
                        f"certified {bit_report.certified}")
    report.add(f"sign forced at x = 2 for {instances} forced single gadgets", failed == 0, failed)


def decode_suite(cfg: SolveConfig, lists=20, seed=11, cell_budget=DECODE_CELL_BUDGET):
    report = SuiteReport("decode")
    sign_forcing_checks(report, cfg)
    rng = random.Random(seed)
    unsound = 0
    forced_total = forced_certified = 0
    solve_cfg = decode_cfg(cfg)
    for _ in range(lists):
        streams = random_streams(rng)
        inst = instance({"gadget": {"streams": streams, "cell_budget": cell_budget}})
        result = enclose_all(inst, (0, (0,)), solve_cfg)
        reports = decode_llpo(Coverage.from_solve_result(result), inst.rhs, range(len(streams)), strict=False)
        for index, bit_report in reports.items():
            valid = BitStream(streams[index]).llpo()
            if bit_report.certified and bit_report.bit not in valid:
                unsound += 1
            if len(valid) == 1:
                forced_total += 1
                forced_certified += bit_report.certified
                if not bit_report.certified:
                    logger.info(f"Forced stream {index} of {streams} not certified (cell {bit_report.cell})")
    report.add("every certified bit is a valid LLPO answer", unsound == 0, unsound)
    report.add("forced bits certified", forced_certified == forced_total,
               f"{forced_certified}/{forced_total}")
    return report


def extension_suite(cfg: SolveConfig, rounds=8):
    report = SuiteReport("extension")
    state = extend(instance({"expr": "y1*y1"}, 0, (1,)), rounds, cfg)
    report.add("blow-up: every b_i < 1", all(record.b < 1 for record in state.records), float(state.b))
    missed = 0
    for segment in state.segments:
        for j, x in enumerate(segment.tube.grid()):
            if segment.covers(x):
                with mp.workprec(ORACLE_PRECISION):
                    exact = 1 / (1 - x)
                if not segment.tube.nodes[j][0].contains(exact):
                    missed += 1
    report.add("glued tube holds 1/(1 - x)", missed == 0, missed)

    state = extend(instance({"expr": "1"}, 0, (0,)), rounds, cfg)
    margins = step_lower_bound_check(state)
    smallest = min((entry[side] for entry in margins for side in ("left", "right") if side in entry), default=None)
    report.add("y' = 1: step lower bound margins positive", smallest is not None and smallest > 0, smallest)
    return report


def run_suite(name, cfg: SolveConfig = None, samples=100_000):
    cfg = cfg or SolveConfig()
    if name not in SUITES:
        raise UsageError(f"unknown suite {name!r}, choose from {', '.join(SUITES)}")
    logger.info(f"Running verify suite {name}")
    if name == "interval":
        return interval_suite(samples)
    if name == "closed-forms":
        return closed_forms_suite(cfg)
    if name == "funnel":
        return funnel_suite(cfg)
    if name == "decode":
        return decode_suite(cfg)
    return extension_suite(cfg)
