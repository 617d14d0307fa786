from dataclasses import replace
from fractions import Fraction

import pytest
from mpmath import mp

from ivp2Tube.errors import CellUnavailable
from ivp2Tube.interval.core import IBox, Interval, scalar
from ivp2Tube.rhs.gadget import BitStream, ParallelGadget, SingleGadget
from ivp2Tube.utils.decoder import Coverage, decode_bit, decode_llpo
from ivp2Tube.utils.extender import extend
from ivp2Tube.utils.solver import Branch, SolveResult, enclose_all
from ivp2Tube.utils.tube import InclusionVerdict, Tube, evaluate_solutions


def flat_tube(a, b, values, anchor=0):
    nodes = tuple(IBox((Interval.of(lo, hi),)) for lo, hi in values)
    depth = (len(nodes) - 1).bit_length() - 1
    return Tube(scalar(a), scalar(b), depth, nodes, mp.one, anchor, nodes[anchor])


SINGLE = SingleGadget(BitStream((0,)))


def test_inside_tube_certifies_the_single_gadget():
    tube = flat_tube(1, 3, [(0, 0), (-3, -2), (-3, -2)])
    report = decode_bit(Coverage(inside=[("root", tube)]), SINGLE, 0)
    assert (report.bit, report.certified, report.witness) == (1, True, "root")
    assert report.to_dict()["sample_point"] == "2"


def test_overlapping_thresholds_prefer_zero():
    tube = flat_tube(1, 3, [(0, 0), (Fraction(-1, 2), Fraction(1, 2)), (0, 0)])
    assert decode_bit(Coverage(inside=[("t", tube)]), SINGLE, 0).bit == 0


def test_union_group_certifies_when_every_member_agrees():
    low = flat_tube(1, 3, [(0, 0), (-3, -2), (0, 0)])
    high = flat_tube(1, 3, [(0, 0), (Fraction(1, 2), Fraction(3, 4)), (0, 0)])
    report = decode_bit(Coverage(groups=[[("a", low), ("b", high)]]), SINGLE, 0)
    assert (report.bit, report.certified, report.witness) == (1, True, "union")


def test_disagreeing_union_falls_back_to_the_heuristic():
    low = flat_tube(1, 3, [(0, 0), (-3, -2), (0, 0)])
    high = flat_tube(1, 3, [(0, 0), (2, 3), (0, 0)])
    report = decode_bit(Coverage(groups=[[("a", low), ("b", high)]]), SINGLE, 0)
    assert (report.bit, report.certified, report.witness) == (0, False, None)


def test_parallel_cell_thresholds():
    gadget = ParallelGadget([BitStream((0,)), BitStream((1,))], 5)
    scale = Fraction(1, 2 ** 10)
    values = [(0, 0), (-3 * scale, -2 * scale), (0, 0), (0, 0), (0, 0)]
    tube = flat_tube(Fraction(-1, 4), 0, values, anchor=4)
    report = decode_bit(Coverage(inside=[("t", tube)]), gadget, 1)
    assert (report.bit, report.certified, report.cell) == (1, True, 2)
    assert report.sample_point == scalar(Fraction(-3, 16))


def test_missing_cell():
    gadget = ParallelGadget([BitStream((0,)), BitStream((1,))], 5)
    tube = flat_tube(Fraction(-1, 32), 0, [(0, 0), (0, 0), (0, 0)], anchor=2)
    coverage = Coverage(inside=[("t", tube)])
    with pytest.raises(CellUnavailable) as info:
        decode_bit(coverage, gadget, 0)
    assert info.value.exit_code == 4
    report = decode_llpo(coverage, gadget, [1, 0], strict=False)
    assert list(report) == [0, 1]
    assert report[0].bit is None and not report[0].certified


def test_coverage_from_solve_result():
    inside = flat_tube(1, 3, [(0, 0), (-3, -2), (0, 0)])
    unknown = flat_tube(1, 3, [(0, 0), (2, 3), (0, 0)])
    result = SolveResult(None, [Branch(inside, InclusionVerdict.INSIDE, ("1.0L",))],
                         [Branch(unknown, InclusionVerdict.UNKNOWN, ("1.0R",))])
    coverage = Coverage.from_solve_result(result)
    assert [name for name, _ in coverage.inside] == ["1.0L"]
    assert [name for name, _ in coverage.groups[0]] == ["1.0L", "1.0R"]
    assert decode_bit(coverage, SINGLE, 0).witness == "1.0L"


@pytest.fixture
def strip_cell():
    return {"balls": [{"center": ["0", "0"], "radius": "1"}]}


def test_solved_parallel_gadget_certifies_forced_bits(make_instance, small_config, strip_cell):
    streams = [[0], [2, 1], [2, 2]]
    inst = make_instance({"gadget": {"streams": streams, "cell_budget": 8}}, domain=strip_cell)
    cfg = replace(small_config, grid_depth=10, refine_rounds=6, max_bisections=0)
    result = enclose_all(inst, (inst.x0, inst.y0), cfg)
    reports = decode_llpo(Coverage.from_solve_result(result), inst.rhs, range(3), strict=False)
    for index in (0, 1):
        assert reports[index].certified
        assert reports[index].bit in BitStream(streams[index]).llpo()
    if reports[2].certified:
        assert reports[2].bit in (0, 1)


def test_parallel_cell_agrees_with_the_single_gadget(make_instance, small_config, strip_cell):
    """The sign a parallel solve shows in cell m is the sign the single gadget reaches at x = 2."""
    streams = [[0], [2, 1]]
    parallel = make_instance({"gadget": {"streams": streams, "cell_budget": 8}}, domain=strip_cell)
    cfg = replace(small_config, grid_depth=10, refine_rounds=6, max_bisections=0)
    coverage = Coverage.from_solve_result(enclose_all(parallel, (parallel.x0, parallel.y0), cfg))
    for index, entries in enumerate(streams):
        single = make_instance({"gadget": {"stream": entries}})
        state = extend(single, 40, replace(cfg, grid_depth=5))
        expected = decode_bit(Coverage.from_extension(state.glued()), single.rhs, 0)
        found = decode_bit(coverage, parallel.rhs, index)
        assert expected.certified and found.certified
        assert found.bit == expected.bit
        value = evaluate_solutions(coverage.groups[0][0][1], parallel.rhs, found.sample_point)[0]
        scaled = value.scale2(2 * (found.cell + 3))
        assert scaled.lo > -1 if found.bit == 0 else scaled.hi < 1
