from dataclasses import replace
from fractions import Fraction

import pytest
from mpmath import mp

from ivp2Tube.errors import NotInDomain, NotProvenUnique
from ivp2Tube.interval.core import get_precision, scalar, to_fraction, working_precision
from ivp2Tube.rhs.gadget import closed_solution_s
from ivp2Tube.utils.solver import enclose_all, solve_unique
from ivp2Tube.utils.tube import InclusionVerdict
from ivp2Tube.utils.verify_suites import funnel_samples
from ivp2Tube.utils.writers import solve_result_from_dict, solve_result_to_dict


def test_zero_rhs_gives_one_constant_tube(make_instance, unit_ball, small_config):
    inst = make_instance("0", domain=unit_ball)
    result = enclose_all(inst, (inst.x0, inst.y0), small_config)
    assert len(result.confirmed) == 1 and not result.undecided
    assert result.confirmed[0].verdict is InclusionVerdict.INSIDE
    assert result.confirmed[0].name == "root"
    assert all(node[0].lo == 0 == node[0].hi for node in result.confirmed[0].tube.nodes)


def test_exponential_oracle(make_instance, small_config):
    inst = make_instance("y1", y0=("1",))
    tube = solve_unique(inst, (inst.x0, inst.y0), replace(small_config, grid_depth=6))
    with mp.workprec(64):
        assert tube.contains_samples([(mp.exp(x),) for x in tube.grid()])
    assert tube.max_width() <= mp.mpf("0.01")


def test_rotation_in_two_dimensions(make_instance, small_config):
    inst = make_instance("y2; -y1", y0=("1", "0"))
    tube = solve_unique(inst, (inst.x0, inst.y0), small_config)
    with mp.workprec(64):
        assert tube.contains_samples([(mp.cos(x), -mp.sin(x)) for x in tube.grid()])


def test_peano_funnel_is_covered(make_instance, unit_ball, small_config):
    inst = make_instance("9*x*(1-x)*scbrt(y1)", domain=unit_ball)
    result = enclose_all(inst, (inst.x0, inst.y0), small_config)
    tubes = [branch.tube for branch in result.branches]
    assert tubes
    grid = tubes[0].grid()
    for sign in (1, -1):
        for c in (0, Fraction(1, 8)):
            for j, x in enumerate(grid):
                u = to_fraction(x)
                if u <= 0:
                    continue
                value = closed_solution_s(0, sign, c, u)
                assert any(tube.nodes[j][0].contains(value) for tube in tubes)


@pytest.mark.parametrize("budget", [8, 16])
def test_all_two_gadget_funnel_is_covered(make_instance, small_config, budget):
    inst = make_instance({"gadget": {"stream": []}}, x0="1")
    result = enclose_all(inst, (inst.x0, inst.y0), replace(small_config, max_bisections=budget, refine_rounds=10))
    tubes = [branch.tube for branch in result.branches]
    assert tubes
    for sign in (1, -1):
        for c in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), 1):
            for j, (value,) in enumerate(funnel_samples(tubes[0], sign, c)):
                assert any(tube.nodes[j][0].contains(scalar(value)) for tube in tubes)


def test_peano_funnel_is_not_unique(make_instance, unit_ball, small_config):
    inst = make_instance("9*x*(1-x)*scbrt(y1)", domain=unit_ball)
    with pytest.raises(NotProvenUnique) as info:
        solve_unique(inst, (inst.x0, inst.y0),
                     replace(small_config, max_bisections=4, target_width=Fraction(1, 2 ** 20)))
    assert info.value.result is not None


def test_worker_count_does_not_change_the_result(make_instance, unit_ball, small_config):
    inst = make_instance("9*x*(1-x)*scbrt(y1)", domain=unit_ball)
    serial = enclose_all(inst, (inst.x0, inst.y0), replace(small_config, max_bisections=8))
    threaded = enclose_all(inst, (inst.x0, inst.y0), replace(small_config, max_bisections=8, workers=3))
    assert solve_result_to_dict(serial) == solve_result_to_dict(threaded)


def test_solve_result_document_round_trip(make_instance, unit_ball, small_config):
    inst = make_instance("9*x*(1-x)*scbrt(y1)", domain=unit_ball)
    result = enclose_all(inst, (inst.x0, inst.y0), replace(small_config, max_bisections=4))
    document = solve_result_to_dict(result, inst)
    again = solve_result_from_dict(document)
    assert solve_result_to_dict(again, inst) == document
    assert [b.name for b in again.branches] == [b.name for b in result.branches]


def test_outside_the_domain(make_instance, unit_ball, small_config):
    inst = make_instance("0", y0=("1",), domain=unit_ball)
    with pytest.raises(NotInDomain):
        enclose_all(inst, (inst.x0, inst.y0), replace(small_config, sweep_budget=10))


def test_solving_keeps_the_callers_precision(make_instance, small_config):
    inst = make_instance("y1", y0=("1",))
    with working_precision(72):
        enclose_all(inst, (inst.x0, inst.y0), replace(small_config, precision=113))
        assert get_precision() == 72
