from dataclasses import replace
from fractions import Fraction

import pytest
from mpmath import mp

from ivp2Tube.errors import OutOfRange, SchemaError, StepBoundViolation
from ivp2Tube.interval.core import get_precision, to_fraction, working_precision
from ivp2Tube.rhs.gadget import BitStream
from ivp2Tube.utils.decoder import Coverage, decode_bit
from ivp2Tube.utils.extender import (BOUNDARY_REACHED, GROWING, ExtensionState, RoundRecord, Segment, SideStep,
                                     extend, margins_to_dict, step_lower_bound_check)
from ivp2Tube.utils.writers import extension_segments_from_dict, extension_to_dict


def test_zero_rhs_hand_trace(make_instance, small_config):
    records = []
    state = extend(make_instance("0"), 3, small_config, on_round=records.append)
    assert [to_fraction(r.b) for r in records] == [Fraction(3, 8), Fraction(3, 4), Fraction(9, 8)]
    assert [to_fraction(r.a) for r in records] == [Fraction(-3, 8), Fraction(-3, 4), Fraction(-9, 8)]
    assert state.round == 3
    assert state.evaluate(Fraction(1, 1))[0].contains(mp.zero)
    with pytest.raises(OutOfRange):
        state.evaluate(2)


def test_blow_up_stays_below_one(make_instance, small_config):
    state = extend(make_instance("y1*y1", y0=("1",)), 6, small_config)
    bs = [to_fraction(record.b) for record in state.records]
    assert len(bs) == 6
    assert all(b < 1 for b in bs)
    assert all(u < v for u, v in zip(bs, bs[1:]))
    for segment in state.glued():
        for j, x in enumerate(segment.tube.grid()):
            if segment.covers(x):
                with mp.workprec(96):
                    assert segment.tube.nodes[j][0].contains(1 / (1 - x))


def test_constant_slope_meets_the_step_lower_bound(make_instance, small_config):
    state = extend(make_instance("1"), 5, small_config)
    margins = step_lower_bound_check(state)
    assert len(margins) == 5
    assert all(entry[side] > 0 for entry in margins for side in ("left", "right"))
    assert margins_to_dict(margins)[0]["round"] == 1


def test_step_lower_bound_violation():
    bad = SideStep(GROWING, mp.mpf(0.5), mp.one, mp.zero, mp.mpf(0.125))
    state = ExtensionState(mp.zero, mp.zero, mp.mpf(0.125))
    state.records.append(RoundRecord(1, mp.zero, mp.mpf(0.125), SideStep(BOUNDARY_REACHED), bad))
    with pytest.raises(StepBoundViolation) as info:
        step_lower_bound_check(state)
    assert info.value.rounds == [1]


def test_boundary_freezes_a_side(make_instance, unit_ball, small_config):
    state = extend(make_instance("0", domain=unit_ball), 8, replace(small_config, sweep_budget=4))
    assert state.left_status == BOUNDARY_REACHED
    assert state.right_status == BOUNDARY_REACHED
    assert -1 < to_fraction(state.a) and to_fraction(state.b) < 1
    assert state.round == 5


def test_rows_are_glued_in_order(make_instance, small_config):
    state = extend(make_instance("0"), 2, small_config)
    rows = state.rows()
    xs = [Fraction(row[0]) for row in rows[1:]]
    assert rows[0] == ["x", "lo_1", "hi_1"]
    assert xs == sorted(set(xs))
    assert xs[0] == Fraction(-3, 4) and xs[-1] == Fraction(3, 4)


def test_rounds_must_be_positive(make_instance):
    with pytest.raises(ValueError):
        extend(make_instance("0"), 0)


def test_extension_keeps_the_callers_precision(make_instance, small_config):
    with working_precision(80):
        extend(make_instance("0"), 2, replace(small_config, precision=120))
        assert get_precision() == 80


def test_segment_documents(make_instance, small_config):
    state = extend(make_instance("0"), 2, small_config)
    for segment in state.glued():
        again = Segment.from_dict(segment.to_dict())
        assert (again.lo, again.hi) == (segment.lo, segment.hi)
        assert again.tube.nodes == segment.tube.nodes
    with pytest.raises(SchemaError):
        Segment.from_dict({"lo": "0", "tube": {}})


@pytest.fixture
def forcing_config(small_config):
    return replace(small_config, max_bisections=0, refine_rounds=6)


@pytest.mark.parametrize("entries", [[0], [2, 1], [2, 2, 0]])
def test_forced_single_gadget_is_signed_at_two(make_instance, forcing_config, entries):
    inst = make_instance({"gadget": {"stream": entries}})
    state = extend(inst, 40, forcing_config)
    assert to_fraction(state.b) >= 2
    report = decode_bit(Coverage.from_extension(state.glued()), inst.rhs, 0)
    assert report.certified
    assert report.bit in BitStream(entries).llpo()
    assert report.witness.startswith("group-")


def test_extension_document_gives_back_the_segments(make_instance, small_config):
    inst = make_instance("0")
    state = extend(inst, 3, small_config)
    document = extension_to_dict(state, inst, [record.to_dict() for record in state.records])
    segments = extension_segments_from_dict(document)
    assert [(s.lo, s.hi) for s in segments] == [(s.lo, s.hi) for s in state.glued()]
    with pytest.raises(SchemaError):
        extension_segments_from_dict(dict(document, kind="solve_result"))
