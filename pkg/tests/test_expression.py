import random
from fractions import Fraction

import pytest
from mpmath import mp

from ivp2Tube.errors import DimensionError, ExprSyntaxError, SchemaError
from ivp2Tube.interval.core import IBox, Interval, scalar
from ivp2Tube.rhs import dynamic_rhs_init, eval_box, parse
from ivp2Tube.rhs.expression import Binary, Const, Neg, Var, to_text


def test_precedence_and_associativity():
    rhs = parse("1 - 2 - 3 * x", 1)
    tree = rhs.components[0]
    assert tree == Binary("sub", Binary("sub", Const("1"), Const("2")), Binary("mul", Const("3"), Var("x")))


def test_unary_minus_binds_tighter_than_product():
    tree = parse("-y1*2", 1).components[0]
    assert tree == Binary("mul", Neg(Var("y", 1)), Const("2"))


def test_round_trip_through_text():
    text = "9*x*(1 - x)*scbrt(y1) - (y2 - min(abs(y1), 0.5)); -(y1 - y2) * max(x, 2)"
    rhs = parse(text, 2)
    assert parse(rhs.to_text(), 2) == rhs
    assert to_text(Binary("sub", Const("1"), Binary("sub", Const("2"), Const("3")))) == "1 - (2 - 3)"


def test_point_evaluation_contains_value():
    rhs = parse("9*x*(1-x)*scbrt(y1)", 1)
    value = eval_box(rhs, IBox.point((Fraction(1, 2), 8)))[0]
    assert value.contains(mp.mpf(9) / 4 * 2)


def test_box_evaluation_is_an_enclosure():
    rhs = parse("y1*y1 - x", 1)
    box = IBox((Interval.of(0, 1), Interval.of(-1, 2)))
    value = rhs.eval_box(box)[0]
    for x in (0, Fraction(1, 2), 1):
        for y in (-1, 0, Fraction(3, 2), 2):
            assert value.contains(scalar(y) ** 2 - scalar(x))


def test_box_evaluation_is_isotone():
    rhs = parse("9*x*(1 - x)*scbrt(y1) - min(abs(y1), x) + max(x, y1) * -2 + y1*y1", 1)
    rng = random.Random(3)
    for _ in range(500):
        outer = []
        inner = []
        for _ in range(2):
            lo, hi = sorted(Fraction(rng.randint(-4096, 4096), 1024) for _ in range(2))
            a, b = sorted(lo + (hi - lo) * Fraction(rng.randint(0, 64), 64) for _ in range(2))
            outer.append(Interval.of(lo, hi))
            inner.append(Interval.of(a, b))
        assert rhs.eval_box(IBox(tuple(outer)))[0].contains(rhs.eval_box(IBox(tuple(inner)))[0])


def test_vector_rhs():
    rhs = parse("y2; -y1", 2)
    value = rhs.eval_box(IBox.point((0, 1, 3)))
    assert value[0] == Interval.of(3) and value[1] == Interval.of(-1)


@pytest.mark.parametrize("text, position", [
    ("y1 +", 4),
    ("2 * (x", 6),
    ("x $ 1", 2),
    ("sin(x)", 0),
    ("min(x)", 0),
    ("x y1", 2),
])
def test_syntax_errors_carry_position(text, position):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text, 1)
    assert info.value.position == position
    assert info.value.exit_code == 3


def test_dimension_errors():
    with pytest.raises(DimensionError):
        parse("y2", 1)
    with pytest.raises(DimensionError):
        parse("y1", 2)
    with pytest.raises(DimensionError):
        parse("x", 1).eval_box(IBox.point((0, 1, 2)))


def test_dynamic_init_picks_the_kind():
    assert dynamic_rhs_init({"expr": "y1"}, 1) == parse("y1", 1)
    assert dynamic_rhs_init({"gadget": {"stream": [0]}}, 1).kind == "single"
    with pytest.raises(SchemaError):
        dynamic_rhs_init({"polynomial": [1, 2]}, 1)
    with pytest.raises(SchemaError):
        dynamic_rhs_init({"expr": 3}, 1)
