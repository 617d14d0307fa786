"""Right-hand sides written in the small expression language.

Grammar (components separated by ';')::

    rhs    := expr (';' expr)*
    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | atom
    atom   := NUMBER | 'x' | 'y'INDEX | CALL '(' expr (',' expr)* ')' | '(' expr ')'
    CALL   := 'abs' | 'min' | 'max' | 'scbrt'
"""
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple

from ivp2Tube.errors import DimensionError, ExprSyntaxError, SchemaError
from ivp2Tube.interval.core import IBox, Interval
from ivp2Tube.rhs.right_hand_side import RightHandSide

_TOKEN = re.compile(r"\s*(?:(?P<number>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
                    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*(),;]))")

_ARITY = {"abs": 1, "scbrt": 1, "min": 2, "max": 2}
_PRECEDENCE = {"add": 1, "sub": 1, "mul": 2}
_SYMBOL = {"add": "+", "sub": "-", "mul": "*"}


@dataclass(frozen=True)
class Const:
    text: str

    @property
    def value(self):
        return Fraction(self.text)


@dataclass(frozen=True)
class Var:
    name: str
    index: int = 0


@dataclass(frozen=True)
class Neg:
    child: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    fn: str
    args: Tuple[object, ...]


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        match = _TOKEN.match(text, pos)
        if not match:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(bad, f"unexpected character {text[bad]!r}")
        kind = match.lastgroup
        tokens.append((kind, match.group(kind), match.start(kind)))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, dimension):
        self.tokens = _tokenize(text)
        self.index = 0
        self.dimension = dimension

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.tokens[self.index]
        self.index += 1
        return token

    def expect(self, symbol):
        kind, text, pos = self.current
        if text != symbol or kind != "op":
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(pos, f"expected {symbol!r}, found {found}")
        return self.advance()

    def components(self):
        parts = [self.expr()]
        while self.current[1] == ";":
            self.advance()
            parts.append(self.expr())
        kind, text, pos = self.current
        if kind != "end":
            raise ExprSyntaxError(pos, f"unexpected {text!r}")
        return parts

    def expr(self):
        node = self.term()
        while self.current[0] == "op" and self.current[1] in "+-":
            op = "add" if self.advance()[1] == "+" else "sub"
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.current[0] == "op" and self.current[1] == "*":
            self.advance()
            node = Binary("mul", node, self.unary())
        return node

    def unary(self):
        if self.current[0] == "op" and self.current[1] == "-":
            self.advance()
            return Neg(self.unary())
        return self.atom()

    def atom(self):
        kind, text, pos = self.advance()
        if kind == "number":
            return Const(text)
        if kind == "op" and text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "name":
            if text in _ARITY:
                return self.call(text, pos)
            if text == "x":
                return Var("x")
            match = re.fullmatch(r"y([1-9]\d*)", text)
            if match:
                index = int(match.group(1))
                if index > self.dimension:
                    raise DimensionError(f"position {pos}: {text} exceeds dimension {self.dimension}")
                return Var("y", index)
            raise ExprSyntaxError(pos, f"unknown identifier {text!r}")
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(pos, f"unexpected {found}")

    def call(self, name, pos):
        self.expect("(")
        args = [self.expr()]
        while self.current[1] == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        if len(args) != _ARITY[name]:
            raise ExprSyntaxError(pos, f"{name} takes {_ARITY[name]} argument(s), got {len(args)}")
        return Call(name, tuple(args))


def to_text(node, parent=0, right=False):
    """Render an AST so that parsing the text gives back the same tree."""
    if isinstance(node, Const):
        return node.text
    if isinstance(node, Var):
        return "x" if node.name == "x" else f"y{node.index}"
    if isinstance(node, Neg):
        return "-" + to_text(node.child, 3)
    if isinstance(node, Call):
        return f"{node.fn}(" + ", ".join(to_text(a) for a in node.args) + ")"
    level = _PRECEDENCE[node.op]
    text = f"{to_text(node.left, level)} {_SYMBOL[node.op]} {to_text(node.right, level, True)}"
    if level < parent or (right and level == parent):
        return f"({text})"
    return text


_CALLS = {
    "abs": lambda a: abs(a[0]),
    "scbrt": lambda a: a[0].scbrt(),
    "min": lambda a: a[0].minimum(a[1]),
    "max": lambda a: a[0].maximum(a[1]),
}


def eval_expr(node, box: IBox) -> Interval:
    if isinstance(node, Const):
        return Interval.point(node.value)
    if isinstance(node, Var):
        return box[node.index]
    if isinstance(node, Neg):
        return -eval_expr(node.child, box)
    if isinstance(node, Call):
        return _CALLS[node.fn]([eval_expr(a, box) for a in node.args])
    left = eval_expr(node.left, box)
    right = eval_expr(node.right, box)
    if node.op == "add":
        return left + right
    if node.op == "sub":
        return left - right
    return left * right


class RhsDef(RightHandSide):
    """f given as n expressions over x, y1..yn."""

    def __init__(self, dimension, components):
        super().__init__(dimension)
        if len(components) != dimension:
            raise DimensionError(f"expected {dimension} component(s), got {len(components)}")
        self.components = tuple(components)

    def eval_box(self, box):
        self.check_box(box)
        return IBox(tuple(eval_expr(c, box) for c in self.components))

    def to_text(self):
        return "; ".join(to_text(c) for c in self.components)

    def describe(self):
        return {"expr": self.to_text()}

    def __eq__(self, other):
        return isinstance(other, RhsDef) and self.components == other.components

    def __repr__(self):
        return f"RhsDef({self.to_text()!r})"


def parse(text, n) -> RhsDef:
    if n < 1:
        raise DimensionError(f"dimension must be at least 1, got {n}")
    return RhsDef(n, _Parser(text, n).components())


def eval_box(r: RhsDef, b: IBox) -> IBox:
    return r.eval_box(b)


def from_document(text, dimension) -> RhsDef:
    """Right-hand side from the instance-file ``{"expr": ...}`` entry."""
    if not isinstance(text, str):
        raise SchemaError("'expr' must be a string")
    return parse(text, dimension)
