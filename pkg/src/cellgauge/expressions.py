"""Formula AST: node types, canonical serialization, column-letter arithmetic.

Leaves are constants and references/ranges; internal nodes are functions,
operators, and explicit parentheses. Trees are immutable and hashable.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class ValueType(enum.Enum):
    NUMBER = "number"
    TEXT = "text"
    BOOLEAN = "boolean"
    ERROR = "error"


class OpKind(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    POW = "pow"
    CONCAT = "concat"
    EQ = "eq"
    NEQ = "neq"
    LT = "lt"
    GT = "gt"
    LE = "le"
    GE = "ge"
    PERCENT = "percent"
    UNARY_MINUS = "unaryMinus"
    UNARY_PLUS = "unaryPlus"


UNARY_OPS = frozenset({OpKind.PERCENT, OpKind.UNARY_MINUS, OpKind.UNARY_PLUS})

OP_SYMBOL = {
    OpKind.ADD: "+",
    OpKind.SUB: "-",
    OpKind.MUL: "*",
    OpKind.DIV: "/",
    OpKind.POW: "^",
    OpKind.CONCAT: "&",
    OpKind.EQ: "=",
    OpKind.NEQ: "<>",
    OpKind.LT: "<",
    OpKind.GT: ">",
    OpKind.LE: "<=",
    OpKind.GE: ">=",
    OpKind.PERCENT: "%",
    OpKind.UNARY_MINUS: "-",
    OpKind.UNARY_PLUS: "+",
}


class BadColumnError(ValueError):
    pass


def column_letter_to_index(letters: str) -> int:
    """Bijective base-26 column value: "A" -> 1, "Z" -> 26, "AA" -> 27."""
    if not letters:
        raise BadColumnError("empty column string")
    value = 0
    for ch in letters:
        if "a" <= ch <= "z":
            ch = ch.upper()
        if not "A" <= ch <= "Z":
            raise BadColumnError(f"illegal column character {ch!r}")
        value = value * 26 + (ord(ch) - 64)
    return value


def column_index_to_letter(index: int) -> str:
    """Inverse of column_letter_to_index; index must be >= 1."""
    if index < 1:
        raise BadColumnError(f"column index must be >= 1, got {index}")
    out = []
    while index:
        index, rem = divmod(index - 1, 26)
        out.append(chr(65 + rem))
    return "".join(reversed(out))


class Expr:
    """Base class for all AST nodes."""

    __slots__ = ()


@dataclass(frozen=True, slots=True)
class CellLocator:
    """Pre-resolution grid position inside a reference.

    row is None for full-column locators (A:A), col is None for full-row
    locators (1:1); a single-cell locator has both.
    """

    row: int | None
    col: int | None
    row_abs: bool = False
    col_abs: bool = False


@dataclass(frozen=True, slots=True)
class Function(Expr):
    name: str  # stored uppercase
    args: tuple[Expr, ...]


@dataclass(frozen=True, slots=True)
class Operator(Expr):
    kind: OpKind
    operands: tuple[Expr, ...]  # one operand for unary kinds, two otherwise


@dataclass(frozen=True, slots=True)
class Constant(Expr):
    value_type: ValueType
    lexeme: str  # verbatim source text (strings keep their quotes)


@dataclass(frozen=True, slots=True)
class Parenthesis(Expr):
    inner: Expr


@dataclass(frozen=True, slots=True)
class Reference(Expr):
    """Single-cell reference: a grid locator, a defined name, or a #REF! error."""

    sheet: str | None = None
    locator: CellLocator | None = None
    name: str | None = None
    external: bool = False
    ref_error: bool = False

    @property
    def by_name(self) -> bool:
        return self.name is not None


@dataclass(frozen=True, slots=True)
class Range(Expr):
    """Rectangular cell block; endpoints share the optional sheet qualifier."""

    start: CellLocator
    end: CellLocator
    sheet: str | None = None
    external: bool = False


# Quote the sheet prefix unless it scans back as a plain identifier.
def _sheet_needs_quoting(name: str) -> bool:
    if not name:
        return True
    first = name[0]
    if not (first.isalpha() or first == "_"):
        return True
    if name.upper() in ("TRUE", "FALSE"):  # would scan as a boolean constant
        return True
    return any(not (ch.isalnum() or ch in "_.") for ch in name)


def _sheet_prefix(sheet: str | None) -> str:
    if sheet is None:
        return ""
    if _sheet_needs_quoting(sheet):
        return "'" + sheet.replace("'", "''") + "'!"
    return sheet + "!"


def _locator_text(loc: CellLocator) -> str:
    parts = []
    if loc.col is not None:
        if loc.col_abs:
            parts.append("$")
        parts.append(column_index_to_letter(loc.col))
    if loc.row is not None:
        if loc.row_abs:
            parts.append("$")
        parts.append(str(loc.row))
    return "".join(parts)


def _serialize(expr: Expr, wildcard_refs: bool) -> str:
    if isinstance(expr, Constant):
        return expr.lexeme
    if isinstance(expr, Reference):
        if wildcard_refs:
            return "REF"
        if expr.ref_error:
            return _sheet_prefix(expr.sheet) + "#REF!"
        if expr.name is not None:
            return _sheet_prefix(expr.sheet) + expr.name
        assert expr.locator is not None
        return _sheet_prefix(expr.sheet) + _locator_text(expr.locator)
    if isinstance(expr, Range):
        if wildcard_refs:
            return "RANGE"
        return (
            _sheet_prefix(expr.sheet)
            + _locator_text(expr.start)
            + ":"
            + _locator_text(expr.end)
        )
    if isinstance(expr, Parenthesis):
        return "(" + _serialize(expr.inner, wildcard_refs) + ")"
    if isinstance(expr, Function):
        args = ",".join(_serialize(a, wildcard_refs) for a in expr.args)
        return expr.name + "(" + args + ")"
    if isinstance(expr, Operator):
        sym = OP_SYMBOL[expr.kind]
        if expr.kind is OpKind.PERCENT:
            return _serialize(expr.operands[0], wildcard_refs) + sym
        if expr.kind in (OpKind.UNARY_MINUS, OpKind.UNARY_PLUS):
            return sym + _serialize(expr.operands[0], wildcard_refs)
        left, right = expr.operands
        return _serialize(left, wildcard_refs) + sym + _serialize(right, wildcard_refs)
    raise TypeError(f"not an Expr node: {expr!r}")


def serialize(expr: Expr) -> str:
    """Canonical formula text; re-parsing yields a structurally equal tree."""
    return _serialize(expr, wildcard_refs=False)


def reference_wildcard_text(expr: Expr) -> str:
    """Serialization with every Reference as REF and every Range as RANGE.

    Two formulas are copies of each other (same structure, possibly shifted
    references) exactly when these texts are equal.
    """
    return _serialize(expr, wildcard_refs=True)


def walk(expr: Expr):
    """Yield every node of the tree, preorder."""
    stack = [expr]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Function):
            stack.extend(reversed(node.args))
        elif isinstance(node, Operator):
            stack.extend(reversed(node.operands))
        elif isinstance(node, Parenthesis):
            stack.append(node.inner)


def tree_depth(expr: Expr) -> int:
    """Depth of the tree (a lone leaf is 1), computed without recursion so
    left-leaning operator chains of any length are safe."""
    deepest = 0
    stack = [(expr, 1)]
    while stack:
        node, depth = stack.pop()
        if depth > deepest:
            deepest = depth
        if isinstance(node, Function):
            stack.extend((arg, depth + 1) for arg in node.args)
        elif isinstance(node, Operator):
            stack.extend((operand, depth + 1) for operand in node.operands)
        elif isinstance(node, Parenthesis):
            stack.append((node.inner, depth + 1))
    return deepest
