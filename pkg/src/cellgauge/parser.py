"""Recursive-descent formula parser.

Precedence, loosest to tightest: comparisons; & ; + - ; * / ; ^ ; postfix % ;
unary +- ; range colon and parentheses. All binary operators associate left,
including ^. Unary minus binds tighter than ^, so -2^2 parses as (-2)^2.
"""

from __future__ import annotations

from .expressions import (
    CellLocator,
    Constant,
    Expr,
    Function,
    OpKind,
    Operator,
    Parenthesis,
    Range,
    Reference,
    ValueType,
    column_letter_to_index,
    tree_depth,
)
from .lexer import tokenize
from .model import Formula
from .tokens import (
    MAX_COL,
    MAX_ROW,
    FormulaError,
    Token,
    TokenKind,
)

# Depth bound for accepted trees. Structural equality and serialization walk
# trees recursively at a few Python frames per level, so this must sit well
# under the interpreter recursion limit; spreadsheet software itself allows
# far less nesting than this.
MAX_NESTING = 200


class ParseError(FormulaError):
    def __init__(self, message: str, position: int, expected: frozenset[str] = frozenset()):
        super().__init__(message, position)
        self.expected = frozenset(expected)


_COMPARISON_OPS = {
    "=": OpKind.EQ,
    "<>": OpKind.NEQ,
    "<": OpKind.LT,
    ">": OpKind.GT,
    "<=": OpKind.LE,
    ">=": OpKind.GE,
}
_ADDITIVE_OPS = {"+": OpKind.ADD, "-": OpKind.SUB}
_MULTIPLICATIVE_OPS = {"*": OpKind.MUL, "/": OpKind.DIV}


def _column_lexeme(lexeme: str) -> tuple[int, bool] | None:
    """(column, absolute) for a full-column locator lexeme like B or $B."""
    absolute = lexeme.startswith("$")
    letters = lexeme[1:] if absolute else lexeme
    if not letters or not all("A" <= c <= "Z" or "a" <= c <= "z" for c in letters):
        return None
    value = column_letter_to_index(letters)
    if value > MAX_COL:
        return None
    return value, absolute


def _row_lexeme(lexeme: str) -> tuple[int, bool] | None:
    """(row, absolute) for a full-row locator lexeme like 3 or $3."""
    absolute = lexeme.startswith("$")
    digits = lexeme[1:] if absolute else lexeme
    if not digits.isascii() or not digits.isdigit() or digits[0] == "0":
        return None
    value = int(digits)
    if value > MAX_ROW:
        return None
    return value, absolute


def _cellref_locator(lexeme: str) -> CellLocator:
    """Locator for a CELL_REF token ($?letters$?digits, pre-validated by the scanner)."""
    i = 0
    col_abs = lexeme[0] == "$"
    if col_abs:
        i = 1
    start = i
    while "A" <= lexeme[i].upper() <= "Z":
        i += 1
    col = column_letter_to_index(lexeme[start:i])
    row_abs = lexeme[i] == "$"
    if row_abs:
        i += 1
    return CellLocator(row=int(lexeme[i:]), col=col, row_abs=row_abs, col_abs=col_abs)


def _unquote_sheet(lexeme: str) -> str:
    if lexeme.startswith("'") and lexeme.endswith("'") and len(lexeme) >= 2:
        return lexeme[1:-1].replace("''", "'")
    return lexeme


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0
        self.end_offset = tokens[-1].end if tokens else 0

    def peek(self, ahead: int = 0) -> Token | None:
        i = self.pos + ahead
        return self.tokens[i] if i < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message: str, position: int | None = None, expected=()) -> ParseError:
        if position is None:
            tok = self.peek()
            position = tok.start if tok else self.end_offset
        return ParseError(message, position, frozenset(expected))

    def expect(self, kind: TokenKind, what: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind != kind:
            raise self.fail(f"expected {what}", expected={what})
        return self.advance()

    # --- precedence ladder ---------------------------------------------

    def expression(self) -> Expr:
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.fail("formula too deeply nested")
        try:
            node = self.concat()
            while True:
                tok = self.peek()
                if tok is None or tok.kind != TokenKind.OPERATOR:
                    return node
                kind = _COMPARISON_OPS.get(tok.lexeme)
                if kind is None:
                    return node
                self.advance()
                node = Operator(kind, (node, self.concat()))
        finally:
            self.depth -= 1

    def concat(self) -> Expr:
        node = self.additive()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.OPERATOR or tok.lexeme != "&":
                return node
            self.advance()
            node = Operator(OpKind.CONCAT, (node, self.additive()))

    def additive(self) -> Expr:
        node = self.multiplicative()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.OPERATOR:
                return node
            kind = _ADDITIVE_OPS.get(tok.lexeme)
            if kind is None:
                return node
            self.advance()
            node = Operator(kind, (node, self.multiplicative()))

    def multiplicative(self) -> Expr:
        node = self.exponent()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.OPERATOR:
                return node
            kind = _MULTIPLICATIVE_OPS.get(tok.lexeme)
            if kind is None:
                return node
            self.advance()
            node = Operator(kind, (node, self.exponent()))

    def exponent(self) -> Expr:
        node = self.postfix()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.OPERATOR or tok.lexeme != "^":
                return node
            self.advance()
            node = Operator(OpKind.POW, (node, self.postfix()))

    def postfix(self) -> Expr:
        node = self.unary()
        while True:
            tok = self.peek()
            if tok is None or tok.kind != TokenKind.OPERATOR or tok.lexeme != "%":
                return node
            self.advance()
            node = Operator(OpKind.PERCENT, (node,))

    def unary(self) -> Expr:
        tok = self.peek()
        if tok is not None and tok.kind == TokenKind.OPERATOR and tok.lexeme in ("+", "-"):
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.fail("formula too deeply nested")
            try:
                self.advance()
                kind = OpKind.UNARY_MINUS if tok.lexeme == "-" else OpKind.UNARY_PLUS
                return Operator(kind, (self.unary(),))
            finally:
                self.depth -= 1
        return self.primary()

    # --- primaries ------------------------------------------------------

    def primary(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected expression", expected={"expression"})
        kind = tok.kind
        if kind == TokenKind.NUMBER:
            return self._number(tok)
        if kind == TokenKind.STRING:
            self.advance()
            return Constant(ValueType.TEXT, tok.lexeme)
        if kind == TokenKind.BOOLEAN:
            nxt = self.peek(1)
            if nxt is not None and nxt.kind == TokenKind.LPAREN:
                return self._function_call(tok)
            self.advance()
            return Constant(ValueType.BOOLEAN, tok.lexeme)
        if kind == TokenKind.ERROR_LITERAL:
            self.advance()
            if tok.lexeme.upper() == "#REF!":
                return Reference(ref_error=True)
            return Constant(ValueType.ERROR, tok.lexeme)
        if kind in (TokenKind.IDENTIFIER, TokenKind.CELL_REF):
            return self._reference_or_call(tok)
        if kind == TokenKind.LPAREN:
            self.depth += 1
            if self.depth > MAX_NESTING:
                raise self.fail("formula too deeply nested")
            try:
                self.advance()
                inner = self.expression()
            finally:
                self.depth -= 1
            closing = self.peek()
            if closing is None or closing.kind != TokenKind.RPAREN:
                raise self.fail("unbalanced parentheses: expected ')'", tok.start, {")"})
            self.advance()
            return Parenthesis(inner)
        raise self.fail(f"unexpected {tok.lexeme!r}", tok.start, {"expression"})

    def _number(self, tok: Token) -> Expr:
        nxt = self.peek(1)
        row = _row_lexeme(tok.lexeme)
        if row is not None and nxt is not None and nxt.kind == TokenKind.COLON:
            end_tok = self.peek(2)
            end_row = _row_lexeme(end_tok.lexeme) if end_tok is not None and end_tok.kind == TokenKind.NUMBER else None
            if end_row is not None:
                self.advance()
                self.advance()
                self.advance()
                return Range(
                    CellLocator(row=row[0], col=None, row_abs=row[1]),
                    CellLocator(row=end_row[0], col=None, row_abs=end_row[1]),
                )
        if tok.lexeme.startswith("$"):
            raise self.fail("absolute row locator outside a range", tok.start)
        self.advance()
        return Constant(ValueType.NUMBER, tok.lexeme)

    def _function_call(self, name_tok: Token) -> Expr:
        lexeme = name_tok.lexeme
        if lexeme.startswith("'") or "[" in lexeme or "$" in lexeme:
            raise self.fail(f"illegal function name {lexeme!r}", name_tok.start)
        self.advance()  # name
        self.advance()  # (
        args: list[Expr] = []
        closing = self.peek()
        if closing is not None and closing.kind == TokenKind.RPAREN:
            self.advance()
            return Function(lexeme.upper(), ())
        while True:
            nxt = self.peek()
            if nxt is not None and nxt.kind in (TokenKind.COMMA, TokenKind.RPAREN):
                raise self.fail("empty function argument")
            args.append(self.expression())
            nxt = self.peek()
            if nxt is None:
                raise self.fail("unbalanced parentheses: expected ',' or ')'", expected={",", ")"})
            if nxt.kind == TokenKind.COMMA:
                self.advance()
                continue
            if nxt.kind == TokenKind.RPAREN:
                self.advance()
                return Function(lexeme.upper(), tuple(args))
            raise self.fail(f"expected ',' or ')' in argument list, got {nxt.lexeme!r}", nxt.start, {",", ")"})

    def _reference_or_call(self, tok: Token) -> Expr:
        nxt = self.peek(1)
        if nxt is not None and nxt.kind == TokenKind.LPAREN:
            return self._function_call(tok)
        if nxt is not None and nxt.kind == TokenKind.EXCLAMATION:
            sheet = _unquote_sheet(tok.lexeme)
            external = "[" in sheet
            self.advance()  # sheet
            self.advance()  # !
            return self._sheet_suffix(sheet, external)
        if tok.kind == TokenKind.CELL_REF:
            self.advance()
            loc = _cellref_locator(tok.lexeme)
            after = self.peek()
            if after is not None and after.kind == TokenKind.COLON:
                end_tok = self.peek(1)
                if end_tok is None or end_tok.kind != TokenKind.CELL_REF:
                    raise self.fail("expected cell reference after ':'", expected={"cell reference"})
                self.advance()
                self.advance()
                return Range(loc, _cellref_locator(end_tok.lexeme))
            return Reference(locator=loc)
        # Plain identifier: full-column range or a defined-name reference.
        lexeme = tok.lexeme
        col = _column_lexeme(lexeme)
        if col is not None and nxt is not None and nxt.kind == TokenKind.COLON:
            end_tok = self.peek(2)
            end_col = (
                _column_lexeme(end_tok.lexeme)
                if end_tok is not None and end_tok.kind == TokenKind.IDENTIFIER
                else None
            )
            if end_col is not None:
                self.advance()
                self.advance()
                self.advance()
                return Range(
                    CellLocator(row=None, col=col[0], col_abs=col[1]),
                    CellLocator(row=None, col=end_col[0], col_abs=end_col[1]),
                )
        if lexeme.startswith("'") or "[" in lexeme:
            raise self.fail("sheet name must be followed by '!'", tok.start, {"!"})
        if "$" in lexeme:
            raise self.fail(f"'$' not allowed in a name: {lexeme!r}", tok.start)
        self.advance()
        return Reference(name=lexeme)

    def _sheet_suffix(self, sheet: str, external: bool) -> Expr:
        tok = self.peek()
        if tok is None:
            raise self.fail("expected reference after '!'", expected={"reference"})
        if tok.kind == TokenKind.CELL_REF:
            self.advance()
            loc = _cellref_locator(tok.lexeme)
            after = self.peek()
            if after is not None and after.kind == TokenKind.COLON:
                end_tok = self.peek(1)
                if end_tok is None or end_tok.kind != TokenKind.CELL_REF:
                    raise self.fail("expected cell reference after ':'", expected={"cell reference"})
                self.advance()
                self.advance()
                return Range(loc, _cellref_locator(end_tok.lexeme), sheet=sheet, external=external)
            return Reference(sheet=sheet, locator=loc, external=external)
        if tok.kind == TokenKind.NUMBER:
            row = _row_lexeme(tok.lexeme)
            nxt = self.peek(1)
            end_tok = self.peek(2)
            if (
                row is not None
                and nxt is not None
                and nxt.kind == TokenKind.COLON
                and end_tok is not None
                and end_tok.kind == TokenKind.NUMBER
            ):
                end_row = _row_lexeme(end_tok.lexeme)
                if end_row is not None:
                    self.advance()
                    self.advance()
                    self.advance()
                    return Range(
                        CellLocator(row=row[0], col=None, row_abs=row[1]),
                        CellLocator(row=end_row[0], col=None, row_abs=end_row[1]),
                        sheet=sheet,
                        external=external,
                    )
            raise self.fail("expected reference after '!'", tok.start, {"reference"})
        if tok.kind == TokenKind.IDENTIFIER:
            col = _column_lexeme(tok.lexeme)
            nxt = self.peek(1)
            if col is not None and nxt is not None and nxt.kind == TokenKind.COLON:
                end_tok = self.peek(2)
                end_col = (
                    _column_lexeme(end_tok.lexeme)
                    if end_tok is not None and end_tok.kind == TokenKind.IDENTIFIER
                    else None
                )
                if end_col is not None:
                    self.advance()
                    self.advance()
                    self.advance()
                    return Range(
                        CellLocator(row=None, col=col[0], col_abs=col[1]),
                        CellLocator(row=None, col=end_col[0], col_abs=end_col[1]),
                        sheet=sheet,
                        external=external,
                    )
            lexeme = tok.lexeme
            if lexeme.startswith("'") or "[" in lexeme or "$" in lexeme:
                raise self.fail(f"illegal name after '!': {lexeme!r}", tok.start)
            self.advance()
            return Reference(sheet=sheet, name=lexeme, external=external)
        if tok.kind == TokenKind.ERROR_LITERAL and tok.lexeme.upper() == "#REF!":
            self.advance()
            return Reference(sheet=sheet, ref_error=True, external=external)
        raise self.fail("expected reference after '!'", tok.start, {"reference"})


def parse(tokens: list[Token]) -> Expr:
    """Parse a token list into an expression tree; raises ParseError."""
    parser = _Parser(tokens)
    expr = parser.expression()
    leftover = parser.peek()
    if leftover is not None:
        raise parser.fail(f"unexpected {leftover.lexeme!r} after expression", leftover.start)
    # Flat operator chains build depth through loops, not recursion, so the
    # recursion guard cannot see them; bound the finished tree instead. Every
    # accepted tree is then safe for recursive consumers downstream.
    if tree_depth(expr) > MAX_NESTING:
        raise ParseError("formula too deeply nested", tokens[0].start if tokens else 0)
    return expr


def parse_text(formula_text: str) -> Expr:
    """Tokenize and parse a formula body; raises LexError or ParseError."""
    return parse(tokenize(formula_text))


def parse_formula(formula_text: str) -> Formula:
    """Total wrapper: failures are captured on the Formula, never raised."""
    try:
        return Formula(text=formula_text, expr=parse_text(formula_text))
    except FormulaError as exc:
        return Formula(text=formula_text, expr=None, error=str(exc))
    except RecursionError:
        return Formula(text=formula_text, expr=None, error="formula too deeply nested")
