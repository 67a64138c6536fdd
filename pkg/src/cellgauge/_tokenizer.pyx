# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled formula scanner.

Transliteration of ``_tokenizer_py``; must emit identical tokens and raise
identical errors for every input (property-tested in the suite).
"""

from .tokens import ERROR_LITERALS, MAX_COL, MAX_ROW, LexError, Token, TokenKind

cdef object K_NUMBER = TokenKind.NUMBER
cdef object K_STRING = TokenKind.STRING
cdef object K_BOOLEAN = TokenKind.BOOLEAN
cdef object K_ERROR = TokenKind.ERROR_LITERAL
cdef object K_IDENT = TokenKind.IDENTIFIER
cdef object K_CELL = TokenKind.CELL_REF
cdef object K_OP = TokenKind.OPERATOR
cdef object K_LPAREN = TokenKind.LPAREN
cdef object K_RPAREN = TokenKind.RPAREN
cdef object K_COMMA = TokenKind.COMMA
cdef object K_COLON = TokenKind.COLON
cdef object K_BANG = TokenKind.EXCLAMATION

cdef tuple _ERR_LITS = tuple(ERROR_LITERALS)
cdef long _MAX_COL = MAX_COL
cdef long _MAX_ROW = MAX_ROW


cdef inline bint _is_digit(Py_UCS4 c):
    return u"0" <= c <= u"9"


cdef inline bint _is_alpha(Py_UCS4 c):
    return (u"A" <= c <= u"Z") or (u"a" <= c <= u"z")


cdef inline bint _is_name_char(Py_UCS4 c):
    if _is_alpha(c) or _is_digit(c):
        return True
    if c == u"_" or c == u"." or c == u"\\" or c == u"$":
        return True
    return c > 127


def classify_name(str lexeme):
    """Decide cellRef / boolean / identifier for a name-shaped lexeme."""
    cdef Py_ssize_t n = len(lexeme)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t letters_start, letters_end, digits_start, nletters, j
    cdef long col
    cdef Py_UCS4 ch
    if i < n and lexeme[i] == u"$":
        i += 1
    letters_start = i
    while i < n and _is_alpha(lexeme[i]):
        i += 1
    nletters = i - letters_start
    if 1 <= nletters <= 3:
        letters_end = i
        if i < n and lexeme[i] == u"$":
            i += 1
        digits_start = i
        while i < n and _is_digit(lexeme[i]):
            i += 1
        if i == n and i > digits_start and lexeme[digits_start] != u"0":
            col = 0
            for j in range(letters_start, letters_end):
                ch = lexeme[j]
                if ch >= u"a":
                    col = col * 26 + (<long> ch - 96)
                else:
                    col = col * 26 + (<long> ch - 64)
            if col <= _MAX_COL and int(lexeme[digits_start:]) <= _MAX_ROW:
                return K_CELL
    if lexeme.upper() in (u"TRUE", u"FALSE"):
        return K_BOOLEAN
    return K_IDENT


def scan(str text):
    """Scan a formula body into tokens (see the pure backend for the contract)."""
    cdef list tokens = []
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t start, j, end
    cdef Py_UCS4 c
    cdef str lexeme, upper
    while i < n:
        c = text[i]
        if c == u" " or c == u"\t" or c == u"\r" or c == u"\n":
            i += 1
            continue
        start = i
        if c == u'"':
            i += 1
            while True:
                if i >= n:
                    raise LexError("unterminated string", start)
                if text[i] == u'"':
                    if i + 1 < n and text[i + 1] == u'"':
                        i += 2
                        continue
                    i += 1
                    break
                i += 1
            tokens.append(Token(K_STRING, text[start:i], start, i))
        elif c == u"'":
            i += 1
            while True:
                if i >= n:
                    raise LexError("unterminated sheet name quote", start)
                if text[i] == u"'":
                    if i + 1 < n and text[i + 1] == u"'":
                        i += 2
                        continue
                    i += 1
                    break
                i += 1
            tokens.append(Token(K_IDENT, text[start:i], start, i))
        elif c == u"[":
            i += 1
            while i < n and text[i] != u"]":
                i += 1
            if i >= n:
                raise LexError("unterminated external reference bracket", start)
            i += 1
            while i < n and _is_name_char(text[i]):
                i += 1
            tokens.append(Token(K_IDENT, text[start:i], start, i))
        elif c == u"#":
            upper = text[i : i + 8].upper()
            matched = False
            for lit in _ERR_LITS:
                if upper.startswith(lit):
                    end = i + len(<str> lit)
                    tokens.append(Token(K_ERROR, text[start:end], start, end))
                    i = end
                    matched = True
                    break
            if not matched:
                raise LexError("illegal character '#'", start)
        elif _is_digit(c) or (c == u"." and i + 1 < n and _is_digit(text[i + 1])):
            while i < n and _is_digit(text[i]):
                i += 1
            if i < n and text[i] == u".":
                i += 1
                while i < n and _is_digit(text[i]):
                    i += 1
            if i < n and (text[i] == u"e" or text[i] == u"E"):
                j = i + 1
                if j < n and (text[j] == u"+" or text[j] == u"-"):
                    j += 1
                if j < n and _is_digit(text[j]):
                    i = j
                    while i < n and _is_digit(text[i]):
                        i += 1
            tokens.append(Token(K_NUMBER, text[start:i], start, i))
        elif c == u"$" and i + 1 < n and _is_digit(text[i + 1]):
            i += 1
            while i < n and _is_digit(text[i]):
                i += 1
            tokens.append(Token(K_NUMBER, text[start:i], start, i))
        elif _is_name_char(c):
            while i < n and _is_name_char(text[i]):
                i += 1
            lexeme = text[start:i]
            if lexeme == u"$":
                raise LexError("illegal character '$'", start)
            tokens.append(Token(classify_name(lexeme), lexeme, start, i))
        elif c == u"<":
            if i + 1 < n and (text[i + 1] == u"=" or text[i + 1] == u">"):
                i += 2
            else:
                i += 1
            tokens.append(Token(K_OP, text[start:i], start, i))
        elif c == u">":
            if i + 1 < n and text[i + 1] == u"=":
                i += 2
            else:
                i += 1
            tokens.append(Token(K_OP, text[start:i], start, i))
        elif c == u"+" or c == u"-" or c == u"*" or c == u"/" or c == u"^" or c == u"&" or c == u"%" or c == u"=":
            i += 1
            tokens.append(Token(K_OP, text[start:i], start, i))
        elif c == u"(":
            i += 1
            tokens.append(Token(K_LPAREN, text[start:i], start, i))
        elif c == u")":
            i += 1
            tokens.append(Token(K_RPAREN, text[start:i], start, i))
        elif c == u",":
            i += 1
            tokens.append(Token(K_COMMA, text[start:i], start, i))
        elif c == u":":
            i += 1
            tokens.append(Token(K_COLON, text[start:i], start, i))
        elif c == u"!":
            i += 1
            tokens.append(Token(K_BANG, text[start:i], start, i))
        else:
            raise LexError(f"illegal character {chr(c)!r}", start)
    return tokens
