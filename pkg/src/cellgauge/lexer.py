"""Scanner backend selection and the public tokenize() entry point.

The compiled extension is preferred when importable; set
CELLGAUGE_PURE_PYTHON=1 to force the pure-Python scanner.
"""

from __future__ import annotations

import os

from . import _tokenizer_py
from .tokens import LexError, Token, TokenKind  # noqa: F401  (re-exported)

if os.environ.get("CELLGAUGE_PURE_PYTHON"):
    _backend = _tokenizer_py
    BACKEND = "python"
else:
    try:
        from . import _tokenizer as _backend  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _backend = _tokenizer_py
        BACKEND = "python"

_scan = _backend.scan


def tokenize(formula_text: str) -> list[Token]:
    """Tokenize a formula body (leading "=" already stripped by the caller)."""
    return _scan(formula_text)
