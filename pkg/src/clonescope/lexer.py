"""Tokenizer for the supported Solidity subset.

Whitespace and comments are skipped but line/column accounting is exact,
so every token carries the span of its original source text.  Byte
offsets are kept on each token to allow lossless reconstruction checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from clonescope.errors import LexError
from clonescope.spans import SourceSpan


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    NUMBER = "number"
    STRING = "string"
    OP = "op"
    PUNCT = "punct"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    span: SourceSpan
    start_offset: int
    end_offset: int  # exclusive

    def is_kw(self, word: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme == word


def _int_type_names() -> set[str]:
    names = {"int", "uint"}
    for width in range(8, 257, 8):
        names.add(f"int{width}")
        names.add(f"uint{width}")
    return names


def _bytes_type_names() -> set[str]:
    names = {"bytes", "byte"}
    for width in range(1, 33):
        names.add(f"bytes{width}")
    return names


TYPE_KEYWORDS: frozenset[str] = frozenset(
    _int_type_names() | _bytes_type_names() | {"bool", "address", "string"}
)

# Reserved words that are recognised but immediately rejected by the
# parser as out-of-subset constructs.
UNSUPPORTED_KEYWORDS: frozenset[str] = frozenset({
    "struct", "enum", "modifier", "library", "interface", "import",
    "using", "constructor", "delete", "new", "is", "throw", "do",
})

CONTROL_KEYWORDS: frozenset[str] = frozenset({
    "pragma", "contract", "function", "event", "returns", "mapping",
    "if", "else", "for", "while", "return", "break", "continue",
    "emit", "revert", "assembly", "true", "false",
    "public", "private", "internal", "external",
    "view", "pure", "payable", "constant", "memory", "storage", "calldata",
})

KEYWORDS: frozenset[str] = TYPE_KEYWORDS | CONTROL_KEYWORDS | UNSUPPORTED_KEYWORDS

# Denomination suffixes for number literals.  Lexed as plain identifiers;
# the parser promotes them when they follow a number.
UNIT_NAMES: frozenset[str] = frozenset({
    "seconds", "minutes", "hours", "days", "weeks", "years",
    "wei", "szabo", "finney", "ether",
})

_MULTI_OPS = (
    "**", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "=>",
)
_SINGLE_OPS = set("+-*/%<>=!&|^~")
_PUNCT = set(";,(){}[].:?")


class _Scanner:
    def __init__(self, source: str):
        self.source = source
        self.pos = 0
        self.line = 1
        self.col = 1

    def at_end(self) -> bool:
        return self.pos >= len(self.source)

    def peek(self, ahead: int = 0) -> str:
        idx = self.pos + ahead
        return self.source[idx] if idx < len(self.source) else ""

    def advance(self) -> str:
        ch = self.source[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def here(self) -> tuple[int, int, int]:
        return self.pos, self.line, self.col

    def point_span(self) -> SourceSpan:
        return SourceSpan(self.line, self.col, self.line, self.col)


def tokenize(source: str) -> list[Token]:
    """Split source text into tokens, skipping whitespace and comments.

    Raises LexError on an illegal character or an unterminated
    string/block comment.
    """
    sc = _Scanner(source)
    tokens: list[Token] = []

    while not sc.at_end():
        ch = sc.peek()

        if ch in " \t\r\n":
            sc.advance()
            continue

        if ch == "/" and sc.peek(1) == "/":
            while not sc.at_end() and sc.peek() != "\n":
                sc.advance()
            continue

        if ch == "/" and sc.peek(1) == "*":
            start_span = sc.point_span()
            sc.advance()
            sc.advance()
            closed = False
            while not sc.at_end():
                if sc.peek() == "*" and sc.peek(1) == "/":
                    sc.advance()
                    sc.advance()
                    closed = True
                    break
                sc.advance()
            if not closed:
                raise LexError("unterminated block comment", start_span)
            continue

        start_offset, start_line, start_col = sc.here()

        if ch.isalpha() or ch == "_" or ch == "$":
            while not sc.at_end() and (sc.peek().isalnum() or sc.peek() in "_$"):
                sc.advance()
            lexeme = source[start_offset:sc.pos]
            kind = TokenKind.KEYWORD if lexeme in KEYWORDS else TokenKind.IDENT
            tokens.append(_tok(sc, kind, lexeme, start_offset, start_line, start_col))
            continue

        if ch.isdigit():
            if ch == "0" and sc.peek(1) in ("x", "X"):
                sc.advance()
                sc.advance()
                while not sc.at_end() and sc.peek() in "0123456789abcdefABCDEF":
                    sc.advance()
            else:
                while not sc.at_end() and sc.peek().isdigit():
                    sc.advance()
                if sc.peek() == "." and sc.peek(1).isdigit():
                    sc.advance()
                    while not sc.at_end() and sc.peek().isdigit():
                        sc.advance()
            lexeme = source[start_offset:sc.pos]
            tokens.append(_tok(sc, TokenKind.NUMBER, lexeme, start_offset, start_line, start_col))
            continue

        if ch in "\"'":
            quote = ch
            sc.advance()
            while not sc.at_end() and sc.peek() != quote:
                if sc.peek() == "\\":
                    sc.advance()
                    if sc.at_end():
                        break
                sc.advance()
            if sc.at_end():
                raise LexError(
                    "unterminated string literal",
                    SourceSpan(start_line, start_col, start_line, start_col),
                )
            sc.advance()
            lexeme = source[start_offset:sc.pos]
            tokens.append(_tok(sc, TokenKind.STRING, lexeme, start_offset, start_line, start_col))
            continue

        two = source[sc.pos:sc.pos + 2]
        if two in _MULTI_OPS:
            sc.advance()
            sc.advance()
            tokens.append(_tok(sc, TokenKind.OP, two, start_offset, start_line, start_col))
            continue

        if ch in _SINGLE_OPS:
            sc.advance()
            tokens.append(_tok(sc, TokenKind.OP, ch, start_offset, start_line, start_col))
            continue

        if ch in _PUNCT:
            sc.advance()
            tokens.append(_tok(sc, TokenKind.PUNCT, ch, start_offset, start_line, start_col))
            continue

        raise LexError(f"illegal character {ch!r}", sc.point_span())

    return tokens


def _tok(
    sc: _Scanner,
    kind: TokenKind,
    lexeme: str,
    start_offset: int,
    start_line: int,
    start_col: int,
) -> Token:
    # Lexemes never contain newlines except strings, which we keep on one
    # reported line for simplicity of the span math below.
    end_col = start_col + (sc.pos - start_offset) - 1
    span = SourceSpan(start_line, start_col, start_line, end_col)
    return Token(kind, lexeme, span, start_offset, sc.pos)
