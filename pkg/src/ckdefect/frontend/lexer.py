"""Tokenizer for the Java-like source subset."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum


class TokenKind(str, Enum):
    IDENTIFIER = "identifier"
    KEYWORD = "keyword"
    PUNCTUATION = "punctuation"
    LITERAL = "literal"
    EOI = "end-of-input"


KEYWORDS = frozenset("""
    abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while true false null
""".split())

# longest first so that "&&" wins over "&"
_OPERATORS = sorted("""
    >>>= <<= >>= >>> ... -> :: ++ -- && || == != <= >= += -= *= /= %= &= |= ^= << >>
    ( ) { } [ ] ; , . @ = > < ! ~ ? : + - * / & | ^ %
""".split(), key=len, reverse=True)

_NUMBER = re.compile(
    r"0[xX][0-9a-fA-F_]+[lL]?"
    r"|0[bB][01_]+[lL]?"
    r"|(?:\d[\d_]*\.?[\d_]*|\.\d[\d_]*)(?:[eE][+-]?\d+)?[fFdDlL]?"
)
_IDENT = re.compile(r"(?:[^\W\d]|\$)[\w$]*")


class LexError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    def is_punct(self, text: str) -> bool:
        return self.kind is TokenKind.PUNCTUATION and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.text == text

    def __repr__(self) -> str:
        return f"Token({self.kind.value} {self.text!r} @{self.line}:{self.column})"


def tokenize(source: str) -> list[Token]:
    """Split ``source`` into tokens, dropping whitespace and comments.

    String and char literals become single LITERAL tokens; their contents
    never surface as identifiers or keywords.
    """
    tokens: list[Token] = []
    i, n = 0, len(source)
    line, line_start = 1, 0

    def col(pos: int) -> int:
        return pos - line_start + 1

    while i < n:
        ch = source[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            continue
        if source.startswith("//", i):
            end = source.find("\n", i)
            i = n if end < 0 else end
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise LexError("unterminated block comment", line, col(i))
            for j in range(i, end):
                if source[j] == "\n":
                    line += 1
                    line_start = j + 1
            i = end + 2
            continue
        if source.startswith('"""', i):
            start_line, start_col = line, col(i)
            end = source.find('"""', i + 3)
            if end < 0:
                raise LexError("unterminated text block", start_line, start_col)
            tokens.append(Token(TokenKind.LITERAL, source[i:end + 3], start_line, start_col))
            for j in range(i, end):
                if source[j] == "\n":
                    line += 1
                    line_start = j + 1
            i = end + 3
            continue
        if ch in "\"'":
            start = i
            j = i + 1
            while True:
                if j >= n or source[j] == "\n":
                    what = "string" if ch == '"' else "character"
                    raise LexError(f"unterminated {what} literal", line, col(start))
                if source[j] == "\\":
                    j += 2
                    continue
                if source[j] == ch:
                    break
                j += 1
            tokens.append(Token(TokenKind.LITERAL, source[start:j + 1], line, col(start)))
            i = j + 1
            continue
        m = _IDENT.match(source, i)
        if m:
            text = m.group()
            kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.IDENTIFIER
            tokens.append(Token(kind, text, line, col(i)))
            i = m.end()
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            m = _NUMBER.match(source, i)
            tokens.append(Token(TokenKind.LITERAL, m.group(), line, col(i)))
            i = m.end()
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token(TokenKind.PUNCTUATION, op, line, col(i)))
                i += len(op)
                break
        else:
            # stray characters are left for the parser to skip as noise
            tokens.append(Token(TokenKind.PUNCTUATION, ch, line, col(i)))
            i += 1
    tokens.append(Token(TokenKind.EOI, "", line, col(i)))
    return tokens
