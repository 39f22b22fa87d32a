"""Tokenizer for the definition language.

Keywords are contextual: the lexer only distinguishes identifiers, integers
and punctuation, so declaration names are free to reuse most words.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Diagnostic

IDENT = "ident"
INT = "int"
PUNCT = "punct"
EOF = "eof"

PUNCTUATION = set("{}()[],;:=_")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int
    start: int
    end: int

    def describe(self) -> str:
        if self.kind == EOF:
            return "end of input"
        return repr(self.text)


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    tokens: list[Token] = []
    errors: list[Diagnostic] = []
    pos = 0
    line = 1
    col = 1
    n = len(text)

    def emit(kind: str, start: int, start_line: int, start_col: int, end: int):
        tokens.append(Token(kind, text[start:end], start_line, start_col, start, end))

    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line += 1
            col = 1
            continue
        if ch.isspace():
            pos += 1
            col += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        start, start_line, start_col = pos, line, col
        if ch.isalpha():
            while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                pos += 1
            col += pos - start
            emit(IDENT, start, start_line, start_col, pos)
            continue
        if ch.isdigit():
            while pos < n and text[pos].isdigit():
                pos += 1
            col += pos - start
            emit(INT, start, start_line, start_col, pos)
            continue
        if ch == "-" and pos + 1 < n and text[pos + 1] == ">":
            pos += 2
            col += 2
            emit(PUNCT, start, start_line, start_col, pos)
            continue
        if ch == "_":
            pos += 1
            col += 1
            if pos < n and (text[pos].isalnum() or text[pos] == "_"):
                while pos < n and (text[pos].isalnum() or text[pos] == "_"):
                    pos += 1
                col += pos - start - 1
                errors.append(Diagnostic(
                    "names may not begin with '_'",
                    start_line, start_col, start, pos,
                ))
                continue
            emit(PUNCT, start, start_line, start_col, pos)
            continue
        if ch in PUNCTUATION:
            pos += 1
            col += 1
            emit(PUNCT, start, start_line, start_col, pos)
            continue
        pos += 1
        col += 1
        errors.append(Diagnostic(
            f"unexpected character {ch!r}",
            start_line, start_col, start, pos,
        ))

    tokens.append(Token(EOF, "", line, col, n, n))
    return tokens, errors
