"""Tokenizer for the query language subset."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import QueryParseError

# Words with grammatical meaning. They are matched contextually by the
# parser; the lexer only produces NAME tokens.
KEYWORDS = frozenset(
    {
        "for", "let", "where", "order", "by", "return", "if", "then", "else",
        "declare", "function", "at", "in", "to", "as",
        "eq", "ne", "lt", "le", "gt", "ge",
        "div", "idiv", "mod", "and", "or", "not",
        "true", "false", "null",
        "ascending", "descending",
    }
)

NAME = "name"
VAR = "var"
CONTEXT = "context"
STRING = "string"
INTEGER = "integer"
DECIMAL = "decimal"
DOUBLE = "double"
EOF = "eof"

_PUNCT_2 = (":=", "{|", "|}")
_PUNCT_1 = "()[]{},:.+-*#;"

_ESCAPE_MAP = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f", "n": "\n", "r": "\r", "t": "\t"}


@dataclass
class Token:
    type: str
    value: str
    line: int
    col: int


_ASCII_DIGITS = "0123456789"


def _is_digit(ch: str) -> bool:
    # str.isdigit admits unicode digits that int() rejects; stay ASCII
    return ch in _ASCII_DIGITS


def _is_name_start(ch: str) -> bool:
    return ch.isalpha() or ch == "_"


def _is_name_char(ch: str) -> bool:
    return ch.isalpha() or ch in _ASCII_DIGITS or ch == "_"


def lex(text: str) -> "list[Token]":
    """Tokenize, attaching 1-based line/column positions.

    Comments `(: ... :)` nest and are discarded. A name may contain hyphens
    when the hyphen is followed by a letter (so `get-transformer` is one
    token but `$a - 1` is three) and one `prefix:local` colon.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def advance(count: int):
        nonlocal i, line, col
        for _ in range(count):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            advance(1)
            continue
        if text.startswith("(:", i):
            start_line, start_col = line, col
            depth = 0
            while i < n:
                if text.startswith("(:", i):
                    depth += 1
                    advance(2)
                elif text.startswith(":)", i):
                    depth -= 1
                    advance(2)
                    if depth == 0:
                        break
                else:
                    advance(1)
            if depth != 0:
                raise QueryParseError("LEX_ERROR", "unterminated comment", (start_line, start_col))
            continue
        if ch == '"':
            start_line, start_col = line, col
            advance(1)
            out = []
            while True:
                if i >= n or text[i] == "\n":
                    raise QueryParseError(
                        "LEX_ERROR", "unterminated string literal", (start_line, start_col)
                    )
                c = text[i]
                if c == '"':
                    advance(1)
                    break
                if c == "\\":
                    advance(1)
                    if i >= n:
                        raise QueryParseError(
                            "LEX_ERROR", "unterminated string literal", (start_line, start_col)
                        )
                    esc = text[i]
                    if esc in _ESCAPE_MAP:
                        out.append(_ESCAPE_MAP[esc])
                        advance(1)
                    elif esc == "u":
                        hexpart = text[i + 1 : i + 5]
                        if len(hexpart) < 4 or any(h not in "0123456789abcdefABCDEF" for h in hexpart):
                            raise QueryParseError("LEX_ERROR", "bad \\u escape", (line, col))
                        out.append(chr(int(hexpart, 16)))
                        advance(5)
                    else:
                        raise QueryParseError("LEX_ERROR", f"bad escape \\{esc}", (line, col))
                else:
                    out.append(c)
                    advance(1)
            tokens.append(Token(STRING, "".join(out), start_line, start_col))
            continue
        if ch == "$":
            start_line, start_col = line, col
            if text.startswith("$$", i):
                advance(2)
                tokens.append(Token(CONTEXT, "$$", start_line, start_col))
                continue
            advance(1)
            if i >= n or not _is_name_start(text[i]):
                raise QueryParseError("LEX_ERROR", "expected variable name after '$'", (start_line, start_col))
            name = _lex_name(text, i)
            advance(len(name))
            tokens.append(Token(VAR, name, start_line, start_col))
            continue
        if _is_digit(ch):
            start_line, start_col = line, col
            j = i
            while j < n and _is_digit(text[j]):
                j += 1
            kind = INTEGER
            if j < n and text[j] == "." and j + 1 < n and _is_digit(text[j + 1]):
                kind = DECIMAL
                j += 1
                while j < n and _is_digit(text[j]):
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and _is_digit(text[k]):
                    kind = DOUBLE
                    j = k
                    while j < n and _is_digit(text[j]):
                        j += 1
            value = text[i:j]
            advance(j - i)
            tokens.append(Token(kind, value, start_line, start_col))
            continue
        if _is_name_start(ch):
            start_line, start_col = line, col
            name = _lex_name(text, i)
            advance(len(name))
            # one prefix:local colon, glued tight on both sides
            if i < n and text[i] == ":" and i + 1 < n and _is_name_start(text[i + 1]) and ":" not in name:
                advance(1)
                local = _lex_name(text, i)
                advance(len(local))
                name = f"{name}:{local}"
            tokens.append(Token(NAME, name, start_line, start_col))
            continue
        two = text[i : i + 2]
        if two in _PUNCT_2:
            tokens.append(Token(two, two, line, col))
            advance(2)
            continue
        if ch in _PUNCT_1:
            tokens.append(Token(ch, ch, line, col))
            advance(1)
            continue
        raise QueryParseError("LEX_ERROR", f"illegal character {ch!r}", (line, col))

    tokens.append(Token(EOF, "", line, col))
    return tokens


def _lex_name(text: str, start: int) -> str:
    n = len(text)
    j = start
    while j < n:
        if _is_name_char(text[j]):
            j += 1
        elif text[j] == "-" and j + 1 < n and _is_name_start(text[j + 1]):
            j += 1
        else:
            break
    return text[start:j]
