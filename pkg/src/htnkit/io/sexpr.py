"""S-expression reader that keeps a source span on every node."""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..core.model import SourceSpan

_SYMBOL = re.compile(r"[A-Za-z0-9_!?\-.+*/<>=:]+\Z")


@dataclass(frozen=True)
class ParseError:
    message: str
    span: SourceSpan

    def __str__(self):
        return f"{self.span}: {self.message}"


class ParseErrors(Exception):
    """One or more problems found while reading a domain or problem file."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(str(e) for e in self.errors))


@dataclass
class Sym:
    text: str
    span: SourceSpan


@dataclass
class SList:
    items: list
    span: SourceSpan
    end: SourceSpan = field(default=None, repr=False)

    def head(self):
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].text
        return None


def _tokens(text, filename, errors):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
        elif ch.isspace():
            col += 1
            i += 1
        elif ch == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif ch in "()":
            yield ch, SourceSpan(filename, line, col, 1)
            col += 1
            i += 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in "();":
                j += 1
            word = text[i:j]
            span = SourceSpan(filename, line, col, j - i)
            if _SYMBOL.match(word):
                yield word.lower(), span
            else:
                errors.append(ParseError(f"invalid symbol {word!r}", span))
            col += j - i
            i = j


def read(text: str, filename: str = "<input>") -> list:
    """Read every top-level form of ``text``.

    Raises :class:`ParseErrors` for lexical errors and unbalanced parentheses.
    """
    errors = []
    stack = [SList([], SourceSpan(filename, 1, 1, 1))]
    for tok, span in _tokens(text, filename, errors):
        if tok == "(":
            stack.append(SList([], span))
        elif tok == ")":
            if len(stack) == 1:
                errors.append(ParseError("unexpected ')'", span))
                continue
            node = stack.pop()
            node.end = span
            stack[-1].items.append(node)
        else:
            stack[-1].items.append(Sym(tok, span))
    for open_node in stack[1:]:
        errors.append(ParseError("unclosed '('", open_node.span))
    if errors:
        raise ParseErrors(errors)
    return stack[0].items
