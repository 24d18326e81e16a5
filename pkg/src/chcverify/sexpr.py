"""S-expression reader with source locations.

Atoms are integers, booleans (#t/#f/true/false are handled by the frontend,
the reader keeps them as symbols) or symbols. Square brackets are accepted
as synonyms for parentheses, Racket-style. Comments start with `;`.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class SexprError(Exception):
    """Syntax error with a position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    def located(self, filename: str) -> str:
        return f"{filename}:{self.line}:{self.col}: {self.message}"


@dataclass(frozen=True)
class SAtom:
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int

    def __str__(self) -> str:
        return "(" + " ".join(str(i) for i in self.items) + ")"

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


_CLOSER = {"(": ")", "[": "]"}
_SYMBOL_BREAK = set("()[];") | set(" \t\r\n")


@dataclass
class _Reader:
    text: str
    pos: int = 0
    line: int = 1
    col: int = 1
    filename: str = "<input>"
    stack: list = field(default_factory=list)

    def error(self, msg: str, line: int | None = None, col: int | None = None):
        raise SexprError(msg, self.line if line is None else line,
                         self.col if col is None else col)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_blank(self):
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == ";":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return

    def read_all(self) -> list:
        forms = []
        self.skip_blank()
        while self.pos < len(self.text):
            forms.append(self.read_form())
            self.skip_blank()
        return forms

    def read_form(self):
        ch = self.peek()
        if ch in "([":
            return self.read_list()
        if ch in ")]":
            self.error("unbalanced closing parenthesis")
        return self.read_atom()

    def read_list(self) -> SList:
        line, col = self.line, self.col
        opener = self.advance()
        closer = _CLOSER[opener]
        items = []
        while True:
            self.skip_blank()
            if self.pos >= len(self.text):
                self.error("unclosed parenthesis", line, col)
            ch = self.peek()
            if ch in ")]":
                if ch != closer:
                    self.error(f"mismatched delimiter: expected '{closer}'")
                self.advance()
                return SList(tuple(items), line, col)
            items.append(self.read_form())

    def read_atom(self) -> SAtom:
        line, col = self.line, self.col
        chars = []
        while self.pos < len(self.text) and self.peek() not in _SYMBOL_BREAK:
            chars.append(self.advance())
        return SAtom("".join(chars), line, col)


def read_forms(text: str) -> list:
    """Read every top-level form of `text`, raising SexprError on bad syntax."""
    return _Reader(text).read_all()


def to_plain(form):
    """Strip locations: SAtom -> str, SList -> list (for structural comparison)."""
    if isinstance(form, SAtom):
        return form.text
    return [to_plain(i) for i in form.items]


def pretty(form, indent: int = 0) -> str:
    """Render a form back to parseable text."""
    if isinstance(form, SAtom):
        return form.text
    inner = " ".join(pretty(i) for i in form.items)
    return f"({inner})"
