"""A small expression language for group words.

Grammar:  expr   := term ('*' term)*
          term   := atom ('^' integer)?
          atom   := name | '(' expr ')' | '[' expr (',' expr)+ ']'

Names are generator names of the chosen basis; bracket lists are left-normed
commutators, so ``[y,x,y]`` means ``[[y,x],y]``.  Parse errors carry the
offending position.
"""

from __future__ import annotations

from .hall import FreeNilElement, NilpotentBasis, commutator, multiply, power

__all__ = ["WordParseError", "parse_word"]


class WordParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class _Parser:
    def __init__(self, basis: NilpotentBasis, text: str):
        self.basis = basis
        self.text = text
        self.pos = 0

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise WordParseError(f"expected {ch!r}", self.pos)
        self.pos += 1

    def parse(self) -> FreeNilElement:
        out = self.expr()
        self.skip_ws()
        if self.pos != len(self.text):
            raise WordParseError("trailing input", self.pos)
        return out

    def expr(self) -> FreeNilElement:
        out = self.term()
        while self.peek() == "*":
            self.pos += 1
            out = multiply(out, self.term())
        return out

    def term(self) -> FreeNilElement:
        out = self.atom()
        if self.peek() == "^":
            self.pos += 1
            out = power(out, self.integer())
        return out

    def atom(self) -> FreeNilElement:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            out = self.expr()
            self.expect(")")
            return out
        if ch == "[":
            self.pos += 1
            parts = [self.expr()]
            while self.peek() == ",":
                self.pos += 1
                parts.append(self.expr())
            self.expect("]")
            if len(parts) < 2:
                raise WordParseError("commutator needs at least two entries",
                                     self.pos)
            out = parts[0]
            for nxt in parts[1:]:
                out = commutator(out, nxt)
            return out
        if ch.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalnum():
                self.pos += 1
            name = self.text[start:self.pos]
            for i in range(self.basis.rank):
                if self.basis.symbols[i].name == name:
                    return self.basis.generator(i)
            raise WordParseError(f"unknown generator {name!r}", start)
        raise WordParseError("expected a generator, '(' or '['", self.pos)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        if self.pos < len(self.text) and self.text[self.pos] in "+-":
            self.pos += 1
        digits = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == digits:
            raise WordParseError("expected an integer", start)
        return int(self.text[start:self.pos])


def parse_word(basis: NilpotentBasis, text: str) -> FreeNilElement:
    return _Parser(basis, text).parse()


def format_normal_form(elem: FreeNilElement) -> str:
    if elem.is_identity():
        return "1"
    return " ".join(f"{elem.basis.symbols[s].name}^{e}"
                    for s, e in elem.letters())
