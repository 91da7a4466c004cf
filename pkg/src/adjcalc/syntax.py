"""Concrete text syntax for arrow terms.

Grammar (composition is right-associative; unary operators bind tighter
than "."):

    term ::= atom | "L" term | "neg" term | term "." term | "(" term ")"
    atom ::= "1[" nat "]" | "phi[" nat "]" | "gam[" nat "]"
           | "nr[" nat "]" | "nl[" nat "]"

``f . g`` denotes the composite with g applied first.  The surface syntax is
ASCII-only and the printer emits a canonical spacing with minimal
parentheses, so ``parse(sig, print_term(t)) == t`` exactly.
"""

from __future__ import annotations

from typing import List, NamedTuple, Optional, Tuple

from .errors import CompositionMismatch, ParseError, SignatureViolation, SourceSpan
from .terms import (
    INV,
    SELF,
    ArrowType,
    Comp,
    Ell,
    Gamma,
    Id,
    Neg,
    Nl,
    Nr,
    Phi,
    Term,
)

_ATOM_CTORS = {"1": Id, "phi": Phi, "gam": Gamma, "nr": Nr, "nl": Nl}
_ATOM_SIG = {"1": None, "phi": SELF, "gam": SELF, "nr": INV, "nl": INV}
_UNARY_SIG = {"L": SELF, "neg": INV}


class _Token(NamedTuple):
    kind: str  # 'word', 'num', '(', ')', '[', ']', '.', 'eof'
    text: str
    start: int
    end: int

    @property
    def span(self) -> SourceSpan:
        return SourceSpan(self.start, self.end)


def _tokenize(text: str) -> List[_Token]:
    if not text.isascii():
        at = next(i for i, ch in enumerate(text) if not ch.isascii())
        byte_at = len(text[:at].encode("utf-8"))
        raise ParseError("non-ASCII character", SourceSpan(byte_at, byte_at + 1))
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch in "()[].":
            tokens.append(_Token(ch, ch, i, i + 1))
            i += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            tokens.append(_Token("word", text[i:j], i, j))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("num", text[i:j], i, j))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", SourceSpan(i, i + 1))
    tokens.append(_Token("eof", "", n, n))
    return tokens


class _Parser:
    def __init__(self, sig: str, text: str):
        self.sig = sig
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {tok.text or 'end of input'!r}", tok.span
            )
        return self.next()

    # term ::= unary ("." term)?   -- right-associative composition
    def term(self) -> Tuple[Term, ArrowType, SourceSpan]:
        f, ty_f, span_f = self.unary()
        if self.peek().kind != ".":
            return f, ty_f, span_f
        self.next()
        g, ty_g, span_g = self.term()
        span = SourceSpan(span_f.start, span_g.end)
        if ty_g.tgt != ty_f.src:
            raise CompositionMismatch(
                f"cannot compose: second operand ends at {ty_g.tgt} "
                f"but first starts at {ty_f.src}",
                span,
            )
        return Comp(f, g), ArrowType(ty_g.src, ty_f.tgt), span

    def unary(self) -> Tuple[Term, ArrowType, SourceSpan]:
        tok = self.peek()
        if tok.kind == "word" and tok.text in _UNARY_SIG:
            if _UNARY_SIG[tok.text] != self.sig:
                raise SignatureViolation(
                    f"operator {tok.text!r} does not belong to the "
                    f"'{self.sig}' signature",
                    tok.span,
                )
            self.next()
            body, ty, span_b = self.unary()
            span = SourceSpan(tok.start, span_b.end)
            if tok.text == "L":
                return Ell(body), ArrowType(ty.src + 1, ty.tgt + 1), span
            return Neg(body), ArrowType(ty.tgt + 1, ty.src + 1), span
        return self.primary()

    def primary(self) -> Tuple[Term, ArrowType, SourceSpan]:
        tok = self.peek()
        if tok.kind == "(":
            self.next()
            t, ty, _ = self.term()
            close = self.expect(")")
            return t, ty, SourceSpan(tok.start, close.end)
        if tok.kind == "word" or (tok.kind == "num" and tok.text == "1"):
            name = tok.text
            if name in _ATOM_CTORS:
                return self.atom(name)
            raise ParseError(f"unknown name {name!r}", tok.span)
        raise ParseError(
            f"expected a term, found {tok.text or 'end of input'!r}", tok.span
        )

    def atom(self, name: str) -> Tuple[Term, ArrowType, SourceSpan]:
        head = self.next()
        need = _ATOM_SIG[name]
        if need is not None and need != self.sig:
            raise SignatureViolation(
                f"generator {name!r} does not belong to the '{self.sig}' signature",
                head.span,
            )
        self.expect("[")
        num = self.peek()
        if num.kind != "num":
            raise ParseError("expected a natural number", num.span)
        self.next()
        close = self.expect("]")
        n = int(num.text)
        ctor = _ATOM_CTORS[name]
        t = ctor(n)
        span = SourceSpan(head.start, close.end)
        if isinstance(t, Id):
            ty = ArrowType(n, n)
        elif isinstance(t, (Phi, Nr)):
            ty = ArrowType(n + 2, n)
        else:
            ty = ArrowType(n, n + 2)
        return t, ty, span


def parse(sig: str, text: str) -> Term:
    """Parse a term of the given signature; the result typechecks.

    Raises ParseError, SignatureViolation or CompositionMismatch, each
    carrying a SourceSpan into ``text``.
    """
    if sig not in (SELF, INV):
        raise ValueError(f"unknown signature {sig!r}")
    p = _Parser(sig, text)
    t, _, _ = p.term()
    trailing = p.peek()
    if trailing.kind != "eof":
        raise ParseError(f"trailing input {trailing.text!r}", trailing.span)
    return t


def print_term(t: Term) -> str:
    """Canonical ASCII rendering; inverse of :func:`parse`."""
    if isinstance(t, Id):
        return f"1[{t.obj}]"
    if isinstance(t, Phi):
        return f"phi[{t.obj}]"
    if isinstance(t, Gamma):
        return f"gam[{t.obj}]"
    if isinstance(t, Nr):
        return f"nr[{t.obj}]"
    if isinstance(t, Nl):
        return f"nl[{t.obj}]"
    if isinstance(t, Comp):
        left = print_term(t.f)
        if isinstance(t.f, Comp):
            left = f"({left})"
        return f"{left} . {print_term(t.g)}"
    if isinstance(t, (Ell, Neg)):
        op = "L" if isinstance(t, Ell) else "neg"
        body = print_term(t.f)
        if isinstance(t.f, Comp):
            body = f"({body})"
        return f"{op} {body}"
    raise TypeError(f"not a term: {t!r}")
