"""Equational theories as bidirectional rewrite systems over arrow terms.

Each signature carries four cumulative theories: the plain adjunction
equations, then one extra axiom relocating circles (k), one erasing them
(j), and one collapsing everything of equal type (triv).  Schemas are pairs
of term patterns with metavariables for objects and arrows; they can be
applied in either direction at any subterm position.  Proofs are explicit
step lists replayable by a deliberately dumb checker that re-derives every
substitution itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterator, List, NamedTuple, Optional, Set, Tuple, Union

from .errors import ParseError
from .syntax import parse, print_term
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
    arrow_type,
    positions,
    replace_at,
    subterm_at,
    type_of,
)

PLAIN = "plain"
K = "k"
J = "j"
TRIV = "triv"
LEVELS = (PLAIN, K, J, TRIV)

L2R = "L2R"
R2L = "R2L"
DIRECTIONS = (L2R, R2L)


class Theory(NamedTuple):
    sig: str
    level: str


def _check_theory(th: Theory) -> Theory:
    th = Theory(*th)
    if th.sig not in (SELF, INV):
        raise ValueError(f"unknown signature {th.sig!r}")
    if th.level not in LEVELS:
        raise ValueError(f"unknown level {th.level!r}")
    return th


# ---------------------------------------------------------------------------
# Patterns and schemas.


@dataclass(frozen=True)
class PVar:
    """Arrow metavariable."""

    name: str


@dataclass(frozen=True)
class PAtom:
    """Generator pattern; matches ctor(n) and binds var = n - offset >= 0."""

    ctor: type
    var: str
    offset: int = 0


@dataclass(frozen=True)
class PUnary:
    ctor: type
    body: "Pattern"


@dataclass(frozen=True)
class PComp:
    f: "Pattern"
    g: "Pattern"


Pattern = Union[PVar, PAtom, PUnary, PComp]

Binding = Dict[str, Union[int, Term]]


@dataclass(frozen=True)
class Schema:
    """One equation schema; ``typed`` declares arrow metavariable endpoints
    (object variable names) used to complete bindings after a match."""

    name: str
    sig: str
    lhs: Pattern
    rhs: Pattern
    typed: Tuple[Tuple[str, Tuple[str, str]], ...] = ()

    def side(self, direction: str) -> Tuple[Pattern, Pattern]:
        if direction == L2R:
            return self.lhs, self.rhs
        if direction == R2L:
            return self.rhs, self.lhs
        raise ValueError(f"unknown direction {direction!r}")


def _fvar(name):
    return PVar(name)


def _schema(name, sig, lhs, rhs, typed=()):
    return Schema(name, sig, lhs, rhs, tuple(typed))


def _category_schemas(sig: str) -> List[Schema]:
    f, g, h = PVar("f"), PVar("g"), PVar("h")
    return [
        _schema("unit-left", sig, PComp(PAtom(Id, "B"), f), f, [("f", ("A", "B"))]),
        _schema("unit-right", sig, PComp(f, PAtom(Id, "A")), f, [("f", ("A", "B"))]),
        _schema("assoc", sig, PComp(PComp(f, g), h), PComp(f, PComp(g, h))),
    ]


@lru_cache(maxsize=None)
def _schemas_by_level(sig: str) -> Dict[str, Tuple[Schema, ...]]:
    f, g = PVar("f"), PVar("g")
    if sig == SELF:
        plain = _category_schemas(SELF) + [
            _schema("L-id", SELF, PUnary(Ell, PAtom(Id, "A")), PAtom(Id, "A", 1)),
            _schema(
                "L-comp",
                SELF,
                PUnary(Ell, PComp(f, g)),
                PComp(PUnary(Ell, f), PUnary(Ell, g)),
            ),
            _schema(
                "phi-nat",
                SELF,
                PComp(f, PAtom(Phi, "A1")),
                PComp(PAtom(Phi, "A2"), PUnary(Ell, PUnary(Ell, f))),
                [("f", ("A1", "A2"))],
            ),
            _schema(
                "gam-nat",
                SELF,
                PComp(PUnary(Ell, PUnary(Ell, f)), PAtom(Gamma, "A1")),
                PComp(PAtom(Gamma, "A2"), f),
                [("f", ("A1", "A2"))],
            ),
            _schema(
                "phigam-L1",
                SELF,
                PComp(PAtom(Phi, "A", 1), PUnary(Ell, PAtom(Gamma, "A"))),
                PAtom(Id, "A", 1),
            ),
            _schema(
                "phigam-L2",
                SELF,
                PComp(PUnary(Ell, PAtom(Phi, "A")), PAtom(Gamma, "A", 1)),
                PAtom(Id, "A", 1),
            ),
        ]
        extra = {
            K: _schema(
                "phigam-K",
                SELF,
                PUnary(Ell, PComp(PAtom(Phi, "A"), PAtom(Gamma, "A"))),
                PComp(PAtom(Phi, "A", 1), PAtom(Gamma, "A", 1)),
            ),
            J: _schema(
                "phigam-J",
                SELF,
                PComp(PAtom(Phi, "A"), PAtom(Gamma, "A")),
                PAtom(Id, "A"),
            ),
            TRIV: _schema(
                "gamphi",
                SELF,
                PComp(PAtom(Gamma, "A"), PAtom(Phi, "A")),
                PAtom(Id, "A", 2),
            ),
        }
    else:
        plain = _category_schemas(INV) + [
            _schema("neg-1", INV, PUnary(Neg, PAtom(Id, "A")), PAtom(Id, "A", 1)),
            _schema(
                "neg-2",
                INV,
                PUnary(Neg, PComp(f, g)),
                PComp(PUnary(Neg, g), PUnary(Neg, f)),
            ),
            _schema(
                "nr-nat",
                INV,
                PComp(f, PAtom(Nr, "A1")),
                PComp(PAtom(Nr, "A2"), PUnary(Neg, PUnary(Neg, f))),
                [("f", ("A1", "A2"))],
            ),
            _schema(
                "nl-nat",
                INV,
                PComp(PUnary(Neg, PUnary(Neg, f)), PAtom(Nl, "A1")),
                PComp(PAtom(Nl, "A2"), f),
                [("f", ("A1", "A2"))],
            ),
            _schema(
                "nr-triang",
                INV,
                PComp(PAtom(Nr, "A", 1), PUnary(Neg, PAtom(Nr, "A"))),
                PAtom(Id, "A", 1),
            ),
            _schema(
                "nl-triang",
                INV,
                PComp(PUnary(Neg, PAtom(Nl, "A")), PAtom(Nl, "A", 1)),
                PAtom(Id, "A", 1),
            ),
        ]
        extra = {
            K: _schema(
                "nrnl-K",
                INV,
                PUnary(Neg, PComp(PAtom(Nr, "A"), PAtom(Nl, "A"))),
                PComp(PAtom(Nr, "A", 1), PAtom(Nl, "A", 1)),
            ),
            J: _schema(
                "nrnl-J",
                INV,
                PComp(PAtom(Nr, "A"), PAtom(Nl, "A")),
                PAtom(Id, "A"),
            ),
            TRIV: _schema(
                "nlnr",
                INV,
                PComp(PAtom(Nl, "A"), PAtom(Nr, "A")),
                PAtom(Id, "A", 2),
            ),
        }
    table = {PLAIN: tuple(plain)}
    table[K] = table[PLAIN] + (extra[K],)
    table[J] = table[K] + (extra[J],)
    table[TRIV] = table[J] + (extra[TRIV],)
    return table


def axioms(th: Theory) -> Tuple[Schema, ...]:
    """The cumulative schema list of a theory."""
    th = _check_theory(th)
    return _schemas_by_level(th.sig)[th.level]


def schema_named(th: Theory, name: str) -> Optional[Schema]:
    for s in axioms(th):
        if s.name == name:
            return s
    return None


# ---------------------------------------------------------------------------
# Tree-level matching, instantiation, application.


def match(pattern: Pattern, t: Term, binding: Optional[Binding] = None) -> Optional[Binding]:
    """Structural match; returns the (unique) extending binding or None."""
    b: Binding = {} if binding is None else dict(binding)
    if _match_into(pattern, t, b):
        return b
    return None


def _match_into(pattern: Pattern, t: Term, b: Binding) -> bool:
    if isinstance(pattern, PVar):
        if pattern.name in b:
            return b[pattern.name] == t
        b[pattern.name] = t
        return True
    if isinstance(pattern, PAtom):
        if type(t) is not pattern.ctor:
            return False
        value = t.obj - pattern.offset
        if value < 0:
            return False
        if pattern.var in b:
            return b[pattern.var] == value
        b[pattern.var] = value
        return True
    if isinstance(pattern, PUnary):
        return type(t) is pattern.ctor and _match_into(pattern.body, t.f, b)
    if isinstance(pattern, PComp):
        return (
            isinstance(t, Comp)
            and _match_into(pattern.f, t.f, b)
            and _match_into(pattern.g, t.g, b)
        )
    raise TypeError(f"not a pattern: {pattern!r}")


def complete_binding(schema: Schema, b: Binding) -> Optional[Binding]:
    """Fill object variables that are determined by arrow metavariable types;
    returns None on an inconsistency."""
    b = dict(b)
    for name, (src_var, tgt_var) in schema.typed:
        inst = b.get(name)
        if inst is None:
            return None
        ty = arrow_type(inst)
        for var, value in ((src_var, ty.src), (tgt_var, ty.tgt)):
            if var in b:
                if b[var] != value:
                    return None
            else:
                b[var] = value
    return b


def instantiate(pattern: Pattern, b: Binding) -> Term:
    if isinstance(pattern, PVar):
        return b[pattern.name]
    if isinstance(pattern, PAtom):
        return pattern.ctor(b[pattern.var] + pattern.offset)
    if isinstance(pattern, PUnary):
        return pattern.ctor(instantiate(pattern.body, b))
    if isinstance(pattern, PComp):
        return Comp(instantiate(pattern.f, b), instantiate(pattern.g, b))
    raise TypeError(f"not a pattern: {pattern!r}")


def apply_schema(
    schema: Schema, direction: str, t: Term, pos: Tuple[int, ...]
) -> Optional[Tuple[Term, Binding]]:
    """Apply one schema at one position; None when the pattern does not
    match there."""
    try:
        sub = subterm_at(t, pos)
    except ValueError:
        return None
    source, target = schema.side(direction)
    b = match(source, sub)
    if b is None:
        return None
    b = complete_binding(schema, b)
    if b is None:
        return None
    return replace_at(t, pos, instantiate(target, b)), b


def rewrite_neighbors(th: Theory, t: Term) -> Set[Term]:
    """All terms one schema application away, in either direction, at any
    position.  Every neighbor keeps the arrow type of ``t``."""
    th = _check_theory(th)
    type_of(th.sig, t)
    out: Set[Term] = set()
    for pos, _sub in positions(t):
        for schema in axioms(th):
            for direction in DIRECTIONS:
                applied = apply_schema(schema, direction, t, pos)
                if applied is not None:
                    out.add(applied[0])
    return out


# ---------------------------------------------------------------------------
# Proof objects and the replay checker.


@dataclass(frozen=True)
class Step:
    """One rewrite: ``rule`` applied in ``direction`` at ``path``, producing
    ``result``.  ``subst`` records the substitution instance for the reader;
    the checker re-derives it and does not trust it."""

    rule: str
    direction: str
    path: Tuple[int, ...]
    subst: Tuple[Tuple[str, Union[int, Term]], ...]
    result: Term


@dataclass(frozen=True)
class Proof:
    start: Term
    steps: Tuple[Step, ...]

    @property
    def final(self) -> Term:
        return self.steps[-1].result if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)


def make_step(rule, direction, path, binding, result) -> Step:
    items = tuple(sorted(binding.items()))
    return Step(rule, direction, tuple(path), items, result)


def verify_proof_report(th: Theory, p: Proof) -> Tuple[bool, Optional[str]]:
    """Replay a proof step by step; returns (ok, reason-of-first-failure)."""
    th = _check_theory(th)
    try:
        start_type = type_of(th.sig, p.start)
    except Exception as exc:
        return False, f"start term does not typecheck: {exc}"
    cur = p.start
    for i, step in enumerate(p.steps):
        schema = schema_named(th, step.rule)
        if schema is None:
            return False, f"step {i}: rule {step.rule!r} is not in the theory"
        if step.direction not in DIRECTIONS:
            return False, f"step {i}: bad direction {step.direction!r}"
        applied = apply_schema(schema, step.direction, cur, step.path)
        if applied is None:
            return False, (
                f"step {i}: rule {step.rule} does not match at position "
                f"{'.'.join(map(str, step.path)) or 'root'}"
            )
        new, _b = applied
        if new != step.result:
            return False, f"step {i}: recorded result differs from replay"
        try:
            new_type = type_of(th.sig, new)
        except Exception as exc:
            return False, f"step {i}: result does not typecheck: {exc}"
        if new_type != start_type:
            return False, f"step {i}: arrow type changed to {new_type}"
        cur = new
    return True, None


def verify_proof(th: Theory, p: Proof) -> bool:
    ok, _ = verify_proof_report(th, p)
    return ok


# ---------------------------------------------------------------------------
# Proof wire format: one step per line after a START line.

_TURNSTILE = "⊢"  # ⊢


def format_proof(p: Proof) -> str:
    lines = [f"START {print_term(p.start)}"]
    for s in p.steps:
        path = ".".join(map(str, s.path)) or "-"
        lines.append(
            f"{s.rule} {s.direction} {path} {_TURNSTILE} {print_term(s.result)}"
        )
    return "\n".join(lines)


def parse_proof(sig: str, text: str) -> Proof:
    """Inverse of :func:`format_proof`; steps carry no substitution (the
    checker re-derives it)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("START "):
        raise ParseError("proof must begin with a START line")
    start = parse(sig, lines[0][len("START "):])
    steps = []
    for ln in lines[1:]:
        head, sep, term_text = ln.partition(f" {_TURNSTILE} ")
        if not sep:
            raise ParseError(f"malformed proof step: {ln!r}")
        fields = head.split()
        if len(fields) != 3:
            raise ParseError(f"malformed proof step head: {head!r}")
        rule, direction, path_text = fields
        if path_text == "-":
            path: Tuple[int, ...] = ()
        else:
            try:
                path = tuple(int(x) for x in path_text.split("."))
            except ValueError:
                raise ParseError(f"malformed path {path_text!r}")
        steps.append(Step(rule, direction, path, (), parse(sig, term_text)))
    return Proof(start, tuple(steps))
