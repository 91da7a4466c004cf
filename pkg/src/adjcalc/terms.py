"""Arrow terms over the self-adjoint and involutive signatures.

Objects of both free categories are identified with natural numbers: the
object ``n`` is the single letter under ``n`` applications of the unary
connective (``L`` in the self signature, negation in the involutive one).

Terms are immutable trees.  ``Comp(f, g)`` denotes "g first, then f", so it
is defined exactly when ``tgt(g) == src(f)``.  Constructors do not typecheck;
use :func:`type_of`.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, NamedTuple, Optional, Tuple, Union

from .errors import CompositionMismatch, SignatureViolation

SELF = "self"
INV = "inv"
SIGNATURES = (SELF, INV)


class ArrowType(NamedTuple):
    src: int
    tgt: int

    def __str__(self):
        return f"{self.src} -> {self.tgt}"


# Terms are hashed and compared constantly during rewrite search, so every
# node caches its hash at construction (children are already cached, making
# this O(1) per node) and equality prefilters on it.


class _HashedNode:
    """Shared cached-hash protocol; every subclass installs a structural
    __eq__ that prefilters on the cached hash."""

    def __hash__(self):
        return self._hash


def _atom_eq(cls):
    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not cls:
            return NotImplemented
        return self.obj == other.obj

    return __eq__


def _unary_eq(cls):
    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not cls:
            return NotImplemented
        return self._hash == other._hash and self.f == other.f

    return __eq__


@dataclass(frozen=True, eq=False)
class Id(_HashedNode):
    obj: int

    def __post_init__(self):
        _check_obj(self.obj)
        object.__setattr__(self, "_hash", hash((0, self.obj)))


@dataclass(frozen=True, eq=False)
class Phi(_HashedNode):
    """Counit generator of the self signature: object n+2 -> n."""

    obj: int

    def __post_init__(self):
        _check_obj(self.obj)
        object.__setattr__(self, "_hash", hash((1, self.obj)))


@dataclass(frozen=True, eq=False)
class Gamma(_HashedNode):
    """Unit generator of the self signature: object n -> n+2."""

    obj: int

    def __post_init__(self):
        _check_obj(self.obj)
        object.__setattr__(self, "_hash", hash((2, self.obj)))


@dataclass(frozen=True, eq=False)
class Nr(_HashedNode):
    """Double-negation elimination generator: object n+2 -> n."""

    obj: int

    def __post_init__(self):
        _check_obj(self.obj)
        object.__setattr__(self, "_hash", hash((3, self.obj)))


@dataclass(frozen=True, eq=False)
class Nl(_HashedNode):
    """Double-negation introduction generator: object n -> n+2."""

    obj: int

    def __post_init__(self):
        _check_obj(self.obj)
        object.__setattr__(self, "_hash", hash((4, self.obj)))


@dataclass(frozen=True, eq=False)
class Comp(_HashedNode):
    f: "Term"
    g: "Term"

    __hash__ = _HashedNode.__hash__  # in-body __eq__ would otherwise erase it

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((5, self.f._hash, self.g._hash)))

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not Comp:
            return NotImplemented
        return self._hash == other._hash and self.f == other.f and self.g == other.g


@dataclass(frozen=True, eq=False)
class Ell(_HashedNode):
    """Covariant endofunctor application (self signature)."""

    f: "Term"

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((6, self.f._hash)))


@dataclass(frozen=True, eq=False)
class Neg(_HashedNode):
    """Contravariant endofunctor application (involutive signature)."""

    f: "Term"

    def __post_init__(self):
        object.__setattr__(self, "_hash", hash((7, self.f._hash)))


for _cls in (Id, Phi, Gamma, Nr, Nl):
    _cls.__eq__ = _atom_eq(_cls)
for _cls in (Ell, Neg):
    _cls.__eq__ = _unary_eq(_cls)
del _cls


Term = Union[Id, Phi, Gamma, Nr, Nl, Comp, Ell, Neg]
SelfTerm = Term  # built from Id, Phi, Gamma, Comp, Ell
InvTerm = Term  # built from Id, Nr, Nl, Comp, Neg

_SELF_NODES = (Id, Phi, Gamma, Comp, Ell)
_INV_NODES = (Id, Nr, Nl, Comp, Neg)


def _check_obj(n):
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ValueError(f"object index must be a natural number, got {n!r}")


def _check_sig_tag(sig):
    if sig not in SIGNATURES:
        raise ValueError(f"unknown signature {sig!r}; expected one of {SIGNATURES}")


def check_signature(sig: str, t: Term) -> None:
    """Raise SignatureViolation if t uses a constructor foreign to sig."""
    _check_sig_tag(sig)
    allowed = _SELF_NODES if sig == SELF else _INV_NODES
    stack = [t]
    while stack:
        node = stack.pop()
        if not isinstance(node, allowed):
            raise SignatureViolation(
                f"constructor {type(node).__name__} is not part of the "
                f"'{sig}' signature"
            )
        if isinstance(node, Comp):
            stack.append(node.f)
            stack.append(node.g)
        elif isinstance(node, (Ell, Neg)):
            stack.append(node.f)


@lru_cache(maxsize=None)
def arrow_type(t: Term) -> ArrowType:
    """Arrow type of a term, signature-agnostic.

    Raises CompositionMismatch on an ill-formed composition (without
    position information; :func:`type_of` reports positions).
    """
    if isinstance(t, Id):
        return ArrowType(t.obj, t.obj)
    if isinstance(t, (Phi, Nr)):
        return ArrowType(t.obj + 2, t.obj)
    if isinstance(t, (Gamma, Nl)):
        return ArrowType(t.obj, t.obj + 2)
    if isinstance(t, Ell):
        ty = arrow_type(t.f)
        return ArrowType(ty.src + 1, ty.tgt + 1)
    if isinstance(t, Neg):
        ty = arrow_type(t.f)
        return ArrowType(ty.tgt + 1, ty.src + 1)
    if isinstance(t, Comp):
        ty_f = arrow_type(t.f)
        ty_g = arrow_type(t.g)
        if ty_g.tgt != ty_f.src:
            raise CompositionMismatch(
                f"cannot compose: inner types differ ({ty_g.tgt} vs {ty_f.src})"
            )
        return ArrowType(ty_g.src, ty_f.tgt)
    raise TypeError(f"not a term: {t!r}")


def type_of(sig: str, t: Term) -> ArrowType:
    """Typecheck t in the given signature and return its arrow type.

    Raises SignatureViolation for foreign constructors and
    CompositionMismatch (reporting the offending position) for bad
    compositions.
    """
    check_signature(sig, t)
    return _type_at(t, ())


def _type_at(t: Term, pos: Tuple[int, ...]) -> ArrowType:
    if isinstance(t, Comp):
        ty_f = _type_at(t.f, pos + (0,))
        ty_g = _type_at(t.g, pos + (1,))
        if ty_g.tgt != ty_f.src:
            where = ".".join(map(str, pos)) or "root"
            raise CompositionMismatch(
                f"cannot compose at {where}: second operand ends at "
                f"{ty_g.tgt} but first starts at {ty_f.src}"
            )
        return ArrowType(ty_g.src, ty_f.tgt)
    if isinstance(t, Ell):
        ty = _type_at(t.f, pos + (0,))
        return ArrowType(ty.src + 1, ty.tgt + 1)
    if isinstance(t, Neg):
        ty = _type_at(t.f, pos + (0,))
        return ArrowType(ty.tgt + 1, ty.src + 1)
    return arrow_type(t)


def size(t: Term) -> int:
    """Number of constructor nodes, identities included."""
    if isinstance(t, Comp):
        return 1 + size(t.f) + size(t.g)
    if isinstance(t, (Ell, Neg)):
        return 1 + size(t.f)
    return 1


def subterm_at(t: Term, pos: Tuple[int, ...]) -> Term:
    for i in pos:
        if isinstance(t, Comp):
            t = t.f if i == 0 else t.g if i == 1 else None
        elif isinstance(t, (Ell, Neg)) and i == 0:
            t = t.f
        else:
            t = None
        if t is None:
            raise ValueError(f"no subterm at position {pos}")
    return t


def replace_at(t: Term, pos: Tuple[int, ...], new: Term) -> Term:
    if not pos:
        return new
    i, rest = pos[0], pos[1:]
    if isinstance(t, Comp):
        if i == 0:
            return Comp(replace_at(t.f, rest, new), t.g)
        if i == 1:
            return Comp(t.f, replace_at(t.g, rest, new))
    elif isinstance(t, (Ell, Neg)) and i == 0:
        return type(t)(replace_at(t.f, rest, new))
    raise ValueError(f"no subterm at position {pos}")


def positions(t: Term) -> Iterator[Tuple[Tuple[int, ...], Term]]:
    """All (position, subterm) pairs in preorder."""
    stack = [((), t)]
    while stack:
        pos, node = stack.pop()
        yield pos, node
        if isinstance(node, Comp):
            stack.append((pos + (1,), node.g))
            stack.append((pos + (0,), node.f))
        elif isinstance(node, (Ell, Neg)):
            stack.append((pos + (0,), node.f))


# ---------------------------------------------------------------------------
# Term generation for property tests.

EXHAUSTIVE_SIZE = 4
EXHAUSTIVE_INDEX = 3


def enumerate_terms(sig: str, max_size: int, max_index: int = EXHAUSTIVE_INDEX) -> List[Term]:
    """Every well-typed term of the signature with size <= max_size and all
    generator indices <= max_index, in a fixed deterministic order."""
    _check_sig_tag(sig)
    if max_size < 1:
        return []
    down = Phi if sig == SELF else Nr
    up = Gamma if sig == SELF else Nl
    una = Ell if sig == SELF else Neg
    by_size: List[List[Term]] = [[]]
    atoms: List[Term] = []
    for ctor in (Id, down, up):
        atoms.extend(ctor(n) for n in range(max_index + 1))
    by_size.append(atoms)
    for s in range(2, max_size + 1):
        level: List[Term] = [una(t) for t in by_size[s - 1]]
        for left in range(1, s - 1):
            right = s - 1 - left
            for f in by_size[left]:
                need = arrow_type(f).src
                level.extend(
                    Comp(f, g) for g in by_size[right] if arrow_type(g).tgt == need
                )
        by_size.append(level)
    out: List[Term] = []
    for s in range(1, max_size + 1):
        out.extend(by_size[s])
    return out


def gen_terms(
    sig: str,
    max_size: int,
    want: Optional[ArrowType] = None,
    seed: int = 0,
    limit: Optional[int] = None,
) -> List[Term]:
    """Deterministic term pool for tests.

    For max_size <= 4 the pool is the exhaustive enumeration (indices up to
    3, or up to the wanted endpoints when a type constraint is given),
    filtered by ``want``.  Above that it is seeded random sampling; ``limit``
    bounds the sample length (default 100).  May be empty when no term of the
    requested type fits in the size bound.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    if max_size <= EXHAUSTIVE_SIZE:
        max_index = EXHAUSTIVE_INDEX
        if want is not None:
            max_index = max(max_index, want.src, want.tgt)
        pool = enumerate_terms(sig, max_size, max_index)
        if want is not None:
            pool = [t for t in pool if arrow_type(t) == ArrowType(*want)]
        return pool if limit is None else pool[:limit]
    count = 100 if limit is None else limit
    rng = random.Random(seed)
    out: List[Term] = []
    while len(out) < count:
        budget = rng.randint(1, max_size)
        if want is not None:
            t = _gen_typed(rng, sig, budget, want.src, want.tgt)
        else:
            t = _gen_free(rng, sig, budget)
        if t is not None:
            out.append(t)
    return out


def _ctors(sig):
    if sig == SELF:
        return Phi, Gamma, Ell
    return Nr, Nl, Neg


def _gen_free(rng: random.Random, sig: str, budget: int) -> Term:
    down, up, una = _ctors(sig)
    if budget <= 1:
        ctor = rng.choice((Id, down, up))
        return ctor(rng.randint(0, EXHAUSTIVE_INDEX))
    if budget == 2 or rng.random() < 0.4:
        return una(_gen_free(rng, sig, budget - 1))
    left = rng.randint(1, budget - 2)
    f = _gen_free(rng, sig, left)
    g = _gen_typed(rng, sig, budget - 1 - left, None, arrow_type(f).src)
    if g is None:
        return f
    return Comp(f, g)


def _min_size(src: int, tgt: int) -> int:
    gap = abs(src - tgt) // 2
    return 1 if gap == 0 else 2 * gap - 1


def _staircase(src, tgt, down, up):
    # shortest chain of one-directional generators between the endpoints
    if src == tgt:
        return Id(src)
    if src > tgt:
        t = down(src - 2)
        cur = src - 2
        while cur > tgt:
            t = Comp(down(cur - 2), t)
            cur -= 2
        return t
    t = up(src)
    cur = src + 2
    while cur < tgt:
        t = Comp(up(cur), t)
        cur += 2
    return t


def _gen_typed(rng, sig, budget, src, tgt):
    """Random term with the given endpoint constraints (None = free), or
    None when infeasible within the size budget."""
    down, up, una = _ctors(sig)
    if src is None and tgt is None:
        return _gen_free(rng, sig, budget)
    if src is not None and tgt is not None:
        if (src + tgt) % 2 != 0 or budget < _min_size(src, tgt):
            return None
    for _ in range(12):
        t = _try_typed(rng, sig, budget, src, tgt, down, up, una)
        if t is not None:
            return t
    a = src if src is not None else tgt
    b = tgt if tgt is not None else src
    stair = _staircase(a, b, down, up)
    return stair if size(stair) <= budget else None


def _try_typed(rng, sig, budget, src, tgt, down, up, una):
    choice = rng.choice(("atom", "unary", "comp", "comp"))
    if choice == "atom" or budget < 2:
        picks = []
        if src is None or tgt is None or src == tgt:
            picks.append(Id(src if src is not None else tgt))
        if src is not None and tgt is not None:
            if src == tgt + 2:
                picks.append(down(tgt))
            if tgt == src + 2:
                picks.append(up(src))
        elif src is not None:
            if src >= 2:
                picks.append(down(src - 2))
            picks.append(up(src))
        else:
            picks.append(down(tgt))
            if tgt >= 2:
                picks.append(up(tgt - 2))
        return rng.choice(picks) if picks else None
    if choice == "unary":
        if budget < 2 or (src is not None and src < 1) or (tgt is not None and tgt < 1):
            return None
        if una is Ell:
            b_src = None if src is None else src - 1
            b_tgt = None if tgt is None else tgt - 1
        else:
            b_src = None if tgt is None else tgt - 1
            b_tgt = None if src is None else src - 1
        body = _gen_typed(rng, sig, budget - 1, b_src, b_tgt)
        return una(body) if body is not None else None
    if budget < 3:
        return None
    anchor = src if src is not None else tgt
    mid = anchor + 2 * rng.randint(-2, 2)
    if mid < 0:
        mid = anchor % 2
    split = rng.randint(1, budget - 2)
    g = _gen_typed(rng, sig, split, src, mid)
    if g is None:
        return None
    f = _gen_typed(rng, sig, budget - 1 - split, mid, tgt)
    if f is None:
        return None
    return Comp(f, g)
