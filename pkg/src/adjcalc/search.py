"""Bounded bidirectional equality search with checkable proofs.

Terms are normalized to right-nested, unit-free composition spines before
searching, which makes associativity and the unit laws implicit.  Every
search move is lowered back to explicit tree-level steps (including the
associativity/unit bookkeeping), so the proofs that come out replay under
the dumb checker in :mod:`adjcalc.theories` with no knowledge of the
normalization.

Spine-level matching instantiates arrow metavariables only with nonempty
factor segments already present in the term; growth happens through
insertion of instantiated generator patterns at spine interfaces (the
rules whose one side is an identity, applied toward the other side).  This
keeps every neighbor set finite; the price is that the plain level is a
semi-decision procedure, reflected in the unknown verdict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .diagrams import COUNT_CIRCLES, DROP_CIRCLES, TLDiagram, diagram_eq, interp
from .errors import TypeMismatch
from .terms import (
    INV,
    SELF,
    ArrowType,
    Comp,
    Ell,
    Id,
    Neg,
    Term,
    arrow_type,
    positions,
    replace_at,
    size,
    subterm_at,
    type_of,
)
from .theories import (
    DIRECTIONS,
    J,
    K,
    L2R,
    PLAIN,
    R2L,
    TRIV,
    Binding,
    PAtom,
    PComp,
    PUnary,
    PVar,
    Pattern,
    Proof,
    Schema,
    Step,
    Theory,
    _check_theory,
    apply_schema,
    axioms,
    complete_binding,
    instantiate,
    make_step,
    schema_named,
)

DEFAULT_BUDGET = 100_000

_CATEGORY_RULES = ("unit-left", "unit-right", "assoc")


# ---------------------------------------------------------------------------
# Verdicts.


@dataclass(frozen=True)
class Equal:
    """The terms are equal; ``proof`` is None only for the trivial level's
    preorder short-circuit."""

    proof: Optional[Proof]


@dataclass(frozen=True)
class Distinct:
    """The terms denote different diagrams in the level's mode; the two
    interpretations are the semantic witness."""

    left: TLDiagram
    right: TLDiagram


@dataclass(frozen=True)
class Unknown:
    """Search budget exhausted without an answer."""

    spent: int


EqVerdict = Union[Equal, Distinct, Unknown]


def decide_trivial(sig: str, t1: Term, t2: Term) -> bool:
    """Equality at the trivial level: all arrows of equal type are equal."""
    return type_of(sig, t1) == type_of(sig, t2)


# ---------------------------------------------------------------------------
# Canonical forms: right-nested, unit-free composition spines.


def canon(t: Term) -> Term:
    """Canonical representative of ``t`` modulo associativity and units."""
    return _spine(_canon_factors(t), arrow_type(t).src)


def _canon_factors(t: Term) -> List[Term]:
    if isinstance(t, Id):
        return []
    if isinstance(t, Comp):
        return _canon_factors(t.f) + _canon_factors(t.g)
    if isinstance(t, (Ell, Neg)):
        return [type(t)(canon(t.f))]
    return [t]


def _spine(factors: Sequence[Term], src_obj: int) -> Term:
    if not factors:
        return Id(src_obj)
    t = factors[-1]
    for a in reversed(factors[:-1]):
        t = Comp(a, t)
    return t


def factors_of(c: Term) -> List[Term]:
    """Factor list of a canonical term (empty for identities)."""
    fs = []
    while isinstance(c, Comp):
        fs.append(c.f)
        c = c.g
    if not isinstance(c, Id):
        fs.append(c)
    return fs


def _interfaces(fs: Sequence[Term], whole: ArrowType) -> List[int]:
    # objects at the k+1 spine boundaries, target end first
    if not fs:
        return [whole.src]
    out = [arrow_type(fs[0]).tgt]
    out.extend(arrow_type(a).src for a in fs)
    return out


def _factor_path(idx: int, k: int) -> Tuple[int, ...]:
    if k == 1:
        return ()
    path = (1,) * idx
    return path + (0,) if idx < k - 1 else path


# ---------------------------------------------------------------------------
# Explicit normalization steps (associativity and units only).

_cat_schema_cache: Dict[str, Schema] = {}


def _cat_schema(name: str) -> Schema:
    if not _cat_schema_cache:
        for s in axioms(Theory(SELF, PLAIN)):
            if s.name in _CATEGORY_RULES:
                _cat_schema_cache[s.name] = s
    return _cat_schema_cache[name]


def _first_redex(t: Term) -> Optional[Tuple[str, Tuple[int, ...]]]:
    for pos, sub in positions(t):
        if isinstance(sub, Comp):
            if isinstance(sub.f, Comp):
                return "assoc", pos
            if isinstance(sub.f, Id):
                return "unit-left", pos
            if isinstance(sub.g, Id):
                return "unit-right", pos
    return None


def normalize_steps(t: Term) -> Tuple[List[Step], Term]:
    """Explicit steps rewriting ``t`` to ``canon(t)``."""
    steps: List[Step] = []
    cur = t
    while True:
        red = _first_redex(cur)
        if red is None:
            return steps, cur
        rule, pos = red
        applied = apply_schema(_cat_schema(rule), L2R, cur, pos)
        if applied is None:
            raise AssertionError(f"normalization redex failed: {rule} at {pos}")
        new, b = applied
        steps.append(make_step(rule, L2R, pos, b, new))
        cur = new


def _flip(direction: str) -> str:
    return R2L if direction == L2R else L2R


def invert_steps(start: Term, steps: Sequence[Step]) -> List[Step]:
    """Steps undoing ``steps`` (which rewrote ``start`` to their final)."""
    chain = [start]
    for s in steps:
        chain.append(s.result)
    out = []
    for i in range(len(steps) - 1, -1, -1):
        s = steps[i]
        out.append(Step(s.rule, _flip(s.direction), s.path, s.subst, chain[i]))
    return out


# ---------------------------------------------------------------------------
# Spine-level schema matching.


def _flatten_pattern(p: Pattern) -> List[Pattern]:
    if isinstance(p, PComp):
        return _flatten_pattern(p.f) + _flatten_pattern(p.g)
    return [p]


def _match_body(pat: Pattern, term: Term, b: Binding) -> Iterator[Binding]:
    """Match a pattern against a whole canonical term (a factor body)."""
    if isinstance(pat, PVar):
        if pat.name in b:
            if b[pat.name] == term:
                yield b
        else:
            b2 = dict(b)
            b2[pat.name] = term
            yield b2
        return
    if isinstance(pat, PAtom):
        if type(term) is pat.ctor:
            value = term.obj - pat.offset
            if value >= 0 and b.get(pat.var, value) == value:
                b2 = dict(b)
                b2[pat.var] = value
                yield b2
        return
    if isinstance(pat, PUnary):
        if type(term) is pat.ctor:
            yield from _match_body(pat.body, term.f, b)
        return
    if isinstance(pat, PComp):
        fs = factors_of(term)
        if len(fs) < 2:
            return
        whole = arrow_type(term)
        for split in range(1, len(fs)):
            left = _spine(fs[:split], arrow_type(fs[split - 1]).src)
            right = _spine(fs[split:], whole.src)
            for b2 in _match_body(pat.f, left, b):
                yield from _match_body(pat.g, right, b2)
        return
    raise TypeError(f"not a pattern: {pat!r}")


def _match_factor(pat: Pattern, factor: Term, b: Binding) -> Iterator[Binding]:
    if isinstance(pat, PAtom):
        if type(factor) is pat.ctor:
            value = factor.obj - pat.offset
            if value >= 0 and b.get(pat.var, value) == value:
                b2 = dict(b)
                b2[pat.var] = value
                yield b2
        return
    if isinstance(pat, PUnary):
        if type(factor) is pat.ctor:
            yield from _match_body(pat.body, factor.f, b)
        return
    raise AssertionError(f"unexpected spine factor pattern {pat!r}")


def _match_seq(
    pats: Sequence[Pattern], factors: Sequence[Term], b: Binding
) -> Iterator[Binding]:
    if not pats:
        if not factors:
            yield b
        return
    head = pats[0]
    if isinstance(head, PVar):
        # nonempty segment variable, only ever one per side
        for seg_len in range(1, len(factors) - len(pats) + 2):
            seg = list(factors[:seg_len])
            seg_term = _spine(seg, arrow_type(seg[-1]).src)
            b2 = dict(b)
            if head.name in b2:
                if b2[head.name] != seg_term:
                    continue
            else:
                b2[head.name] = seg_term
            yield from _match_seq(pats[1:], factors[seg_len:], b2)
        return
    if not factors:
        return
    for b2 in _match_factor(head, factors[0], b):
        yield from _match_seq(pats[1:], factors[1:], b2)


def _spine_matches(
    schema: Schema, direction: str, fs: Sequence[Term], ifaces: Sequence[int]
) -> Iterator[Tuple[int, int, Binding]]:
    """Yield (i, j, binding) for segments fs[i:j] matching the source side
    of the schema; i == j is an insertion at interface i."""
    source, _target = schema.side(direction)
    flat = _flatten_pattern(source)
    if len(flat) == 1 and isinstance(flat[0], PAtom) and flat[0].ctor is Id:
        pat = flat[0]
        for i, obj in enumerate(ifaces):
            value = obj - pat.offset
            if value >= 0:
                b = complete_binding(schema, {pat.var: value})
                if b is not None:
                    yield i, i, b
        return
    k = len(fs)
    has_segvar = any(isinstance(p, PVar) for p in flat)
    min_len = len(flat) if not has_segvar else len(flat)  # segment adds >= 1
    for i in range(k):
        max_j = k + 1
        for j in range(i + min_len, max_j):
            for b in _match_seq(flat, fs[i:j], {}):
                done = complete_binding(schema, b)
                if done is not None:
                    yield i, j, done
            if not has_segvar:
                break  # fixed-width patterns match exactly len(flat) factors


# ---------------------------------------------------------------------------
# Canonical rewriting edges.


@dataclass(frozen=True)
class Edge:
    """One spine-level rewrite, materialized for tree-level lowering.

    ``u`` is an associativity/unit variant of the source canonical term in
    which the instantiated source side sits literally at ``path``;
    ``u_after`` is ``u`` with that redex replaced.
    """

    rule: str
    direction: str
    u: Term
    path: Tuple[int, ...]
    subst: Tuple[Tuple[str, Union[int, Term]], ...]
    u_after: Term


def _embed(
    prefix: Sequence[Term], mid: Term, suffix: Sequence[Term], src_obj: int
) -> Tuple[Term, Tuple[int, ...]]:
    if prefix and suffix:
        return (
            Comp(
                _spine(prefix, arrow_type(prefix[-1]).src),
                Comp(mid, _spine(suffix, src_obj)),
            ),
            (1, 0),
        )
    if prefix:
        return Comp(_spine(prefix, arrow_type(prefix[-1]).src), mid), (1,)
    if suffix:
        return Comp(mid, _spine(suffix, src_obj)), (0,)
    return mid, ()


def canonical_neighbors(
    schemas: Sequence[Schema], c: Term
) -> List[Tuple[Term, Edge]]:
    """All one-step spine rewrites of a canonical term, with edge witnesses.

    Neighbors are canonical; duplicates may repeat under distinct edges.
    """
    out: List[Tuple[Term, Edge]] = []
    fs = factors_of(c)
    whole = arrow_type(c)
    ifaces = _interfaces(fs, whole)
    for schema in schemas:
        for direction in DIRECTIONS:
            _source, target = schema.side(direction)
            for i, j, b in _spine_matches(schema, direction, fs, ifaces):
                source_inst = instantiate(schema.side(direction)[0], b)
                u, path = _embed(fs[:i], source_inst, fs[j:], whole.src)
                u_after = replace_at(u, path, instantiate(target, b))
                edge = Edge(
                    schema.name,
                    direction,
                    u,
                    path,
                    tuple(sorted(b.items(), key=lambda kv: kv[0])),
                    u_after,
                )
                out.append((canon(u_after), edge))
    # recurse into unary factor bodies
    for idx, factor in enumerate(fs):
        if not isinstance(factor, (Ell, Neg)):
            continue
        ctor = type(factor)
        fpath = _factor_path(idx, len(fs))
        for _c_inner, inner in canonical_neighbors(schemas, factor.f):
            new_factor = ctor(inner.u)
            u = _spine(fs[:idx] + [new_factor] + fs[idx + 1:], whole.src)
            path = fpath + (0,) + inner.path
            u_after = replace_at(u, path, subterm_at(inner.u_after, inner.path))
            edge = Edge(inner.rule, inner.direction, u, path, inner.subst, u_after)
            out.append((canon(u_after), edge))
    return out


def edge_steps(edge: Edge) -> List[Step]:
    """Tree-level steps realizing an edge, from the source canonical term
    to the target canonical term."""
    to_canon, _cu = normalize_steps(edge.u)
    steps = invert_steps(edge.u, to_canon)
    steps.append(
        Step(edge.rule, edge.direction, edge.path, edge.subst, edge.u_after)
    )
    post, _cv = normalize_steps(edge.u_after)
    steps.extend(post)
    return steps


# ---------------------------------------------------------------------------
# Greedy shrinking (trivial-level proofs route through small terms).


def _greedy_reduce(
    schemas: Sequence[Schema], c: Term
) -> Tuple[List[Step], Term]:
    steps: List[Step] = []
    cur = c
    while True:
        chosen = None
        cur_size = size(cur)
        for c_next, edge in canonical_neighbors(schemas, cur):
            if size(c_next) < cur_size:
                chosen = (c_next, edge)
                break
        if chosen is None:
            return steps, cur
        cur, edge = chosen[0], chosen[1]
        steps.extend(edge_steps(edge))


# ---------------------------------------------------------------------------
# Bidirectional breadth-first search with size-cap widening.


def _bfs_round(schemas, c1, c2, cap, budget, spent):
    v1: Dict[Term, Optional[Tuple[Term, Edge]]] = {c1: None}
    v2: Dict[Term, Optional[Tuple[Term, Edge]]] = {c2: None}
    q1, q2 = deque([c1]), deque([c2])
    while q1 or q2:
        if spent >= budget:
            return None, spent, False
        if q1 and (not q2 or len(q1) <= len(q2)):
            cur_q, cur_v, other_v, side = q1, v1, v2, 1
        else:
            cur_q, cur_v, other_v, side = q2, v2, v1, 2
        node = cur_q.popleft()
        spent += 1
        for c_next, edge in canonical_neighbors(schemas, node):
            if size(c_next) > cap or c_next in cur_v:
                continue
            cur_v[c_next] = (node, edge)
            if c_next in other_v:
                return _reconstruct(c_next, v1, v2), spent, False
            cur_q.append(c_next)
    return None, spent, True


def _chain(meet, visited):
    out = []
    node = meet
    while visited[node] is not None:
        parent, edge = visited[node]
        out.append((parent, edge))
        node = parent
    return out


def _reconstruct(meet, v1, v2):
    fw_steps: List[Step] = []
    for parent, edge in reversed(_chain(meet, v1)):
        fw_steps.extend(edge_steps(edge))
    bw_steps: List[Step] = []
    for parent, edge in _chain(meet, v2):
        bw_steps.extend(invert_steps(parent, edge_steps(edge)))
    return fw_steps, bw_steps


def _search(schemas, c1, c2, budget):
    """Returns ((forward steps, backward steps), spent) or (None, spent)."""
    base = max(size(c1), size(c2))
    slack = 4
    spent = 0
    while spent < budget:
        result, spent, exhausted = _bfs_round(
            schemas, c1, c2, base + slack, budget, spent
        )
        if result is not None:
            return result, spent
        if not exhausted:
            return None, spent
        slack *= 2
    return None, spent


# ---------------------------------------------------------------------------
# The equality decision entry point.


def _diagram_mode(level: str) -> Optional[str]:
    if level in (PLAIN, K):
        return COUNT_CIRCLES
    if level == J:
        return DROP_CIRCLES
    return None


def eq_search(
    th: Theory,
    t1: Term,
    t2: Term,
    budget: int = DEFAULT_BUDGET,
    *,
    with_proof: bool = False,
) -> EqVerdict:
    """Decide equality of two same-typed terms in a theory.

    Distinct verdicts come from the diagram semantics (count mode for the
    plain and k levels, drop mode for j; never for triv).  Equal verdicts
    carry a replayable proof, except at the trivial level where the
    preorder result short-circuits the search unless ``with_proof`` asks
    for one.  Unknown reports the budget spent.

    Raises TypeMismatch when the two arrow types differ (the query is
    ill-posed rather than answerable).
    """
    th = _check_theory(th)
    if budget < 0:
        raise ValueError("budget must be >= 0")
    ty1 = type_of(th.sig, t1)
    ty2 = type_of(th.sig, t2)
    if ty1 != ty2:
        raise TypeMismatch(f"arrow types differ: {ty1} vs {ty2}")
    if th.level == TRIV and not with_proof:
        return Equal(None)
    mode = _diagram_mode(th.level)
    if mode is not None:
        d1 = interp(th.sig, t1, mode)
        d2 = interp(th.sig, t2, mode)
        if not diagram_eq(d1, d2, mode):
            return Distinct(d1, d2)
    schemas = [s for s in axioms(th) if s.name not in _CATEGORY_RULES]
    pre1, n1 = normalize_steps(t1)
    pre2, n2 = normalize_steps(t2)
    red1: List[Step] = []
    red2: List[Step] = []
    r1, r2 = n1, n2
    if th.level == TRIV:
        red1, r1 = _greedy_reduce(schemas, n1)
        red2, r2 = _greedy_reduce(schemas, n2)
    if r1 == r2:
        mid_fw: List[Step] = []
        mid_bw: List[Step] = []
    else:
        found, spent = _search(schemas, r1, r2, budget)
        if found is None:
            return Unknown(spent)
        mid_fw, mid_bw = found
    steps = (
        pre1
        + red1
        + mid_fw
        + mid_bw
        + invert_steps(n2, red2)
        + invert_steps(t2, pre2)
    )
    return Equal(Proof(t1, tuple(steps)))
