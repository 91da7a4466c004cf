"""Planar diagram semantics with circle counting.

A term denotes a Temperley-Lieb diagram: a planar perfect matching between a
row of top boundary points (the source object) and a row of bottom points
(the target), together with a count of closed circles.  Composition glues
the bottom of one diagram to the top of the other and counts the loops that
close up in the middle; equality of diagrams decides the stronger two
equational levels, with circles either counted or disregarded.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Dict, List, Tuple

from .errors import BoundaryMismatch
from .terms import (
    INV,
    SELF,
    Comp,
    Ell,
    Gamma,
    Id,
    Phi,
    Term,
    type_of,
)
from .translate import functor_FS

COUNT_CIRCLES = "count"
DROP_CIRCLES = "drop"
MODES = (COUNT_CIRCLES, DROP_CIRCLES)


@dataclass(frozen=True)
class TLDiagram:
    """Planar matching between ``src`` top and ``tgt`` bottom points.

    Points are indexed 0..src-1 left-to-right on top, then src..src+tgt-1
    left-to-right on the bottom.  ``matching[i]`` is the partner of point i.
    Planarity (the nested-parentheses condition in the boundary cycle) is
    asserted on construction.
    """

    src: int
    tgt: int
    matching: Tuple[int, ...]
    circles: int

    def __post_init__(self):
        n = self.src + self.tgt
        if self.src < 0 or self.tgt < 0 or self.circles < 0:
            raise ValueError("negative field in diagram")
        if n % 2 != 0:
            raise ValueError("src + tgt must be even")
        if len(self.matching) != n:
            raise ValueError("matching length must equal src + tgt")
        for i, j in enumerate(self.matching):
            if not 0 <= j < n or j == i or self.matching[j] != i:
                raise ValueError(f"matching is not a perfect matching at point {i}")
        if not self._is_planar():
            raise ValueError("matching is not planar")

    def _is_planar(self) -> bool:
        # boundary cycle: top left-to-right, then bottom right-to-left
        order = list(range(self.src))
        order.extend(range(self.src + self.tgt - 1, self.src - 1, -1))
        stack: List[int] = []
        for p in order:
            if stack and stack[-1] == self.matching[p]:
                stack.pop()
            else:
                stack.append(p)
        return not stack

    def point_label(self, i: int) -> str:
        return f"T{i + 1}" if i < self.src else f"B{i - self.src + 1}"

    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.matching) if i < j]


def identity_diagram(n: int) -> TLDiagram:
    matching = tuple(list(range(n, 2 * n)) + list(range(n)))
    return TLDiagram(n, n, matching, 0)


def _phi_diagram(n: int) -> TLDiagram:
    # cap on the two leftmost top points, the rest fall through
    matching = [0] * (2 * n + 2)
    matching[0], matching[1] = 1, 0
    for i in range(n):
        matching[2 + i] = n + 2 + i
        matching[n + 2 + i] = 2 + i
    return TLDiagram(n + 2, n, tuple(matching), 0)


def _gamma_diagram(n: int) -> TLDiagram:
    # mirror image: cup on the two leftmost bottom points
    matching = [0] * (2 * n + 2)
    matching[n], matching[n + 1] = n + 1, n
    for i in range(n):
        matching[i] = n + 2 + i
        matching[n + 2 + i] = i
    return TLDiagram(n, n + 2, tuple(matching), 0)


def l_shift(d: TLDiagram) -> TLDiagram:
    """Prepend one through-strand on the left; circles are unchanged."""
    src, tgt = d.src + 1, d.tgt + 1

    def shift(i: int) -> int:
        return i + 1 if i < d.src else i + 2

    matching = [0] * (src + tgt)
    matching[0] = src  # new top-left to new bottom-left
    matching[src] = 0
    for i, j in enumerate(d.matching):
        matching[shift(i)] = shift(j)
    return TLDiagram(src, tgt, tuple(matching), d.circles)


def compose(d_f: TLDiagram, d_g: TLDiagram) -> TLDiagram:
    """Composite diagram with ``d_g`` stacked above ``d_f``.

    Requires ``tgt(d_g) == src(d_f)``; the glued middle boundary is traced
    with union-find, and loops that close there add to the circle count.
    """
    if d_g.tgt != d_f.src:
        raise BoundaryMismatch(
            f"cannot glue: upper diagram has {d_g.tgt} bottom points, "
            f"lower has {d_f.src} top points"
        )
    src, tgt, mid = d_g.src, d_f.tgt, d_g.tgt

    # node ids: 0..src-1 result top, src..src+mid-1 middle, then result bottom
    def g_node(i: int) -> int:
        return i if i < d_g.src else src + (i - d_g.src)

    def f_node(i: int) -> int:
        return src + i if i < d_f.src else src + mid + (i - d_f.src)

    parent = list(range(src + mid + tgt))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(x: int, y: int) -> None:
        parent[find(x)] = find(y)

    for i, j in d_g.pairs():
        union(g_node(i), g_node(j))
    for i, j in d_f.pairs():
        union(f_node(i), f_node(j))

    groups: Dict[int, List[int]] = {}
    for node in range(src + mid + tgt):
        groups.setdefault(find(node), []).append(node)

    matching = [0] * (src + tgt)
    loops = 0
    for members in groups.values():
        ends = [n for n in members if n < src or n >= src + mid]
        if not ends:
            loops += 1
            continue
        if len(ends) != 2:
            raise AssertionError("glued strand without two endpoints")
        a, b = ends
        a = a if a < src else a - mid
        b = b if b < src else b - mid
        matching[a], matching[b] = b, a
    return TLDiagram(
        src, tgt, tuple(matching), d_f.circles + d_g.circles + loops
    )


def _interp_self(t: Term, drop: bool) -> TLDiagram:
    if isinstance(t, Id):
        d = identity_diagram(t.obj)
    elif isinstance(t, Phi):
        d = _phi_diagram(t.obj)
    elif isinstance(t, Gamma):
        d = _gamma_diagram(t.obj)
    elif isinstance(t, Ell):
        d = l_shift(_interp_self(t.f, drop))
    elif isinstance(t, Comp):
        d = compose(_interp_self(t.f, drop), _interp_self(t.g, drop))
    else:
        raise TypeError(f"not a self-signature term: {t!r}")
    if drop and d.circles:
        d = replace(d, circles=0)
    return d


def interp(sig: str, t: Term, mode: str = COUNT_CIRCLES) -> TLDiagram:
    """Diagram denotation of a term.

    Involutive terms are translated into the self signature first, then
    interpreted.  In drop mode the circle count is forced to zero after
    every construction step.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    type_of(sig, t)
    if sig == INV:
        t = functor_FS(t)
    return _interp_self(t, mode == DROP_CIRCLES)


def diagram_eq(d1: TLDiagram, d2: TLDiagram, mode: str = COUNT_CIRCLES) -> bool:
    """Equality of diagrams; circles participate only in count mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if (d1.src, d1.tgt, d1.matching) != (d2.src, d2.tgt, d2.matching):
        return False
    return d1.circles == d2.circles if mode == COUNT_CIRCLES else True


def to_json_dict(d: TLDiagram) -> dict:
    pairs = []
    for i, j in d.pairs():
        pair = sorted((d.point_label(i), d.point_label(j)))
        pairs.append(pair)
    pairs.sort()
    return {"src": d.src, "tgt": d.tgt, "pairs": pairs, "circles": d.circles}


def to_json(d: TLDiagram) -> str:
    """One-line JSON wire form of a diagram."""
    return json.dumps(to_json_dict(d), separators=(", ", ": "))


def render_ascii(d: TLDiagram) -> str:
    """Plain-text picture: '|' through-strands, cup/cap arc markers whose
    nesting reads like brackets, plus a pair legend and a circle note."""
    lines = []
    if d.src:
        lines.append(
            " ".join(
                "∪" if d.matching[i] < d.src else "|" for i in range(d.src)
            )
        )
    if d.tgt:
        lines.append(
            " ".join(
                "∩" if d.matching[d.src + j] >= d.src else "|"
                for j in range(d.tgt)
            )
        )
    if d.pairs():
        legend = " ".join(
            f"{d.point_label(i)}-{d.point_label(j)}" for i, j in d.pairs()
        )
        lines.append(f"pairs: {legend}")
    if d.circles:
        lines.append(f"(o × {d.circles})")
    return "\n".join(lines)


_SVG_STYLE = 'fill="none" stroke="black" stroke-width="2"'


def render_svg(d: TLDiagram) -> str:
    """Standalone SVG document; byte-identical across runs for equal input."""
    def x(i: int) -> int:
        col = i if i < d.src else i - d.src
        return 20 + 30 * col

    top_y, bot_y = 10, 110
    body: List[str] = []
    for i, j in d.pairs():
        if j < d.src:  # top arc
            dip = top_y + min(80, 15 + (x(j) - x(i)) // 2)
            body.append(
                f'<path d="M {x(i)} {top_y} C {x(i)} {dip}, '
                f'{x(j)} {dip}, {x(j)} {top_y}" {_SVG_STYLE}/>'
            )
        elif i >= d.src:  # bottom arc
            rise = bot_y - min(80, 15 + (x(j) - x(i)) // 2)
            body.append(
                f'<path d="M {x(i)} {bot_y} C {x(i)} {rise}, '
                f'{x(j)} {rise}, {x(j)} {bot_y}" {_SVG_STYLE}/>'
            )
        else:  # through strand
            body.append(
                f'<path d="M {x(i)} {top_y} C {x(i)} 50, '
                f'{x(j)} 70, {x(j)} {bot_y}" {_SVG_STYLE}/>'
            )
    strand_w = 40 + 30 * max(d.src, d.tgt, 1)
    for c in range(d.circles):
        body.append(
            f'<circle cx="{strand_w + 25 * c}" cy="60" r="10" {_SVG_STYLE}/>'
        )
    width = strand_w + 25 * d.circles + 20
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="120" viewBox="0 0 {width} 120">',
    ]
    parts.extend(body)
    parts.append("</svg>")
    return "\n".join(parts)
