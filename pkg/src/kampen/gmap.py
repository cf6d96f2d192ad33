"""Maps: a complex with chosen face contours and indexed boundary contours.

Attaching one face along every contour must produce a closed surface.  The
module also implements the submap operations (removing a face or a free
arc), closures, maximal arcs, and the diamond move on co-terminal edges.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

import networkx as nx

from .complex import (
    CLOSED,
    Complex,
    OrientedEdge,
    components,
    end_at_head,
    end_at_tail,
    euler_characteristic,
    is_surface,
)


class MapError(ValueError):
    """Violated map precondition."""


class Contour(NamedTuple):
    """Cyclic path given by its base vertex and its oriented edges (empty for a trivial contour)."""

    vertex: int
    edges: tuple[OrientedEdge, ...] = ()

    def inverse(self) -> "Contour":
        return Contour(self.vertex, tuple(x.inverse() for x in reversed(self.edges)))

    def __len__(self) -> int:  # type: ignore[override]
        return len(self.edges)


@dataclass(frozen=True, eq=False)
class GMap:
    complex: Complex
    face_contours: Mapping[int, tuple[int, int]] = field(default_factory=dict)
    contours: tuple[Contour, ...] = ()

    def __post_init__(self) -> None:
        fc = {f: tuple(self.face_contours.get(f, (0, 1))) for f in self.complex.faces}
        object.__setattr__(self, "face_contours", fc)
        object.__setattr__(self, "contours", tuple(Contour(c[0], tuple(OrientedEdge(*x) for x in c[1]))
                                                   for c in self.contours))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GMap):
            return NotImplemented
        return (self.complex, dict(self.face_contours), self.contours) == (
            other.complex, dict(other.face_contours), other.contours)

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_closed(self) -> bool:
        return not self.contours

    def euler(self) -> int:
        return euler_characteristic(self.complex)


def face_contour_path(m: GMap, f: int) -> tuple[OrientedEdge, ...]:
    """The contour of face ``f`` read from its chosen c-contour."""
    bd = m.complex.faces[f]
    start, d = m.face_contours[f]
    n = len(bd)
    if d > 0:
        return tuple(bd[(start + t) % n] for t in range(n))
    return tuple(bd[(start - t) % n].inverse() for t in range(n))


def face_contour_slots(m: GMap, f: int) -> list[tuple[int, int]]:
    """``(slot, traversal)`` pairs along the chosen c-contour of ``f``."""
    n = len(m.complex.faces[f])
    start, d = m.face_contours[f]
    return [((start + d * t) % n, d) for t in range(n)]


# ---------------------------------------------------------------------------
# validation and closure


@dataclass
class Report:
    problems: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems

    def add(self, msg: str) -> None:
        self.problems.append(msg)

    def render(self, what: str = "map") -> str:
        if self.ok:
            return f"valid {what}"
        return "\n".join([f"invalid {what}:"] + [f"  - {p}" for p in self.problems])


def _check_path(c: Complex, contour: Contour) -> str | None:
    if contour.vertex not in set(c.vertices):
        return f"base vertex {contour.vertex} missing"
    at = contour.vertex
    for k, x in enumerate(contour.edges):
        if x.edge not in c.edges:
            return f"edge {x.edge} missing"
        if c.tail(x) != at:
            return f"step {k} ({x}) does not start at vertex {at}"
        at = c.head(x)
    if at != contour.vertex:
        return "path is not closed"
    return None


def _attach(c: Complex, contours: Sequence[Contour]) -> tuple[Complex, list[int]]:
    faces = dict(c.faces)
    fid = c.next_id("face")
    added = []
    for con in contours:
        faces[fid] = con.edges
        added.append(fid)
        fid += 1
    return Complex(c.vertices, dict(c.edges), faces), added


def validate_map(m: GMap) -> Report:
    rep = Report()
    c = m.complex
    for f, (start, d) in m.face_contours.items():
        if not 0 <= start < len(c.faces[f]) or d not in (1, -1):
            rep.add(f"face {f}: c-contour ({start}, {d}) is not a slot and direction")
    trivial: Counter[int] = Counter()
    nontrivial = []
    for i, con in enumerate(m.contours):
        err = _check_path(c, con)
        if err:
            rep.add(f"contour {i}: {err}")
            continue
        if con.edges:
            nontrivial.append(con)
        else:
            trivial[con.vertex] += 1
    if not rep.ok:
        return rep
    for v, k in trivial.items():
        if c.degree(v) or k != 1:
            rep.add(f"trivial contour at vertex {v} is not a trivial component")
    rest = [v for v in c.vertices if v not in trivial]
    if rest:
        keep = set(rest)
        sub = Complex(tuple(rest), dict(c.edges), {f: bd for f, bd in c.faces.items()})
        closed, _ = _attach(sub, nontrivial)
        if not keep:
            return rep
        kind = is_surface(closed)
        if kind != CLOSED:
            rep.add(f"closure is {kind}, not a closed surface")
    return rep


def closure(m: GMap) -> GMap:
    """Attach one face along each contour; new faces read their contour from slot 0."""
    if any(not con.edges for con in m.contours):
        raise MapError("a trivial component has no closure")
    closed, added = _attach(m.complex, m.contours)
    fc = dict(m.face_contours)
    for f in added:
        fc[f] = (0, 1)
    return GMap(closed, fc, ())


def remove_face(m: GMap, f: int) -> GMap:
    if f not in m.complex.faces:
        raise MapError(f"no face {f}")
    path = face_contour_path(m, f)
    c = m.complex
    faces = {g: bd for g, bd in c.faces.items() if g != f}
    fc = {g: v for g, v in m.face_contours.items() if g != f}
    new = Contour(c.tail(path[0]), path)
    return GMap(Complex(c.vertices, dict(c.edges), faces), fc, m.contours + (new,))


def open_map(c: Complex) -> GMap:
    """Turn a surface with boundary into a map whose contours trace its boundary edges.

    Each contour starts on its least boundary edge, read against the face it
    bounds, and turns around each vertex through the fan of faces there.
    """
    sides = c.sides()
    bside = {e: ss[0] for e, ss in sides.items() if len(ss) == 1}
    if any(len(ss) > 2 for ss in sides.values()):
        raise MapError("an edge with more than two sides has no boundary tracing")
    used: set[int] = set()
    contours = []
    for e0 in sorted(bside):
        if e0 in used:
            continue
        f, k, _ = bside[e0]
        x = c.faces[f][k].inverse()
        path: list[OrientedEdge] = []
        while x.edge not in used:
            used.add(x.edge)
            path.append(x)
            # the slot of x's face sits at head(x); find the neighbouring slot there
            g, j, _ = bside[x.edge]
            at_tail = c.faces[g][j] == x.inverse()  # slot j starts where x ends
            for _ in range(2 * len(sides) + 2):
                n = len(c.faces[g])
                j = (j - 1) % n if at_tail else (j + 1) % n
                at_tail = not at_tail
                y = c.faces[g][j]
                ss = sides[y.edge]
                if len(ss) == 1:
                    x = y if at_tail else y.inverse()
                    break
                end = (0 if y.direction > 0 else 1) if at_tail else (1 if y.direction > 0 else 0)
                h, i, dd = next(s for s in ss if (s.face, s.slot) != (g, j))
                g, j = h, i
                at_tail = end == (0 if dd > 0 else 1)
            else:
                raise MapError("boundary tracing did not close up")
        contours.append(Contour(c.tail(path[0]), tuple(path)))
    return GMap(c, {f: (0, 1) for f in c.faces}, tuple(contours))


# ---------------------------------------------------------------------------
# arcs


@dataclass(frozen=True)
class Arc:
    path: tuple[OrientedEdge, ...]
    start: int
    kind: str  # internal | external | free
    circle: bool = False

    @property
    def edges(self) -> frozenset[int]:
        return frozenset(x.edge for x in self.path)

    def __len__(self) -> int:
        return len(self.path)


def _edge_kind(m: GMap, e: int, sides: Mapping[int, list]) -> str:
    n = len(sides[e])
    return "internal" if n >= 2 else "external" if n == 1 else "free"


def maximal_arcs(m: GMap) -> list[Arc]:
    """Maximal arcs (chains through degree-2 vertices), each tagged internal/external/free.

    A component whose vertices all have degree 2 is a circle; it is returned as
    one closed arc starting at its smallest vertex, flagged ``circle``.
    """
    c = m.complex
    deg = {v: c.degree(v) for v in c.vertices}
    at: dict[int, list[OrientedEdge]] = defaultdict(list)
    for e, (v0, v1) in c.edges.items():
        at[v0].append(OrientedEdge(e, 1))
        at[v1].append(OrientedEdge(e, -1))
    sides = c.sides()
    used: set[int] = set()
    arcs: list[Arc] = []

    def walk(x: OrientedEdge) -> list[OrientedEdge]:
        path = [x]
        while True:
            h = c.head(path[-1])
            if deg[h] != 2:
                return path
            y = next((y for y in at[h] if y != path[-1].inverse()), None)
            if y is None or y.edge in {p.edge for p in path}:
                return path
            path.append(y)

    for v in c.vertices:
        if deg[v] == 2:
            continue
        for x in sorted(at[v]):
            if x.edge in used:
                continue
            path = walk(x)
            used.update(p.edge for p in path)
            arcs.append(Arc(tuple(path), v, _edge_kind(m, x.edge, sides)))
    for e in sorted(c.edges):
        if e in used:
            continue
        v0 = c.edges[e][0]
        x = OrientedEdge(e, 1)
        path = [x]
        while c.head(path[-1]) != v0:
            h = c.head(path[-1])
            y = next(y for y in at[h] if y != path[-1].inverse())
            path.append(y)
        used.update(p.edge for p in path)
        arcs.append(Arc(tuple(path), v0, _edge_kind(m, e, sides), circle=True))
    return arcs


def _occurrences(m: GMap, arc: Sequence[OrientedEdge]) -> list[tuple[int, int, int]]:
    """``(contour, position, sign)``: ``arc`` (sign +1) or its inverse (sign -1) starts at ``position``."""
    inv = [x.inverse() for x in reversed(arc)]
    out = []
    for i, con in enumerate(m.contours):
        n = len(con.edges)
        for p in range(n):
            for sign, target in ((1, arc), (-1, inv)):
                if all(con.edges[(p + t) % n] == target[t] for t in range(len(arc))):
                    out.append((i, p, sign))
    return out


def _rotate(con: Contour, c: Complex, p: int) -> list[OrientedEdge]:
    return list(con.edges[p:] + con.edges[:p])


def remove_free_arc(m: GMap, arc: Sequence[OrientedEdge]) -> GMap:
    """Delete a free arc and recombine the contours through it.

    * one contour ``v p1 v^-1 p2`` splits into ``p1`` and ``p2``;
    * one contour ``v p1 v p2`` becomes ``p1 p2^-1``;
    * two contours ``v p1`` and ``v p2`` (either may carry ``v^-1``) merge into ``p1 p2^-1``.

    Consumed contours are dropped and the new ones appended in that order.
    """
    c = m.complex
    arc = [OrientedEdge(*x) for x in arc]
    if not arc:
        raise MapError("empty arc")
    for k in range(len(arc) - 1):
        if c.head(arc[k]) != c.tail(arc[k + 1]):
            raise MapError("arc is not a path")
    edges = {x.edge for x in arc}
    if len(edges) != len(arc):
        raise MapError("arc repeats an edge")
    sides = c.sides()
    if any(sides[e] for e in edges):
        raise MapError("arc is not free: some edge lies on a face")
    inner = [c.head(x) for x in arc[:-1]]
    if any(c.degree(v) != 2 for v in inner) or len(set(inner)) != len(inner):
        raise MapError("arc passes through a vertex of degree other than 2")
    occ = _occurrences(m, arc)
    if len(occ) != 2:
        raise MapError(f"arc occurs {len(occ)} times on the contours, expected 2")
    (i1, p1, s1), (i2, p2, s2) = occ
    L = len(arc)
    tail_v, head_v = c.tail(arc[0]), c.head(arc[-1])
    new: list[Contour] = []
    if i1 == i2:
        con = m.contours[i1]
        first = (p1, s1) if s1 == 1 else (p2, s2)
        if s1 == s2 == -1:
            con = con.inverse()
            occ2 = _occurrences(GMap(c, m.face_contours, (con,)), arc)
            (_, p1, s1), (_, p2, s2) = occ2
            first = (p1, s1)
        rot = _rotate(con, c, first[0])
        other = (p2 if first[0] == p1 else p1) - first[0]
        other %= len(rot)
        mid = rot[L:other]
        end = rot[other + L:]
        if s1 != s2:
            new = [Contour(head_v, tuple(mid)), Contour(tail_v, tuple(end))]
        else:
            back = [x.inverse() for x in reversed(end)]
            new = [Contour(head_v, tuple(mid + back))]
        drop = {i1}
    else:
        ca, cb = m.contours[i1], m.contours[i2]
        if s1 == -1:
            ca, p1 = ca.inverse(), (len(ca.edges) - p1 - L) % len(ca.edges)
        if s2 == -1:
            cb, p2 = cb.inverse(), (len(cb.edges) - p2 - L) % len(cb.edges)
        ra, rb = _rotate(ca, c, p1)[L:], _rotate(cb, c, p2)[L:]
        back = [x.inverse() for x in reversed(rb)]
        new = [Contour(head_v, tuple(ra + back))]
        drop = {i1, i2}
    kept = [con for i, con in enumerate(m.contours) if i not in drop]
    new_edges = {e: w for e, w in c.edges.items() if e not in edges}
    new_vertices = [v for v in c.vertices if v not in set(inner)]
    return GMap(Complex(tuple(new_vertices), new_edges, dict(c.faces)), dict(m.face_contours), tuple(kept + new))


# ---------------------------------------------------------------------------
# gluing polygons


class SideRef(NamedTuple):
    face: int
    slot: int


def glue_polygons(
    sizes: Mapping[int, int],
    pairs: Iterable[tuple[SideRef, SideRef, bool]],
    edge_ids: Sequence[int] | None = None,
    vertex_hint: Mapping[SideRef, int] | None = None,
    corner_joins: Iterable[tuple[SideRef, SideRef]] = (),
) -> Complex:
    """Build the complex obtained by gluing polygon sides in pairs.

    ``sizes[f]`` is the number of sides of polygon ``f``; each pair
    ``(s, t, same)`` identifies two sides, with ``same`` true when their
    forward traversals run the same way along the resulting edge.  Unpaired
    sides become boundary edges.  The edge of the ``k``-th pair gets
    ``edge_ids[k]``; ``vertex_hint`` maps corners to preferred vertex ids.
    ``corner_joins`` lists extra corner identifications (corner ``k`` of a
    polygon is the tail of its side ``k``).
    """
    pairs = list(pairs)
    parent: dict[SideRef, SideRef] = {}

    def find(x: SideRef) -> SideRef:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: SideRef, y: SideRef) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    def head(s: SideRef) -> SideRef:
        return SideRef(s.face, (s.slot + 1) % sizes[s.face])

    seen: set[SideRef] = set()
    for f, n in sizes.items():
        for k in range(n):
            find(SideRef(f, k))
    for s, t, same in pairs:
        for x in (s, t):
            if x in seen:
                raise MapError(f"side {x} glued twice")
            if x.face not in sizes or not 0 <= x.slot < sizes[x.face]:
                raise MapError(f"side {x} does not exist")
            seen.add(x)
        if same:
            union(s, t)
            union(head(s), head(t))
        else:
            union(s, head(t))
            union(head(s), t)
    for x, y in corner_joins:
        union(x, y)
    classes: dict[SideRef, list[SideRef]] = defaultdict(list)
    for f, n in sizes.items():
        for k in range(n):
            classes[find(SideRef(f, k))].append(SideRef(f, k))
    vid: dict[SideRef, int] = {}
    taken: set[int] = set()
    pending = []
    for root in sorted(classes):
        votes = Counter(vertex_hint[x] for x in classes[root] if vertex_hint and x in vertex_hint)
        choice = next((v for v, _ in sorted(votes.items(), key=lambda kv: (-kv[1], kv[0])) if v not in taken), None)
        if choice is None:
            pending.append(root)
        else:
            vid[root] = choice
            taken.add(choice)
    nxt = max(taken, default=-1) + 1
    for root in pending:
        vid[root] = nxt
        taken.add(nxt)
        nxt += 1

    slot_edge: dict[SideRef, OrientedEdge] = {}
    edges: dict[int, tuple[int, int]] = {}
    ids = list(edge_ids) if edge_ids is not None else list(range(len(pairs)))
    for k, (s, t, same) in enumerate(pairs):
        e = ids[k]
        edges[e] = (vid[find(s)], vid[find(head(s))])
        slot_edge[s] = OrientedEdge(e, 1)
        slot_edge[t] = OrientedEdge(e, 1 if same else -1)
    nxt_e = max(edges, default=-1) + 1
    for f, n in sizes.items():
        for k in range(n):
            s = SideRef(f, k)
            if s not in slot_edge:
                edges[nxt_e] = (vid[find(s)], vid[find(head(s))])
                slot_edge[s] = OrientedEdge(nxt_e, 1)
                nxt_e += 1
    faces = {f: tuple(slot_edge[SideRef(f, k)] for k in range(n)) for f, n in sizes.items()}
    return Complex(tuple(sorted(set(vid.values()))), edges, faces)


def side_pairs(c: Complex) -> dict[int, tuple[SideRef, SideRef, bool]]:
    """Gluing data of a complex in which every edge has exactly two face sides."""
    out = {}
    for e, ss in c.sides().items():
        if len(ss) != 2:
            raise MapError(f"edge {e} has {len(ss)} sides; a closed map needs 2")
        (f1, k1, d1), (f2, k2, d2) = ss
        out[e] = (SideRef(f1, k1), SideRef(f2, k2), d1 == d2)
    return out


def _regluing(c: Complex, pairs: Mapping[int, tuple[SideRef, SideRef, bool]],
              orient: Mapping[int, tuple[SideRef, int]]) -> Complex:
    """Re-glue ``c``; edge ``e`` runs forward along side ``orient[e][0]`` traversed per ``orient[e][1]``."""
    hint = {SideRef(f, k): c.corner_vertex(f, k) for f, bd in c.faces.items() for k in range(len(bd))}
    sizes = {f: len(bd) for f, bd in c.faces.items()}
    ids = sorted(pairs)
    out = glue_polygons(sizes, [pairs[e] for e in ids], ids, hint)
    for e, (side, t) in orient.items():
        out = _align_new_edge(out, e, side, t)
    return out


# ---------------------------------------------------------------------------
# diamond moves

PROPER = "proper"
UNTWISTING = "untwisting"
DISCONNECTING = "disconnecting"


@dataclass(frozen=True)
class DiamondInfo:
    kind: str
    loop_case: bool
    vertex_delta: int
    euler_delta: int
    component_delta: int


def _arc_end(c: Complex, f: int, k: int, at_head: bool) -> tuple[tuple[int, int], str]:
    """The link arc (corner) and arc end met by slot ``(f, k)`` at its head or tail."""
    n = len(c.faces[f])
    if at_head:
        return (f, (k + 1) % n), "prev"
    return (f, k), "next"


def _node_of(c: Complex, f: int, k: int, end: str) -> tuple[int, int]:
    """Link node (edge, end) of the arc end ``end`` of corner ``(f, k)``."""
    bd = c.faces[f]
    if end == "prev":
        x = bd[k - 1]
        return (x.edge, end_at_head(x))
    x = bd[k]
    return (x.edge, end_at_tail(x))


def _slot_of(c: Complex, f: int, k: int, end: str) -> int:
    return (k - 1) % len(c.faces[f]) if end == "prev" else k


def _corners_at(c: Complex, v: int) -> list[tuple[int, int]]:
    return [(f, k) for f, bd in c.faces.items() for k in range(len(bd)) if c.tail(bd[k]) == v]


def link_orientation(c: Complex, v: int) -> dict[tuple[tuple[int, int], str], bool]:
    """Orient the link circle of ``v``: maps each arc end to True when it is the arc's head.

    The walk starts at the smallest link node, leaves along its smallest arc
    and goes round the circle.
    """
    corners = _corners_at(c, v)
    by_node: dict[tuple[int, int], list[tuple[tuple[int, int], str]]] = defaultdict(list)
    for f, k in corners:
        for end in ("prev", "next"):
            by_node[_node_of(c, f, k, end)].append(((f, k), end))
    if not by_node:
        raise MapError(f"vertex {v} has an empty link")
    out: dict[tuple[tuple[int, int], str], bool] = {}
    start = min(by_node)
    arc, end = min(by_node[start])
    while (arc, end) not in out:
        other = "next" if end == "prev" else "prev"
        out[(arc, end)] = False
        out[(arc, other)] = True
        node = _node_of(c, arc[0], arc[1], other)
        nxt = [ae for ae in by_node[node] if ae != (arc, other)]
        if not nxt:
            break
        arc, end = nxt[0]
    if len(out) != 2 * len(corners):
        raise MapError(f"link of vertex {v} is not a circle")
    return out


def _preimages(c: Complex, x: OrientedEdge) -> list[tuple[int, int, int]]:
    """Oriented c-edges ``(face, slot, traversal)`` whose image is ``x``."""
    return [(f, k, d * x.direction) for f, k, d in c.sides()[x.edge]]


def orientation_switches(c: Complex, e1: OrientedEdge, e2: OrientedEdge) -> bool:
    """Whether transporting a local orientation along ``e1 e2^-1`` reverses it.

    A face orientation is carried around the link of the common head from
    ``e1`` to ``e2``, along ``e2`` backwards, and around the link of the tail
    back to ``e1``.
    """
    sides = c.sides()

    def sides_at(node: tuple[int, int]) -> list[tuple[int, int, int]]:
        e, end = node
        return [(f, k, d) for f, k, d in sides[e]]

    def walk(v: int, start_side: tuple[int, int, int], start_node: tuple[int, int], o: int,
             goal: tuple[int, int]) -> tuple[tuple[int, int, int], int]:
        f, k, d = start_side
        at_head = start_node[1] == (1 if d > 0 else 0)
        arc, end = _arc_end(c, f, k, at_head)
        for _ in range(4 * sum(len(bd) for bd in c.faces.values()) + 4):
            other = "next" if end == "prev" else "prev"
            node = _node_of(c, arc[0], arc[1], other)
            slot = _slot_of(c, arc[0], arc[1], other)
            here = (arc[0], slot, c.faces[arc[0]][slot].direction)
            if node == goal:
                return here, o
            cands = []
            for f2, k2, d2 in sides_at(node):
                a2, e2_ = _arc_end(c, f2, k2, node[1] == (1 if d2 > 0 else 0))
                if (a2, e2_) != (arc, other):
                    cands.append(((f2, k2, d2), a2, e2_))
            (f2, k2, d2), arc, end = cands[0]
            o = -o * here[2] * d2
        raise MapError("link walk did not reach its goal")

    v = c.head(e1)
    u = c.tail(e2)
    s0 = sides[e1.edge][0]
    start = (s0.face, s0.slot, s0.direction)
    l1 = (e1.edge, end_at_head(e1))
    l2 = (e2.edge, end_at_head(e2))
    tau, o = walk(v, start, l1, 1, l2)
    l2t = (e2.edge, end_at_tail(e2))
    l1t = (e1.edge, end_at_tail(e1))
    rho, o = walk(u, tau, l2t, o, l1t)
    if (rho[0], rho[1]) != (start[0], start[1]):
        o = -o * rho[2] * start[2]
    return o != 1


def link_cycle(c: Complex, v: int) -> list[tuple[int, int]]:
    """Link nodes of ``v`` in cyclic order, starting from the smallest."""
    adj: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
    for f, k in _corners_at(c, v):
        p, q = _node_of(c, f, k, "prev"), _node_of(c, f, k, "next")
        adj[p].append(q)
        adj[q].append(p)
    if not adj:
        return []
    start = min(adj)
    order, prev, cur = [start], None, start
    while True:
        nxt = next((x for x in adj[cur] if x != prev), adj[cur][0])
        if nxt == start or len(order) > len(adj):
            return order
        order.append(nxt)
        prev, cur = cur, nxt


def _separated(order: Sequence[tuple[int, int]], a: tuple[int, int], b: tuple[int, int],
               x: tuple[int, int], y: tuple[int, int]) -> bool:
    """Whether nodes ``a, b`` separate ``x, y`` on the cyclic ``order``."""
    i, j = sorted((order.index(a), order.index(b)))
    return (i < order.index(x) < j) != (i < order.index(y) < j)


def classify_diamond(c: Complex, e1: OrientedEdge, e2: OrientedEdge) -> tuple[str, bool]:
    """Kind of the diamond move along ``e1, e2`` and whether both edges are loops.

    Distinct tails make the move proper.  Otherwise the move untwists when
    ``e1 e2^-1`` switches orientation and disconnects when it does not.  For
    two loops the four link nodes of the loop ends lie on one circle; if the
    head ends separate the tail ends the re-gluing keeps the vertex count and
    the move is proper.
    """
    loops = c.tail(e1) == c.head(e1) and c.tail(e2) == c.head(e2)
    if c.tail(e1) != c.tail(e2):
        return PROPER, loops
    if loops:
        order = link_cycle(c, c.head(e1))
        heads = ((e1.edge, end_at_head(e1)), (e2.edge, end_at_head(e2)))
        tails = ((e1.edge, end_at_tail(e1)), (e2.edge, end_at_tail(e2)))
        if _separated(order, *heads, *tails):
            return PROPER, loops
    return (UNTWISTING if orientation_switches(c, e1, e2) else DISCONNECTING), loops


def _diamond_closed(m: GMap, e1: OrientedEdge, e2: OrientedEdge) -> GMap:
    c = m.complex
    v = c.head(e1)
    lo = link_orientation(c, v)

    def split(x: OrientedEdge) -> tuple[tuple[int, int, int], tuple[int, int, int]]:
        pre = _preimages(c, x)
        if len(pre) != 2:
            raise MapError(f"edge {x.edge} does not have two sides")
        pos = []
        for f, k, t in pre:
            arc_end = _arc_end(c, f, k, at_head=(t > 0))
            pos.append(lo[arc_end])
        if pos[0] == pos[1]:
            raise MapError("link orientation does not separate the two pre-images")
        return (pre[0], pre[1]) if pos[0] else (pre[1], pre[0])

    a, b = split(e1)
    cc, d = split(e2)
    pairs = side_pairs(c)
    pairs[e1.edge] = (SideRef(a[0], a[1]), SideRef(d[0], d[1]), a[2] == d[2])
    pairs[e2.edge] = (SideRef(b[0], b[1]), SideRef(cc[0], cc[1]), b[2] == cc[2])
    orient = {e: (SideRef(f, k), d_) for e, ((f, k, d_), _) in c.sides().items()}
    # both new edges run in the direction of e1: the images of a and b
    orient[e1.edge] = (SideRef(a[0], a[1]), a[2])
    orient[e2.edge] = (SideRef(b[0], b[1]), b[2])
    return GMap(_regluing(c, pairs, orient), dict(m.face_contours), ())


def _align_new_edge(c: Complex, e: int, side: tuple[int, int], traversal: int) -> Complex:
    """Flip edge ``e`` if needed so that traversing ``side`` per ``traversal`` runs forward."""
    f, k = side
    x = c.faces[f][k]
    if x.direction == traversal:
        return c
    v0, v1 = c.edges[e]
    edges = dict(c.edges)
    edges[e] = (v1, v0)
    faces = {g: tuple(OrientedEdge(y.edge, -y.direction) if y.edge == e else y for y in bd)
             for g, bd in c.faces.items()}
    return Complex(c.vertices, edges, faces)


def diamond_move(m: GMap, e1: OrientedEdge, e2: OrientedEdge) -> tuple[GMap, DiamondInfo]:
    """Re-glue the four c-edges over two co-terminal oriented edges.

    With ``a, b`` the positive and negative pre-images of ``e1`` and ``c, d``
    those of ``e2`` (signs read from the link orientation of the common head),
    the move makes ``a`` contiguous with ``d`` and ``b`` with ``c``.  The new
    edges keep the ids of ``e1``/``e2`` and both run in the direction of
    ``e1``.  Open maps are closed first and the added faces removed again.
    """
    e1, e2 = OrientedEdge(*e1), OrientedEdge(*e2)
    c0 = m.complex
    for x in (e1, e2):
        if x.edge not in c0.edges:
            raise MapError(f"no edge {x.edge}")
    if e1.edge == e2.edge:
        raise MapError("identical edges")
    if c0.head(e1) != c0.head(e2):
        raise MapError("edges lack a common head")
    work = closure(m) if m.contours else m
    n_faces = len(m.complex.faces)
    kind, loops = classify_diamond(work.complex, e1, e2)
    moved = _diamond_closed(work, e1, e2)
    if m.contours:
        added = sorted(moved.complex.faces)[n_faces:]
        for f in added:
            moved = remove_face(moved, f)
    before, after = m.complex, moved.complex
    info = DiamondInfo(
        kind=kind,
        loop_case=loops,
        vertex_delta=len(after.vertices) - len(before.vertices),
        euler_delta=euler_characteristic(after) - euler_characteristic(before),
        component_delta=len(components(after)) - len(components(before)),
    )
    return moved, info


def co_terminal_pairs(c: Complex) -> list[tuple[OrientedEdge, OrientedEdge]]:
    """All ordered pairs of oriented edges on distinct edges sharing a head."""
    by_head: dict[int, list[OrientedEdge]] = defaultdict(list)
    for e in c.edges:
        for d in (1, -1):
            x = OrientedEdge(e, d)
            by_head[c.head(x)].append(x)
    out = []
    for xs in by_head.values():
        for x in xs:
            for y in xs:
                if x.edge != y.edge:
                    out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# essential isomorphism


def incidence_graph(m: GMap, labels: Mapping[int, str] | None = None) -> nx.MultiGraph:
    """Graph encoding of a map, invariant under renaming, edge flips, face reflection and contour moves."""
    from .words import inverse_letter

    c = m.complex
    g = nx.MultiGraph()
    for v in c.vertices:
        g.add_node(("v", v), t="V")
    for e, (v0, v1) in c.edges.items():
        g.add_node(("e", e), t="E")
        for end, w in ((0, v0), (1, v1)):
            lab = ""
            if labels is not None:
                lab = labels[e] if end == 1 else inverse_letter(labels[e])
            g.add_node(("x", e, end), t="X", lab=lab)
            g.add_edge(("x", e, end), ("e", e))
            g.add_edge(("x", e, end), ("v", w))

    def cycle(tag: tuple, path: Sequence[OrientedEdge], base: int) -> None:
        g.add_node(tag, t="F" if tag[0] == "f" else "K")
        n = len(path)
        if n == 0:
            g.add_node(tag + ("j", 0), t="J")
            g.add_edge(tag, tag + ("j", 0))
            g.add_edge(tag + ("j", 0), ("v", base))
            return
        for k, x in enumerate(path):
            s = tag + ("s", k)
            g.add_node(s, t="S")
            g.add_edge(tag, s)
            g.add_edge(s, ("e", x.edge))
            j = tag + ("j", k)
            g.add_node(j, t="J")
            prev = path[k - 1]
            g.add_edge(j, ("x", prev.edge, end_at_head(prev)))
            g.add_edge(j, ("x", x.edge, end_at_tail(x)))
            g.add_edge(j, s)
            g.add_edge(j, tag + ("s", (k - 1) % n))

    for f, bd in c.faces.items():
        cycle(("f", f), bd, c.tail(bd[0]))
    for i, con in enumerate(m.contours):
        cycle(("k", i), con.edges, con.vertex)
    return g


def essentially_isomorphic(m1: GMap, m2: GMap, labels1: Mapping[int, str] | None = None,
                           labels2: Mapping[int, str] | None = None) -> bool:
    g1, g2 = incidence_graph(m1, labels1), incidence_graph(m2, labels2)
    if g1.number_of_nodes() != g2.number_of_nodes() or g1.number_of_edges() != g2.number_of_edges():
        return False
    if canonical_hash(m1, labels1) != canonical_hash(m2, labels2):
        return False
    return nx.is_isomorphic(g1, g2, node_match=lambda a, b: a.get("t") == b.get("t") and a.get("lab") == b.get("lab"))


def canonical_hash(m: GMap, labels: Mapping[int, str] | None = None) -> str:
    g = incidence_graph(m, labels)
    simple = nx.Graph()
    for n, data in g.nodes(data=True):
        simple.add_node(n, key=data.get("t", "") + data.get("lab", ""))
    for a, b in g.edges():
        if simple.has_edge(a, b):
            simple[a][b]["mult"] = str(int(simple[a][b]["mult"]) + 1)
        else:
            simple.add_edge(a, b, mult="1")
    return nx.weisfeiler_lehman_graph_hash(simple, node_attr="key", edge_attr="mult", iterations=4)
