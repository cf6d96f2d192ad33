"""Combinatorial 2-complexes: cells, links, Euler characteristic, surface type.

A face is stored as the cyclic sequence of oriented edges read along its
boundary; slot ``k`` of a face is its ``k``-th side and corner ``k`` is the
tail vertex of slot ``k``.  Edge ``e`` goes from ``edges[e][0]`` (end 0) to
``edges[e][1]`` (end 1).
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence


class ComplexError(ValueError):
    """Invalid cell references or violated move preconditions."""


class OrientedEdge(NamedTuple):
    edge: int
    direction: int = 1

    def inverse(self) -> "OrientedEdge":
        return OrientedEdge(self.edge, -self.direction)

    def __str__(self) -> str:
        return f"{'+' if self.direction > 0 else '-'}{self.edge}"


class Side(NamedTuple):
    """Slot ``slot`` of face ``face``, which traverses its edge in ``direction``."""

    face: int
    slot: int
    direction: int


def oe(token: str | int) -> OrientedEdge:
    """Parse ``"+3"`` / ``"-3"`` (or a bare int meaning forward)."""
    if isinstance(token, int):
        return OrientedEdge(token, 1)
    token = token.strip()
    if token[:1] in "+-" and token[1:].isdigit():
        return OrientedEdge(int(token[1:]), 1 if token[0] == "+" else -1)
    if token.isdigit():
        return OrientedEdge(int(token), 1)
    raise ComplexError(f"bad oriented edge {token!r}")


@dataclass(frozen=True, eq=False)
class Complex:
    vertices: tuple[int, ...]
    edges: Mapping[int, tuple[int, int]]
    faces: Mapping[int, tuple[OrientedEdge, ...]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(sorted(set(self.vertices))))
        object.__setattr__(self, "edges", {e: tuple(self.edges[e]) for e in sorted(self.edges)})
        object.__setattr__(
            self, "faces", {f: tuple(OrientedEdge(*x) for x in self.faces[f]) for f in sorted(self.faces)}
        )
        vs = set(self.vertices)
        for e, (v0, v1) in self.edges.items():
            if v0 not in vs or v1 not in vs:
                raise ComplexError(f"edge {e} references a missing vertex")
        for f, bd in self.faces.items():
            if not bd:
                raise ComplexError(f"face {f} has an empty boundary")
            for x in bd:
                if x.edge not in self.edges or x.direction not in (1, -1):
                    raise ComplexError(f"face {f} references bad oriented edge {x}")
            for k in range(len(bd)):
                if self.head(bd[k - 1]) != self.tail(bd[k]):
                    raise ComplexError(f"face {f}: slots {(k - 1) % len(bd)} and {k} are not consecutive")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Complex):
            return NotImplemented
        return (self.vertices, dict(self.edges), dict(self.faces)) == (
            other.vertices, dict(other.edges), dict(other.faces))

    def __hash__(self) -> int:
        return hash((self.vertices, tuple(self.edges.items()), tuple(self.faces.items())))

    # -- incidence ---------------------------------------------------------

    def tail(self, x: OrientedEdge) -> int:
        v0, v1 = self.edges[x.edge]
        return v0 if x.direction > 0 else v1

    def head(self, x: OrientedEdge) -> int:
        v0, v1 = self.edges[x.edge]
        return v1 if x.direction > 0 else v0

    def sides(self) -> dict[int, list[Side]]:
        """Face slots lying on each edge (every edge present, possibly with no sides)."""
        out: dict[int, list[Side]] = {e: [] for e in self.edges}
        for f, bd in self.faces.items():
            for k, x in enumerate(bd):
                out[x.edge].append(Side(f, k, x.direction))
        return out

    def degree(self, v: int) -> int:
        return sum((v0 == v) + (v1 == v) for v0, v1 in self.edges.values())

    def corner_vertex(self, f: int, k: int) -> int:
        return self.tail(self.faces[f][k])

    def next_id(self, kind: str) -> int:
        pool = {"vertex": self.vertices, "edge": self.edges, "face": self.faces}[kind]
        return max(pool, default=-1) + 1

    def with_cells(self, vertices: Iterable[int] | None = None, edges: Mapping[int, tuple[int, int]] | None = None,
                   faces: Mapping[int, Sequence[OrientedEdge]] | None = None) -> "Complex":
        return Complex(
            tuple(self.vertices if vertices is None else vertices),
            dict(self.edges if edges is None else edges),
            dict(self.faces if faces is None else faces),
        )


def end_at_tail(x: OrientedEdge) -> int:
    """Which end (0 or 1) of the edge is the tail of ``x``."""
    return 0 if x.direction > 0 else 1


def end_at_head(x: OrientedEdge) -> int:
    return 1 if x.direction > 0 else 0


def euler_characteristic(c: Complex) -> int:
    return len(c.vertices) - len(c.edges) + len(c.faces)


# ---------------------------------------------------------------------------
# links


@dataclass(frozen=True)
class Link:
    """Link of a vertex: vertices are (edge, end) pairs, edges are (face, corner) pairs."""

    vertex: int
    nodes: tuple[tuple[int, int], ...]
    arcs: tuple[tuple[tuple[int, int], tuple[int, int], tuple[int, int]], ...]

    def degrees(self) -> dict[tuple[int, int], int]:
        deg = {n: 0 for n in self.nodes}
        for _, p, q in self.arcs:
            deg[p] += 1
            deg[q] += 1
        return deg

    def is_connected(self) -> bool:
        if not self.nodes:
            return False
        adj: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
        for _, p, q in self.arcs:
            adj[p].append(q)
            adj[q].append(p)
        seen = {self.nodes[0]}
        stack = [self.nodes[0]]
        while stack:
            for m in adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return len(seen) == len(self.nodes)

    def is_circle(self) -> bool:
        return self.is_connected() and all(d == 2 for d in self.degrees().values())

    def is_segment(self) -> bool:
        if not self.arcs or not self.is_connected():
            return False
        deg = sorted(self.degrees().values())
        return deg[:2] == [1, 1] and all(d == 2 for d in deg[2:])


def link(c: Complex, v: int) -> Link:
    if v not in set(c.vertices):
        raise ComplexError(f"no vertex {v}")
    nodes = []
    for e, (v0, v1) in c.edges.items():
        if v0 == v:
            nodes.append((e, 0))
        if v1 == v:
            nodes.append((e, 1))
    arcs = []
    for f, bd in c.faces.items():
        for k in range(len(bd)):
            if c.tail(bd[k]) != v:
                continue
            prev = bd[k - 1]
            arcs.append(((f, k), (prev.edge, end_at_head(prev)), (bd[k].edge, end_at_tail(bd[k]))))
    return Link(v, tuple(nodes), tuple(arcs))


CLOSED = "closed-surface"
WITH_BOUNDARY = "surface-with-boundary"
NOT_SURFACE = "not-surface"


def is_surface(c: Complex) -> str:
    if not c.vertices:
        raise ComplexError("empty complex")
    closed = True
    for v in c.vertices:
        lk = link(c, v)
        if lk.is_circle():
            continue
        if lk.is_segment():
            closed = False
            continue
        return NOT_SURFACE
    return CLOSED if closed else WITH_BOUNDARY


# ---------------------------------------------------------------------------
# global structure


def components(c: Complex) -> list[set[int]]:
    """Vertex sets of the connected components (faces only join already-joined vertices)."""
    parent = {v: v for v in c.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for v0, v1 in c.edges.values():
        parent[find(v0)] = find(v1)
    groups: dict[int, set[int]] = defaultdict(set)
    for v in c.vertices:
        groups[find(v)].add(v)
    return sorted(groups.values(), key=min)


def subcomplex_on(c: Complex, verts: set[int]) -> Complex:
    edges = {e: ends for e, ends in c.edges.items() if ends[0] in verts}
    faces = {f: bd for f, bd in c.faces.items() if bd[0].edge in edges}
    return Complex(tuple(verts), edges, faces)


def face_orientation(c: Complex) -> dict[int, int] | None:
    """Coherent orientations (+1/-1 per face) if they exist, else ``None``.

    Two sides of an edge are coherent when they induce opposite directions on it.
    """
    sides = c.sides()
    orient: dict[int, int] = {}
    by_face: dict[int, list[int]] = defaultdict(list)
    for f, bd in c.faces.items():
        for x in bd:
            by_face[f].append(x.edge)
    for start in c.faces:
        if start in orient:
            continue
        orient[start] = 1
        stack = [start]
        while stack:
            f = stack.pop()
            for e in by_face[f]:
                ss = sides[e]
                if len(ss) != 2:
                    continue
                (f1, _, d1), (f2, _, d2) = ss
                if f1 == f2:
                    if d1 == d2:
                        return None
                    continue
                g, dg, df = (f2, d2, d1) if f1 == f else (f1, d1, d2)
                want = -orient[f] * df * dg
                if g in orient:
                    if orient[g] != want:
                        return None
                else:
                    orient[g] = want
                    stack.append(g)
    return orient


def boundary_component_count(c: Complex) -> int:
    sides = c.sides()
    bedges = [e for e, ss in sides.items() if len(ss) == 1]
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in bedges:
        v0, v1 = c.edges[e]
        parent[find(v0)] = find(v1)
    return len({find(v) for v in parent})


@dataclass(frozen=True)
class SurfaceClass:
    closed: bool
    orientable: bool
    euler: int
    boundary_components: int
    genus_or_crosscaps: int

    def describe(self) -> str:
        kind = "closed" if self.closed else f"with {self.boundary_components} boundary component(s)"
        if self.orientable:
            return f"orientable surface, genus {self.genus_or_crosscaps}, {kind}, euler {self.euler}"
        return f"non-orientable surface, {self.genus_or_crosscaps} crosscap(s), {kind}, euler {self.euler}"


def classify_surface(c: Complex) -> SurfaceClass:
    kind = is_surface(c)
    if kind == NOT_SURFACE:
        raise ComplexError("complex is not a surface")
    if len(components(c)) != 1:
        raise ComplexError("complex is not connected")
    chi = euler_characteristic(c)
    b = boundary_component_count(c)
    orientable = face_orientation(c) is not None
    capped = 2 - chi - b
    if orientable:
        if capped % 2:
            raise ComplexError("inconsistent orientable surface data")
        return SurfaceClass(kind == CLOSED, True, chi, b, capped // 2)
    return SurfaceClass(kind == CLOSED, False, chi, b, capped)


# ---------------------------------------------------------------------------
# subdivision moves and their inverses


def _replace_in_faces(c: Complex, e: int, fwd: Sequence[OrientedEdge]) -> dict[int, tuple[OrientedEdge, ...]]:
    """Replace every occurrence of edge ``e`` by the path ``fwd`` (reversed for backward slots)."""
    back = [x.inverse() for x in reversed(fwd)]
    faces = {}
    for f, bd in c.faces.items():
        out: list[OrientedEdge] = []
        for x in bd:
            if x.edge == e:
                out.extend(fwd if x.direction > 0 else back)
            else:
                out.append(x)
        faces[f] = tuple(out)
    return faces


def divide_edge(c: Complex, e: int) -> Complex:
    """Split edge ``e`` by a new vertex into ``e`` followed by a new edge."""
    if e not in c.edges:
        raise ComplexError(f"no edge {e}")
    v0, v1 = c.edges[e]
    nv, ne = c.next_id("vertex"), c.next_id("edge")
    edges = dict(c.edges)
    edges[e] = (v0, nv)
    edges[ne] = (nv, v1)
    faces = _replace_in_faces(c, e, [OrientedEdge(e, 1), OrientedEdge(ne, 1)])
    return Complex(c.vertices + (nv,), edges, faces)


def merge_edges(c: Complex, v: int) -> Complex:
    """Inverse of :func:`divide_edge`: erase a degree-2 vertex between two distinct edges."""
    ends = [(e, k) for e, ends_ in c.edges.items() for k, w in enumerate(ends_) if w == v]
    if len(ends) != 2 or ends[0][0] == ends[1][0]:
        raise ComplexError(f"vertex {v} is not an interior vertex of two distinct edges")
    (e1, k1), (e2, k2) = ends
    x1 = OrientedEdge(e1, 1 if k1 == 1 else -1)  # ends at v
    x2 = OrientedEdge(e2, 1 if k2 == 0 else -1)  # starts at v
    edges = {k: w for k, w in c.edges.items() if k != e2}
    edges[e1] = (c.tail(x1), c.head(x2))  # new e1 reads x1 x2
    through = {(x1, x2): OrientedEdge(e1, 1), (x2.inverse(), x1.inverse()): OrientedEdge(e1, -1)}
    faces = {}
    for f, bd in c.faces.items():
        n = len(bd)
        drop: set[int] = set()
        repl: dict[int, OrientedEdge] = {}
        for k in range(n):
            if c.head(bd[k]) != v or bd[k].edge not in (e1, e2):
                continue
            pair = (bd[k], bd[(k + 1) % n])
            if pair not in through:
                raise ComplexError(f"face {f} turns back at vertex {v}")
            repl[k] = through[pair]
            drop.add((k + 1) % n)
        faces[f] = tuple(repl.get(k, bd[k]) for k in range(n) if k not in drop)
    return Complex(tuple(w for w in c.vertices if w != v), edges, faces)


def divide_face(c: Complex, f: int, i: int, j: int) -> Complex:
    """Split face ``f`` by a new edge from corner ``i`` to corner ``j`` (``i != j``)."""
    if f not in c.faces:
        raise ComplexError(f"no face {f}")
    bd = c.faces[f]
    n = len(bd)
    if not (0 <= i < n and 0 <= j < n) or i == j:
        raise ComplexError(f"corners {i}, {j} do not name two distinct corners of face {f}")
    ne, nf = c.next_id("edge"), c.next_id("face")
    vi, vj = c.corner_vertex(f, i), c.corner_vertex(f, j)
    edges = dict(c.edges)
    edges[ne] = (vj, vi)
    first = [bd[(i + k) % n] for k in range((j - i) % n)]  # from corner i to corner j
    second = [bd[(j + k) % n] for k in range((i - j) % n)]  # from corner j to corner i
    faces = dict(c.faces)
    faces[f] = tuple(first + [OrientedEdge(ne, 1)])
    faces[nf] = tuple(second + [OrientedEdge(ne, -1)])
    return Complex(c.vertices, edges, faces)


def merge_faces(c: Complex, e: int) -> Complex:
    """Inverse of :func:`divide_face`: delete an edge whose two sides lie on distinct faces."""
    ss = c.sides()[e]
    if len(ss) != 2 or ss[0].face == ss[1].face:
        raise ComplexError(f"edge {e} does not separate two distinct faces")
    v0, v1 = c.edges[e]
    if (c.degree(v0) < 3) if v0 == v1 else (c.degree(v0) < 2 or c.degree(v1) < 2):
        raise ComplexError(f"edge {e} cannot be erased without changing the vertex set")
    (f1, k1, d1), (f2, k2, d2) = ss
    if d1 == d2:
        raise ComplexError(f"faces {f1} and {f2} induce the same direction on edge {e}")
    b1, b2 = c.faces[f1], c.faces[f2]
    rest1 = [b1[(k1 + 1 + t) % len(b1)] for t in range(len(b1) - 1)]
    rest2 = [b2[(k2 + 1 + t) % len(b2)] for t in range(len(b2) - 1)]
    faces = {g: bd for g, bd in c.faces.items() if g != f2}
    faces[f1] = tuple(rest1 + rest2)
    edges = {k: w for k, w in c.edges.items() if k != e}
    return Complex(c.vertices, edges, faces)


def pull_edge(c: Complex, f: int, k: int) -> Complex:
    """Pull a new edge from corner ``k`` of face ``f`` into the face, ending at a new vertex."""
    if f not in c.faces:
        raise ComplexError(f"no face {f}")
    bd = c.faces[f]
    if not 0 <= k < len(bd):
        raise ComplexError(f"face {f} has no corner {k}")
    nv, ne = c.next_id("vertex"), c.next_id("edge")
    edges = dict(c.edges)
    edges[ne] = (c.corner_vertex(f, k), nv)
    faces = dict(c.faces)
    faces[f] = tuple(bd[:k]) + (OrientedEdge(ne, 1), OrientedEdge(ne, -1)) + tuple(bd[k:])
    return Complex(c.vertices + (nv,), edges, faces)


def push_edge_out(c: Complex, e: int) -> Complex:
    """Inverse of :func:`pull_edge`: remove a hanging edge traversed there and back inside one face."""
    if e not in c.edges:
        raise ComplexError(f"no edge {e}")
    v0, v1 = c.edges[e]
    tip = v1 if c.degree(v1) == 1 else v0 if c.degree(v0) == 1 else None
    if tip is None or v0 == v1:
        raise ComplexError(f"edge {e} has no free end")
    ss = c.sides()[e]
    if len(ss) != 2 or ss[0].face != ss[1].face:
        raise ComplexError(f"edge {e} does not hang inside a single face")
    f = ss[0].face
    bd = list(c.faces[f])
    n = len(bd)
    for k in range(n):
        if bd[k].edge == e and bd[(k + 1) % n] == bd[k].inverse() and c.head(bd[k]) == tip:
            drop = {k, (k + 1) % n}
            break
    else:
        raise ComplexError(f"edge {e} is not a spur of face {f}")
    if n == 2:
        raise ComplexError(f"face {f} would lose its whole boundary")
    faces = dict(c.faces)
    faces[f] = tuple(x for t, x in enumerate(bd) if t not in drop)
    edges = {k: w for k, w in c.edges.items() if k != e}
    return Complex(tuple(w for w in c.vertices if w != tip), edges, faces)


MOVES = {
    "divide-edge": divide_edge,
    "divide-face": divide_face,
    "pull-edge": pull_edge,
    "merge-edges": merge_edges,
    "merge-faces": merge_faces,
    "push-edge-out": push_edge_out,
}


def subdivide(c: Complex, move: str, *args: int) -> Complex:
    """Apply a named subdivision move (or its inverse) to ``c``."""
    try:
        fn = MOVES[move]
    except KeyError:
        raise ComplexError(f"unknown move {move!r}; expected one of {', '.join(MOVES)}") from None
    return fn(c, *args)


# ---------------------------------------------------------------------------
# standard examples


def sample_sphere() -> Complex:
    """One vertex, one loop, two faces glued along it."""
    return Complex((0,), {0: (0, 0)}, {0: (OrientedEdge(0, 1),), 1: (OrientedEdge(0, -1),)})


def sample_disc() -> Complex:
    return Complex((0,), {0: (0, 0)}, {0: (OrientedEdge(0, 1),)})


def torus() -> Complex:
    a, b = OrientedEdge(0, 1), OrientedEdge(1, 1)
    return Complex((0,), {0: (0, 0), 1: (0, 0)}, {0: (a, b, a.inverse(), b.inverse())})


def projective_plane() -> Complex:
    e = OrientedEdge(0, 1)
    return Complex((0,), {0: (0, 0)}, {0: (e, e)})


def annulus() -> Complex:
    """Square with one pair of opposite sides identified: a cylinder."""
    # vertices 0 (bottom), 1 (top); edge 0 bottom loop, 1 top loop, 2 seam 0->1
    return Complex((0, 1), {0: (0, 0), 1: (1, 1), 2: (0, 1)},
                   {0: (OrientedEdge(0, 1), OrientedEdge(2, 1), OrientedEdge(1, -1), OrientedEdge(2, -1))})


def polygon(n: int) -> Complex:
    """A single ``n``-gon face on an ``n``-cycle: a disc."""
    edges = {k: (k, (k + 1) % n) for k in range(n)}
    return Complex(tuple(range(n)), edges, {0: tuple(OrientedEdge(k, 1) for k in range(n))})
