"""S-maps: selections, gradings, exceptional arcs and the estimates built on them.

Selections are stored per face as intervals of positions along the face's
chosen c-contour: interval ``(start, length)`` selects every nontrivial
subpath of the c-path that starts at position ``start`` and runs for
``length`` steps, read in either direction.  The string :data:`FULL` selects
every c-pseudo-arc of the face.

Exceptional arcs are stored as paths of oriented edges.  An arc is *internal*
when each of its edges has two face sides and *external* when each has one.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Sequence, Union

from .complex import (
    WITH_BOUNDARY,
    Complex,
    OrientedEdge,
    components,
    euler_characteristic,
    is_surface,
)
from .diagram import Diagram, face_word, is_weakly_reduced
from .gmap import GMap, Report, face_contour_path, maximal_arcs, validate_map
from .presgen import SortTag, generate_family
from .words import Word, invert


class SMapError(ValueError):
    """Violated precondition of an S-map operation."""


FULL = "full"


class Interval(tuple):
    """``(start, length)`` on a face's c-contour positions."""

    __slots__ = ()

    def __new__(cls, start: int, length: int) -> "Interval":
        return super().__new__(cls, (int(start), int(length)))

    @property
    def start(self) -> int:
        return self[0]

    @property
    def length(self) -> int:
        return self[1]


FaceSelection = Union[str, tuple[Interval, ...]]
Path = tuple[OrientedEdge, ...]


def _path(p: Iterable) -> Path:
    return tuple(OrientedEdge(*x) for x in p)


def _inverse_path(p: Sequence[OrientedEdge]) -> Path:
    return tuple(x.inverse() for x in reversed(p))


@dataclass(frozen=True, eq=False)
class SMap:
    """A map with ranks, a selection and exceptional arcs; labels make it an S-diagram."""

    map: GMap
    ranks: Mapping[int, int]
    selection: Mapping[int, FaceSelection]
    exceptional: tuple[Path, ...] = ()
    labels: Mapping[int, str] | None = None
    sort: SortTag | None = None

    def __post_init__(self) -> None:
        sel: dict[int, FaceSelection] = {}
        for f in self.map.complex.faces:
            raw = self.selection.get(f, ())
            sel[f] = FULL if raw == FULL else tuple(sorted(Interval(*iv) for iv in raw))
        extra = set(self.selection) - set(self.map.complex.faces)
        if extra:
            raise SMapError(f"selection names missing faces {sorted(extra)}")
        object.__setattr__(self, "selection", sel)
        object.__setattr__(self, "ranks", {f: int(self.ranks.get(f, 0)) for f in self.map.complex.faces})
        object.__setattr__(self, "exceptional", tuple(_path(p) for p in self.exceptional))
        if self.labels is not None:
            object.__setattr__(self, "labels", dict(sorted(self.labels.items())))

    @property
    def complex(self) -> Complex:
        return self.map.complex

    @property
    def diagram(self) -> Diagram:
        if self.labels is None:
            raise SMapError("this S-map carries no labels")
        return Diagram(self.map, self.labels)

    @cached_property
    def cycles(self) -> dict[int, Path]:
        """Each face's c-contour as a cyclic sequence of oriented edges."""
        return {f: face_contour_path(self.map, f) for f in self.complex.faces}

    @cached_property
    def occurrences(self) -> dict[int, list[tuple[int, int]]]:
        """``edge -> [(face, position)]`` over all c-contour positions."""
        out: dict[int, list[tuple[int, int]]] = {e: [] for e in self.complex.edges}
        for f, q in self.cycles.items():
            for p, x in enumerate(q):
                out[x.edge].append((f, p))
        return out

    def perimeter(self, f: int) -> int:
        return len(self.cycles[f])

    def with_(self, **changes) -> "SMap":
        fields = dict(map=self.map, ranks=self.ranks, selection=self.selection, exceptional=self.exceptional,
                      labels=self.labels, sort=self.sort)
        fields.update(changes)
        return SMap(**fields)


# ---------------------------------------------------------------------------
# selections and c-arcs


def face_intervals(s: SMap, f: int) -> tuple[Interval, ...]:
    """Maximal selected c-paths of ``f``; a fully selected face yields one per start position."""
    sel = s.selection[f]
    if sel == FULL:
        n = s.perimeter(f)
        return tuple(Interval(p, n) for p in range(n))
    return sel


def covers(s: SMap, f: int, lo: int, length: int) -> bool:
    """Is the c-path of ``length`` steps from position ``lo`` of ``f`` selected?"""
    n = s.perimeter(f)
    if length < 1:
        return False
    if s.selection[f] == FULL:
        return length <= n
    return any((lo - iv.start) % n + length <= iv.length for iv in s.selection[f])


def covered_positions(s: SMap, f: int) -> set[int]:
    n = s.perimeter(f)
    if s.selection[f] == FULL:
        return set(range(n))
    return {(iv.start + t) % n for iv in s.selection[f] for t in range(iv.length)}


def _backtrack_after(q: Path, p: int) -> bool:
    """Does position ``p + 1`` undo position ``p``?"""
    n = len(q)
    return q[(p + 1) % n] == q[p % n].inverse()


def selection_problems(s: SMap) -> list[str]:
    out = []
    for f, sel in s.selection.items():
        q = s.cycles[f]
        n = len(q)
        if sel == FULL:
            if any(_backtrack_after(q, p) for p in range(n)):
                out.append(f"face {f}: fully selected but its contour is not cyclically reduced")
            continue
        for iv in sel:
            if not (0 <= iv.start < n and 1 <= iv.length <= n):
                out.append(f"face {f}: interval {tuple(iv)} out of range for perimeter {n}")
                continue
            if any(_backtrack_after(q, iv.start + t) for t in range(iv.length - 1)):
                out.append(f"face {f}: interval {tuple(iv)} is not regular (its image backtracks)")
        for a, b in itertools.permutations(sel, 2):
            if a != b and (b.start - a.start) % n + b.length <= a.length and b.length <= n:
                out.append(f"face {f}: interval {tuple(b)} lies inside {tuple(a)}")
                break
    return out


def kappa_counts(s: SMap, f: int) -> tuple[int, int]:
    """``(kappa, kappa')`` of face ``f``.

    ``kappa`` is the number of maximal selected c-pseudo-arcs.  ``kappa'`` is
    the number of maximal runs of covered positions, split where the image
    backtracks; a run that closes up around the whole face without a
    backtrack extends forever and has no maximal member.
    """
    if f not in s.selection:
        raise SMapError(f"no face {f}")
    sel = s.selection[f]
    if sel == FULL or not sel:
        return 0, 0
    q = s.cycles[f]
    n = len(q)
    cov = covered_positions(s, f)
    # a run ends after position p when p+1 is uncovered or p -> p+1 backtracks
    ends = [p for p in cov if (p + 1) % n not in cov or _backtrack_after(q, p)]
    return len(sel), len(ends)


@dataclass(frozen=True)
class CArc:
    """The c-path of ``face`` matching an arc: positions ``start, start+t, ...``."""

    face: int
    start: int
    length: int
    traversal: int

    def position(self, i: int, n: int) -> int:
        return (self.start + self.traversal * i) % n

    def low(self, n: int) -> int:
        return self.start if self.traversal > 0 else (self.start - self.length + 1) % n


def c_arcs(s: SMap, path: Sequence[OrientedEdge]) -> list[CArc]:
    """Every c-path whose image is ``path`` (one per face side along the arc)."""
    path = _path(path)
    if not path:
        return []
    out = []
    for f, p in s.occurrences.get(path[0].edge, []):
        q = s.cycles[f]
        n = len(q)
        if len(path) > n:
            continue
        t = 1 if q[p] == path[0] else -1
        if all((q[(p + i) % n] if t > 0 else q[(p - i) % n].inverse()) == path[i] for i in range(len(path))):
            out.append(CArc(f, p, len(path), t))
    return out


def is_internal(s: SMap, path: Sequence[OrientedEdge]) -> bool:
    return all(len(s.occurrences[x.edge]) == 2 for x in path)


def is_external(s: SMap, path: Sequence[OrientedEdge]) -> bool:
    return all(len(s.occurrences[x.edge]) == 1 for x in path)


def is_selected_arc(s: SMap, path: Sequence[OrientedEdge]) -> bool:
    """Internal, with both c-arcs selected."""
    path = _path(path)
    if not path or not is_internal(s, path):
        return False
    cs = c_arcs(s, path)
    return len(cs) == 2 and all(covers(s, c.face, c.low(s.perimeter(c.face)), c.length) for c in cs)


def incident_faces(s: SMap, path: Sequence[OrientedEdge]) -> set[int]:
    return {f for x in path for f, _ in s.occurrences[OrientedEdge(*x).edge]}


def internal_arcs(s: SMap) -> list[Path]:
    return [a.path for a in maximal_arcs(s.map) if a.kind == "internal" and is_internal(s, a.path)]


def maximal_selected_arcs(s: SMap) -> list[Path]:
    """Maximal selected sub-arcs of the maximal internal arcs."""
    out = []
    for arc in internal_arcs(s):
        reach = 0
        for i in range(len(arc)):
            j = i
            while j < len(arc) and is_selected_arc(s, arc[i:j + 1]):
                j += 1
            if j > i and j > reach:
                out.append(arc[i:j])
                reach = j
    return out


def _span(s: SMap, a: Path, b: Path) -> Path | None:
    """The shortest sub-arc of a maximal arc containing both ``a`` and ``b``."""
    for arc in maximal_arcs(s.map):
        p = arc.path
        found = []
        for sub in (a, b):
            for cand in (sub, _inverse_path(sub)):
                k = next((i for i in range(len(p) - len(cand) + 1) if p[i:i + len(cand)] == cand), None)
                if k is not None:
                    found.append((k, k + len(cand)))
                    break
        if len(found) == 2:
            lo = min(found[0][0], found[1][0])
            hi = max(found[0][1], found[1][1])
            return p[lo:hi]
    return None


def has_circle_skeleton(s: SMap) -> bool:
    c = s.complex
    return bool(c.edges) and all(c.degree(v) == 2 for v in c.vertices) and len(components(c)) == 1


def is_elementary(s: SMap) -> bool:
    """A sphere with two faces whose 1-skeleton is a circle."""
    c = s.complex
    return s.map.is_closed and len(c.faces) == 2 and euler_characteristic(c) == 2 and has_circle_skeleton(s)


# ---------------------------------------------------------------------------
# exceptional arcs


def arc_rank(s: SMap, path: Sequence[OrientedEdge]) -> int | None:
    ranks = {s.ranks[f] for f in incident_faces(s, path)}
    return ranks.pop() if len(ranks) == 1 else None


def validate_smap(s: SMap) -> Report:
    """Map validity, selection regularity and the S-map clauses on exceptional arcs."""
    rep = validate_map(s.map)
    if not rep.ok:
        return rep
    for msg in selection_problems(s):
        rep.add(msg)
    seen: dict[int, int] = {}
    for i, arc in enumerate(s.exceptional):
        if not arc:
            rep.add(f"exceptional arc {i} is empty")
            continue
        for x in arc:
            if x.edge not in s.complex.edges:
                rep.add(f"exceptional arc {i} uses missing edge {x.edge}")
                break
            if x.edge in seen:
                rep.add(f"exceptional arcs {seen[x.edge]} and {i} overlap on edge {x.edge}")
            seen[x.edge] = i
        else:
            for k in range(len(arc) - 1):
                if s.complex.head(arc[k]) != s.complex.tail(arc[k + 1]):
                    rep.add(f"exceptional arc {i} is not a path")
                    break
            faces = incident_faces(s, arc)
            if not faces:
                rep.add(f"exceptional arc {i} is incident to no face")
            elif arc_rank(s, arc) is None:
                rep.add(f"exceptional arc {i} meets faces of different ranks")
            if is_internal(s, arc):
                if not is_selected_arc(s, arc):
                    rep.add(f"internal exceptional arc {i} is not selected")
            elif is_external(s, arc):
                cs = c_arcs(s, arc)
                if not any(covers(s, c.face, c.low(s.perimeter(c.face)), c.length) for c in cs):
                    rep.add(f"external exceptional arc {i} is not on the image of a selected c-path")
            else:
                rep.add(f"exceptional arc {i} mixes internal and external edges")
    return rep


def _oriented_label(s: SMap, f: int, iv: Interval, t: int) -> Word:
    q = s.cycles[f]
    n = len(q)
    w = "".join(s.diagram.label(q[(iv.start + k) % n]) for k in range(iv.length))
    return w if t > 0 else invert(w)


def _flank(iv: Interval, pos: int, t: int, n: int) -> int:
    """Length of the part of ``iv`` (read in direction ``t``) before position ``pos``."""
    off = (pos - iv.start) % n
    return off if t > 0 else iv.length - 1 - off


def expected_exceptional(s: SMap) -> list[Path]:
    """Internal arcs meeting the label-and-flank clause of correct S-diagrams.

    Along each maximal internal arc an edge matches when its two c-paths lie
    in maximal selected c-paths with equal labels and equal flank lengths;
    maximal runs of edges matched by the same pair of c-paths are returned.
    """
    out = []
    for arc in internal_arcs(s):
        keys: list[set] = []
        for i in range(len(arc)):
            here: set = set()
            sides = c_arcs(s, arc[i:i + 1])
            if len(sides) == 2:
                (c1, c2) = sides
                if s.ranks[c1.face] != 0 and s.ranks[c2.face] != 0 and (c1.face, c1.start) != (c2.face, c2.start):
                    n1, n2 = s.perimeter(c1.face), s.perimeter(c2.face)
                    for iv1 in s.selection[c1.face] if s.selection[c1.face] != FULL else ():
                        if (c1.start - iv1.start) % n1 >= iv1.length:
                            continue
                        for iv2 in s.selection[c2.face] if s.selection[c2.face] != FULL else ():
                            if (c2.start - iv2.start) % n2 >= iv2.length:
                                continue
                            fl1 = _flank(iv1, c1.start, c1.traversal, n1)
                            fl2 = _flank(iv2, c2.start, c2.traversal, n2)
                            if fl1 != fl2 or iv1.length != iv2.length:
                                continue
                            if _oriented_label(s, c1.face, iv1, c1.traversal) != _oriented_label(
                                    s, c2.face, iv2, c2.traversal):
                                continue
                            key = tuple(sorted([(c1.face, iv1, c1.traversal), (c2.face, iv2, c2.traversal)]))
                            here.add((key, fl1 - i))
            keys.append(here)
        i = 0
        while i < len(arc):
            if not keys[i]:
                i += 1
                continue
            best = i + 1
            for tag in keys[i]:
                j = i + 1
                while j < len(arc) and tag in keys[j]:
                    j += 1
                best = max(best, j)
            out.append(arc[i:best])
            i = best
    return out


def _same_arc(a: Sequence[OrientedEdge], b: Sequence[OrientedEdge]) -> bool:
    return tuple(a) == tuple(b) or tuple(a) == _inverse_path(b)


def is_extendible(s: SMap, path: Sequence[OrientedEdge]) -> bool:
    """False exactly when both c-arcs of ``path`` are whole maximal selected c-paths."""
    for c in c_arcs(s, path):
        n = s.perimeter(c.face)
        if Interval(c.low(n), c.length) not in face_intervals(s, c.face):
            return True
    return False


# ---------------------------------------------------------------------------
# correctness


@dataclass(frozen=True)
class Template:
    """Relator shape ``prod_i (u_i w u_i^-1) * tail``; the ``u_i`` are the selected segments."""

    us: tuple[Word, ...]
    w: Word
    tail: Word

    @property
    def relator(self) -> Word:
        return "".join(u + self.w + invert(u) for u in self.us) + self.tail

    def segments(self) -> list[Interval]:
        """Positions of every ``u_i`` and ``u_i^-1`` in :attr:`relator`."""
        out, p = [], 0
        for u in self.us:
            out.append(Interval(p, len(u)))
            p += len(u) + len(self.w)
            out.append(Interval(p, len(u)))
            p += len(u)
        return out


def family_templates(sort: SortTag, i_max: int) -> dict[int, list[Template]]:
    """Rank ``i + 1`` templates for each construction step ``i`` (rank 0 stays alien)."""
    out: dict[int, list[Template]] = {}
    for step in generate_family(sort, i_max):
        us = tuple(u.to_word() for u in step.us)
        if sort.kind == "I":
            out[step.i + 1] = [Template(us, step.w, invert(step.v))]
        else:
            half = 2 * step.i + 2
            out[step.i + 1] = [Template(us[:half], step.w, "A"), Template(us[half:], step.w, "B")]
    return out


def _is_z_concatenation(w: Word, zs: Sequence[Word]) -> bool:
    pieces = {z for z in zs} | {invert(z) for z in zs}
    ok = [True] + [False] * len(w)
    for k in range(1, len(w) + 1):
        ok[k] = any(len(z) <= k and ok[k - len(z)] and w[k - len(z):k] == z for z in pieces)
    return ok[len(w)] and bool(w)


def _native_problems(s: SMap, f: int, templates: Sequence[Template]) -> list[str]:
    word = face_word(s.diagram, f)
    n = len(word)
    for tpl in templates:
        r = tpl.relator
        if word == r:
            want = {iv for iv in tpl.segments()}
        elif word == invert(r):
            want = {Interval((n - iv.start - iv.length) % n, iv.length) for iv in tpl.segments()}
        else:
            continue
        sel = s.selection[f]
        have = set() if sel == FULL else set(sel)
        if have != want:
            return [f"face {f}: selection {sorted(map(tuple, have))} differs from the segments "
                    f"{sorted(map(tuple, want))} of its relator"]
        return []
    return [f"face {f}: contour label is not a relator of rank {s.ranks[f]} or its inverse"]


def is_correct(s: SMap, templates: Mapping[int, Sequence[Template]], zs: Sequence[Word] = ("aa", "bb")) -> Report:
    """Clause-by-clause check that ``s`` is a correct S-diagram over the given templates."""
    rep = validate_smap(s)
    if s.labels is None:
        rep.add("correctness needs a labelled S-map")
        return rep
    if not rep.ok:
        return rep
    for f in s.complex.faces:
        j = s.ranks[f]
        if j == 0:
            if not _is_z_concatenation(face_word(s.diagram, f), zs):
                rep.add(f"face {f}: alien face label is not a concatenation of z-words")
            if s.selection[f] != FULL:
                rep.add(f"face {f}: alien face must be fully selected")
        elif j not in templates:
            rep.add(f"face {f}: rank {j} has no relators")
        else:
            for msg in _native_problems(s, f, templates[j]):
                rep.add(msg)
    from .diagram import congruence_normal_form

    forms = {f: congruence_normal_form(face_word(s.diagram, f)) for f in s.complex.faces}
    for f, g in itertools.combinations(sorted(s.complex.faces), 2):
        if forms[f] == forms[g] and s.ranks[f] != s.ranks[g] and 0 not in (s.ranks[f], s.ranks[g]):
            rep.add(f"faces {f} and {g} are congruent but have ranks {s.ranks[f]} and {s.ranks[g]}")
    if not rep.ok:
        return rep
    expected = expected_exceptional(s)
    given_internal = [a for a in s.exceptional if is_internal(s, a)]
    for a in expected:
        if not any(_same_arc(a, b) for b in given_internal):
            rep.add(f"internal arc {' '.join(map(str, a))} meets the exceptional clause but is not exceptional")
    for b in given_internal:
        if not any(_same_arc(a, b) for a in expected):
            rep.add(f"exceptional arc {' '.join(map(str, b))} fails the label and flank clause")
    for b in s.exceptional:
        if any(s.ranks[f] == 0 for f in incident_faces(s, b)):
            rep.add(f"exceptional arc {' '.join(map(str, b))} is incident to an alien face")
    return rep


def is_special(s: SMap, templates: Mapping[int, Sequence[Template]], zs: Sequence[Word] = ("aa", "bb")) -> Report:
    """Correct, weakly reduced, and every internal exceptional arc non-extendible."""
    rep = is_correct(s, templates, zs)
    if not rep.ok:
        rep.notes.append("not correct, hence not special")
        return rep
    if not is_weakly_reduced(s.diagram):
        rep.add("the diagram is not weakly reduced")
    for a in s.exceptional:
        if is_internal(s, a) and is_extendible(s, a):
            rep.add(f"internal exceptional arc {' '.join(map(str, a))} is extendible")
    return rep


# ---------------------------------------------------------------------------
# condition Z


def submap_complex(s: SMap, faces: Iterable[int]) -> Complex:
    c = s.complex
    faces = set(faces)
    edges = {x.edge for f in faces for x in c.faces[f]}
    verts = {v for e in edges for v in c.edges[e]}
    return Complex(tuple(verts), {e: c.edges[e] for e in edges}, {f: c.faces[f] for f in faces})


def is_simple_disc(s: SMap, faces: Iterable[int]) -> bool:
    faces = set(faces)
    if not faces or not faces <= set(s.complex.faces):
        return False
    sub = submap_complex(s, faces)
    return (is_surface(sub) == WITH_BOUNDARY and euler_characteristic(sub) == 1
            and len(components(sub)) == 1)


def simple_disc_submaps(s: SMap, max_faces: int = 8) -> list[frozenset[int]]:
    fs = sorted(s.complex.faces)
    out = []
    for k in range(1, min(max_faces, len(fs)) + 1):
        for combo in itertools.combinations(fs, k):
            if is_simple_disc(s, combo):
                out.append(frozenset(combo))
    return out


def disc_boundary(s: SMap, faces: Iterable[int]) -> Path:
    """The contour of a simple disc submap, starting with its least boundary edge read forward."""
    faces = set(faces)
    if not is_simple_disc(s, faces):
        raise SMapError(f"faces {sorted(faces)} do not form a simple disc submap")
    c = s.complex
    count: dict[int, int] = defaultdict(int)
    for f in faces:
        for x in c.faces[f]:
            count[x.edge] += 1
    bedges = sorted(e for e, k in count.items() if k == 1)
    at: dict[int, list[OrientedEdge]] = defaultdict(list)
    for e in bedges:
        at[c.edges[e][0]].append(OrientedEdge(e, 1))
        at[c.edges[e][1]].append(OrientedEdge(e, -1))
    path = [OrientedEdge(bedges[0], 1)]
    while len(path) < len(bedges):
        h = c.head(path[-1])
        path.append(next(y for y in at[h] if y.edge != path[-1].edge))
    return tuple(path)


@dataclass(frozen=True)
class ZResult:
    holds: bool
    minimum: int | None
    witness: tuple[tuple[int, Interval, int], ...] = ()

    def render(self) -> str:
        size = "none" if self.minimum is None else str(self.minimum)
        return f"{'holds' if self.holds else 'fails'} (least enclosing set: {size})"


def _boundary_pieces(s: SMap, faces: set[int], cyc: Path) -> list[tuple[int, int, tuple[int, Interval, int]]]:
    """Arcs ``(position, length, source)`` of the contour covered by one selected c-path of an outside face."""
    m = len(cyc)
    where: dict[OrientedEdge, list[int]] = defaultdict(list)
    for p, x in enumerate(cyc):
        where[x].append(p)
    out = []
    for g in sorted(set(s.complex.faces) - faces):
        q = s.cycles[g]
        n = len(q)
        for iv in face_intervals(s, g):
            for t in (1, -1):
                img = [q[(iv.start + k) % n] for k in range(iv.length)]
                if t < 0:
                    img = [x.inverse() for x in reversed(img)]
                for i, x in enumerate(img):
                    for p in where.get(x, ()):
                        if i > 0 and img[i - 1] == cyc[(p - 1) % m]:
                            continue  # not the start of a maximal match
                        k = 0
                        while i + k < len(img) and k < m and img[i + k] == cyc[(p + k) % m]:
                            k += 1
                        out.append((p, k, (g, iv, t)))
    return out


def _min_circular_cover(m: int, arcs: Sequence[tuple[int, int, object]]) -> tuple[int, ...] | None:
    """Indices of a least family of arcs covering the cycle of ``m`` positions."""
    if m == 0:
        return None
    if any(k >= m for _, k, _ in arcs):
        return (next(i for i, (_, k, _) in enumerate(arcs) if k >= m),)
    best: tuple[int, ...] | None = None
    # reach[p] = farthest end (exclusive, unwrapped) over arcs containing position p, with its index
    for first in range(len(arcs)):
        p0, k0, _ = arcs[first]
        chosen = [first]
        end = p0 + k0
        while end < p0 + m:
            cand = None
            for j, (p, k, _) in enumerate(arcs):
                for shift in (0, m, -m):
                    lo = p + shift
                    if lo <= end < lo + k and (cand is None or lo + k > cand[1]):
                        cand = (j, lo + k)
            if cand is None or cand[1] <= end:
                chosen = []
                break
            chosen.append(cand[0])
            end = cand[1]
            if best is not None and len(chosen) >= len(best):
                break
        if chosen and end >= p0 + m and (best is None or len(chosen) < len(best)):
            best = tuple(chosen)
    return best


def check_Z(s: SMap, phi: Iterable[int], n: int) -> ZResult:
    """Condition Z(n) relative to the simple disc submap with face set ``phi``.

    The least enclosing set is a least family of selected c-paths of outside
    faces whose images, laid along the contour of ``phi``, cover it.
    """
    faces = set(phi)
    cyc = disc_boundary(s, faces)
    pieces = _boundary_pieces(s, faces, cyc)
    cover = _min_circular_cover(len(cyc), pieces)
    if cover is None:
        return ZResult(True, None)
    sources = tuple(dict.fromkeys(pieces[i][2] for i in cover))
    size = len(sources)
    return ZResult(size > n, size, () if size > n else sources)


# ---------------------------------------------------------------------------
# condition Y


@dataclass(frozen=True)
class YResult:
    holds: bool
    per_rank: dict[int, tuple[int, int]]  # rank -> (qualifying components, rank faces)

    def render(self) -> str:
        lines = [f"Y {'holds' if self.holds else 'fails'}"]
        for j, (k, b) in sorted(self.per_rank.items()):
            lines.append(f"rank {j}: {k} components vs {b} faces -> {'ok' if k <= b else 'violated'}")
        return "\n".join(lines)


def _require_connected(s: SMap) -> None:
    if len(components(s.complex)) != 1:
        raise SMapError("the S-map must be connected")


def exceptional_by_rank(s: SMap) -> tuple[dict[int, list[Path]], dict[int, list[Path]]]:
    internal: dict[int, list[Path]] = defaultdict(list)
    external: dict[int, list[Path]] = defaultdict(list)
    for a in s.exceptional:
        j = arc_rank(s, a)
        if j is None:
            raise SMapError("an exceptional arc meets faces of different ranks")
        (internal if is_internal(s, a) else external)[j].append(a)
    return dict(internal), dict(external)


def check_Y(s: SMap) -> YResult:
    _require_connected(s)
    c = s.complex
    internal, external = exceptional_by_rank(s)
    per_rank: dict[int, tuple[int, int]] = {}
    for j, arcs in sorted(internal.items()):
        faces = {f: bd for f, bd in c.faces.items() if s.ranks[f] != j}
        gone_edges = {x.edge for a in arcs for x in a}
        gone_verts = {c.head(x) for a in arcs for x in a[:-1]}
        edges = {e: ends for e, ends in c.edges.items() if e not in gone_edges}
        verts = set(c.vertices) - gone_verts
        gamma = Complex(tuple(verts), edges, faces)
        ext_edges = [{x.edge for x in a} for a in external.get(j, [])]
        count = 0
        for comp in components(gamma):
            e_in = {e for e, (v0, _) in edges.items() if v0 in comp}
            f_in = [f for f, bd in faces.items() if bd[0].edge in e_in]
            chi = len(comp) - len(e_in) + len(f_in)
            if chi == 1 or any(es <= e_in for es in ext_edges):
                count += 1
        per_rank[j] = (count, sum(1 for f in c.faces if s.ranks[f] == j))
    return YResult(all(k <= b for k, b in per_rank.values()), per_rank)


# ---------------------------------------------------------------------------
# condition D


Rational = Union[Fraction, int, str]
PerFace = Union[Rational, Mapping[int, Rational]]


def _value(fn: PerFace, f: int) -> Fraction:
    if isinstance(fn, Mapping):
        return Fraction(fn[f])
    return Fraction(fn)


@dataclass
class DResult:
    clauses: dict[str, tuple[bool, str]] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(ok for ok, _ in self.clauses.values())

    def render(self) -> str:
        return "\n".join(f"{name}: {'holds' if ok else 'fails'}{' (' + why + ')' if why else ''}"
                         for name, (ok, why) in self.clauses.items())


def _simple_subpaths(s: SMap, img: Sequence[OrientedEdge]) -> Iterable[Path]:
    c = s.complex
    for i in range(len(img)):
        seen = {c.tail(img[i])}
        for j in range(i, len(img)):
            h = c.head(img[j])
            if h in seen:
                break
            seen.add(h)
            yield tuple(img[i:j + 1])


def _lies_on(arc: Path, p: Path) -> bool:
    for cand in (arc, _inverse_path(arc)):
        L = len(cand)
        if any(p[i:i + L] == cand for i in range(len(p) - L + 1)):
            return True
    return False


def check_D(s: SMap, lam: PerFace, mu: PerFace, nu: PerFace, variant: str = "D",
            relative_to: Iterable[int] | None = None) -> DResult:
    """Clauses D1, D2, D3 (``variant="D"``) or D1, D2', D3' (``variant="D'"``), exactly."""
    if variant not in ("D", "D'"):
        raise SMapError(f"unknown variant {variant!r}")
    gamma = sorted(s.complex.faces if relative_to is None else relative_to)
    res = DResult()
    primed = variant == "D'"

    bad = ""
    for f in gamma:
        lhs = s.perimeter(f) - len(covered_positions(s, f))
        rhs = _value(lam, f) * s.perimeter(f)
        if lhs > rhs:
            bad = f"face {f}: {lhs} non-selected c-edges > {rhs}"
            break
    res.clauses["D1"] = (not bad, bad)

    exc_edges = {x.edge for a in s.exceptional for x in a}
    bad = ""
    sel_arcs = maximal_selected_arcs(s)
    for f in gamma:
        targets = [g for g in gamma if s.ranks[g] >= s.ranks[f]] if primed else [f]
        for u in sel_arcs:
            if f not in incident_faces(s, u):
                continue
            M = sum(1 for x in u if x.edge not in exc_edges)
            for g in targets:
                rhs = _value(mu, g) * s.perimeter(g)
                if M > rhs:
                    bad = f"face {f}, arc {' '.join(map(str, u))}: {M} > {rhs} (bound of face {g})"
                    break
            if bad:
                break
        if bad:
            break
    res.clauses["D2'" if primed else "D2"] = (not bad, bad)

    gset = set(gamma)
    exc_gamma = [a for a in s.exceptional if incident_faces(s, a) & gset]
    bad = ""
    for f in sorted(s.complex.faces):
        targets = [g for g in gamma if (s.ranks[g] >= s.ranks[f] if primed else s.ranks[g] == s.ranks[f])]
        if not targets or not exc_gamma:
            continue
        q = s.cycles[f]
        n = len(q)
        N = 0
        for iv in face_intervals(s, f):
            img = [q[(iv.start + k) % n] for k in range(iv.length)]
            for p in _simple_subpaths(s, img):
                N = max(N, sum(len(a) for a in exc_gamma if _lies_on(a, p)))
        for g in targets:
            rhs = _value(nu, g) * s.perimeter(g)
            if N > rhs:
                bad = f"face {f}: exceptional length {N} > {rhs} (bound of face {g})"
                break
        if bad:
            break
    res.clauses["D3'" if primed else "D3"] = (not bad, bad)
    return res


# ---------------------------------------------------------------------------
# Hall matching


def _ordered(xs: Iterable[Hashable]) -> list:
    xs = list(xs)
    try:
        return sorted(xs)
    except TypeError:
        return sorted(xs, key=repr)


@dataclass(frozen=True)
class HallResult:
    assignment: dict | None
    deficiency: frozenset | None

    @property
    def ok(self) -> bool:
        return self.assignment is not None


def hall_assign(A: Iterable[Hashable], B: Iterable[Hashable], R: Mapping[Hashable, Iterable[Hashable]] | Iterable[tuple],
                w: Mapping[Hashable, int]) -> HallResult:
    """A function ``h`` with ``x R h(x)`` and at most ``w(y)`` pre-images per ``y``, or a set ``X`` with
    ``sum(w(y) for y in R(X)) < |X|``.

    Each ``y`` is split into ``w(y)`` copies and augmenting paths match ``A``
    into the copies, visiting elements in sorted order.
    """
    A_list, B_set = _ordered(A), set(B)
    rel: dict = defaultdict(set)
    if isinstance(R, Mapping):
        for x, ys in R.items():
            rel[x].update(ys)
    else:
        for x, y in R:
            rel[x].add(y)
    nbrs = {x: [(y, k) for y in _ordered(rel[x] & B_set) for k in range(int(w.get(y, 0)))] for x in A_list}
    owner: dict[tuple, Hashable] = {}

    def augment(x: Hashable, seen_slots: set, seen_x: set) -> bool:
        seen_x.add(x)
        for slot in nbrs[x]:
            if slot in seen_slots:
                continue
            seen_slots.add(slot)
            if slot not in owner or augment(owner[slot], seen_slots, seen_x):
                owner[slot] = x
                return True
        return False

    for x in A_list:
        seen_x: set = set()
        if not augment(x, set(), seen_x):
            return HallResult(None, frozenset(seen_x))
    return HallResult({x: slot[0] for slot, x in owner.items()}, None)


def image(R: Mapping[Hashable, Iterable[Hashable]], X: Iterable[Hashable]) -> set:
    return {y for x in X for y in R.get(x, ())}


def hall_condition_ii(A, B, R: Mapping, w: Mapping) -> bool:
    A = list(A)
    return all(sum(w.get(y, 0) for y in image(R, X) if y in B) >= len(X)
               for k in range(len(A) + 1) for X in itertools.combinations(A, k))


def hall_condition_iii(A, B, R: Mapping, w: Mapping) -> bool:
    B = list(B)
    return all(sum(w.get(y, 0) for y in Y) >= sum(1 for x in A if set(R.get(x, ())) & set(B) <= set(Y))
               for k in range(len(B) + 1) for Y in itertools.combinations(B, k))


# ---------------------------------------------------------------------------
# Estimating Lemmas


@dataclass
class EL1Result:
    lhs: int
    rhs: int
    holds: bool
    E: tuple[Path, ...] = ()
    f: dict = field(default_factory=dict)
    e_bound: int = 0

    def render(self) -> str:
        return (f"|A| = {self.lhs}, bound = {self.rhs}: {'inequality holds' if self.holds else 'VIOLATED'}\n"
                f"|E| = {len(self.E)} (bound {self.e_bound}), f assigns {len(self.f)} arcs")


class HypothesisError(SMapError):
    """An Estimating Lemma was applied outside its hypotheses."""


def el1_hypotheses(s: SMap, A: Sequence[Path], C: Iterable[int], D: Iterable[int],
                   max_faces: int = 8) -> list[str]:
    A = [_path(a) for a in A]
    C, D = set(C), set(D)
    out = []
    if len(components(s.complex)) != 1:
        out.append("the map is not connected")
    if s.map.is_closed and has_circle_skeleton(s) and not any(kappa_counts(s, f)[0] for f in s.complex.faces):
        # elementary maps, and also the projective plane glued from one face e1..ek e1..ek
        out.append("closed map with a circle 1-skeleton and no maximal selected c-pseudo-arc")
    for i, a in enumerate(A):
        if not is_selected_arc(s, a):
            out.append(f"A[{i}] is not a selected internal arc")
    for i, j in itertools.combinations(range(len(A)), 2):
        span = _span(s, A[i], A[j])
        if span is not None and is_selected_arc(s, span):
            out.append(f"A[{i}] and A[{j}] are subarcs of one selected arc")
    missing = set().union(*(incident_faces(s, a) for a in A)) - C if A else set()
    if missing:
        out.append(f"C misses faces {sorted(missing)} incident to arcs of A")
    if out:
        return out
    edges_of = [{x.edge for x in a} for a in A]
    for phi in simple_disc_submaps(s, max_faces):
        if phi & D:
            continue
        sub_edges = {x.edge for f in phi for x in s.complex.faces[f]}
        if all(es <= sub_edges for es in edges_of):
            continue
        z = check_Z(s, phi, 2)
        if not z.holds:
            out.append(f"Z(2) fails relative to the simple disc submap {sorted(phi)}")
    return out


def _w(s: SMap, y: int, base: int) -> int:
    k, k2 = kappa_counts(s, y)
    return base + k + k2


def verify_estimating_1(s: SMap, A: Sequence[Path], C: Iterable[int], D: Iterable[int],
                        B: Iterable[int] | None = None, check_hypotheses: bool = True) -> EL1Result:
    """Both sides of the First Estimating Lemma, plus its ``E`` and ``f`` for the subset ``B`` of ``C``."""
    A = [_path(a) for a in A]
    C, D = set(C), set(D)
    B = set(C if B is None else B)
    if not B <= C:
        raise HypothesisError("B must be a subset of C")
    if check_hypotheses:
        problems = el1_hypotheses(s, A, C, D)
        if problems:
            raise HypothesisError("; ".join(problems))
    c_count = len(s.map.contours)
    chi = euler_characteristic(s.complex)
    rhs = sum(_w(s, y, 3) for y in C) + 2 * len(D - C) - c_count - 3 * chi
    if not A:
        return EL1Result(0, rhs, True)
    e_bound = (sum(_w(s, y, 3) for y in (C - B) - D) + sum(_w(s, y, 1) for y in (C - B) & D)
               + 2 * len(D) - c_count - 3 * chi)
    omega = ("omega",)
    caps: dict = {y: _w(s, y, 1 if y in D else 3) for y in B}
    caps[omega] = max(0, e_bound)
    rel = {i: {y for y in incident_faces(s, a) if y in B} | {omega} for i, a in enumerate(A)}
    res = hall_assign(range(len(A)), set(B) | {omega}, rel, caps)
    if not res.ok:
        return EL1Result(len(A), rhs, False, e_bound=e_bound)
    E = tuple(A[i] for i, y in sorted(res.assignment.items()) if y == omega)
    f = {A[i]: y for i, y in sorted(res.assignment.items()) if y != omega}
    holds = len(A) <= rhs and (not E or len(E) <= e_bound)
    return EL1Result(len(A), rhs, holds, E, f, e_bound)


@dataclass
class EL2Result:
    per_rank: dict[int, tuple[int, int, int, int]]  # j -> (|A_j|, |B_j|, eps, bound)
    E: tuple[Path, ...]
    chi: int
    holds: bool

    def render(self) -> str:
        lines = [f"chi = {self.chi}; {'inequality holds' if self.holds else 'VIOLATED'}"]
        for j, (a, b, eps, bound) in sorted(self.per_rank.items()):
            lines.append(f"rank {j}: |A_j| = {a} <= 2*{b} - {eps} - chi = {bound}: {'ok' if a <= bound else 'no'}")
        if self.E:
            lines.append(f"|E| = {len(self.E)} <= -chi = {-self.chi}: {'ok' if len(self.E) <= -self.chi else 'no'}")
        else:
            lines.append("E is empty")
        return "\n".join(lines)


def verify_estimating_2(s: SMap) -> EL2Result:
    """Per-rank bounds of the Second Estimating Lemma and the set ``E`` from its proof."""
    y = check_Y(s)
    if not y.holds:
        raise HypothesisError("condition Y fails")
    internal, external = exceptional_by_rank(s)
    chi = euler_characteristic(s.complex)
    per_rank = {}
    E: list[Path] = []
    ok = True
    for j, arcs in sorted(internal.items()):
        b = sum(1 for f in s.complex.faces if s.ranks[f] == j)
        eps = 1 if external.get(j) else 0
        bound = 2 * b - eps - chi
        per_rank[j] = (len(arcs), b, eps, bound)
        ok = ok and len(arcs) <= bound
        excess = len(arcs) - (2 * b - eps)
        if excess > 0:
            E.extend(sorted(arcs)[:excess])
    ok = ok and (not E or len(E) <= -chi)
    return EL2Result(per_rank, tuple(E), chi, ok)


__all__ = [
    "CArc",
    "DResult",
    "EL1Result",
    "EL2Result",
    "FULL",
    "HallResult",
    "HypothesisError",
    "Interval",
    "SMap",
    "SMapError",
    "Template",
    "YResult",
    "ZResult",
    "c_arcs",
    "check_D",
    "check_Y",
    "check_Z",
    "covers",
    "disc_boundary",
    "el1_hypotheses",
    "expected_exceptional",
    "face_intervals",
    "family_templates",
    "hall_assign",
    "has_circle_skeleton",
    "hall_condition_ii",
    "hall_condition_iii",
    "is_correct",
    "is_elementary",
    "is_extendible",
    "is_selected_arc",
    "is_simple_disc",
    "is_special",
    "kappa_counts",
    "maximal_selected_arcs",
    "simple_disc_submaps",
    "validate_smap",
    "verify_estimating_1",
    "verify_estimating_2",
]
