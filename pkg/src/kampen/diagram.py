"""Van Kampen diagrams: labelled maps over a group presentation.

A diagram stores the label of each edge's forward direction, so mutually
inverse oriented edges always carry mutually inverse letters.  Builders glue
labelled polygons along a side pairing; removing the designated boundary
polygons turns the resulting closed surface into a diagram with contours.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .complex import ComplexError, OrientedEdge, classify_surface
from .gmap import (
    GMap,
    MapError,
    Report,
    SideRef,
    closure,
    diamond_move,
    face_contour_path,
    glue_polygons,
    open_map,
    remove_face,
    validate_map,
)
from .words import Alphabet, Word, WordError, inverse_letter, invert, is_reduced


class DiagramError(ValueError):
    """Violated diagram precondition."""


@dataclass(frozen=True)
class Presentation:
    """Generators and relators.

    ``certified`` asserts that every reduced disc diagram needed for a word
    ``w`` has fewer than ``6|w|`` edges, which lets the bounded search answer
    "nontrivial".  It holds for the empty presentation, for subpresentations
    of the constructed families, and for one-relator presentations in which
    some generator occurs exactly once (area at most ``|w|``).
    """

    alphabet: Alphabet = field(default_factory=Alphabet)
    relators: tuple[Word, ...] = ()
    certified: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "relators", tuple(self.relators))
        for r in self.relators:
            self.alphabet.check(r)
            if not r or not is_reduced(r):
                raise DiagramError(f"relator {r!r} must be reduced and non-empty")

    @classmethod
    def free(cls, alphabet: Alphabet | None = None) -> "Presentation":
        return cls(alphabet or Alphabet(), (), True)

    @property
    def symmetrized(self) -> frozenset[Word]:
        return frozenset(self.relators) | frozenset(invert(r) for r in self.relators)


def eliminates_generator(p: Presentation) -> bool:
    """True for one-relator presentations where some generator occurs exactly once.

    There the relator solves for that generator, each of its occurrences in a
    word costs one face, and the 6|w| edge bound of :class:`Presentation` holds.
    """
    if len(p.relators) != 1:
        return False
    r = p.relators[0]
    return any(sum(ch.lower() == s for ch in r) == 1 for s in p.alphabet.symbols)


@dataclass(frozen=True, eq=False)
class Diagram:
    map: GMap
    labels: Mapping[int, str]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", dict(sorted(self.labels.items())))
        missing = set(self.map.complex.edges) - set(self.labels)
        if missing:
            raise DiagramError(f"edges without labels: {sorted(missing)}")

    def label(self, x: OrientedEdge) -> str:
        c = self.labels[x.edge]
        return c if x.direction > 0 else inverse_letter(c)

    def path_label(self, path: Iterable[OrientedEdge]) -> Word:
        return "".join(self.label(x) for x in path)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Diagram):
            return NotImplemented
        return self.map == other.map and dict(self.labels) == dict(other.labels)

    __hash__ = None  # type: ignore[assignment]


def face_word(d: Diagram, f: int) -> Word:
    return d.path_label(face_contour_path(d.map, f))


def contour_word(d: Diagram, i: int) -> Word:
    if not 0 <= i < len(d.map.contours):
        raise DiagramError(f"no contour {i}")
    return d.path_label(d.map.contours[i].edges)


def cyclic_rotations(w: Word) -> list[Word]:
    return [w[k:] + w[:k] for k in range(len(w))] or [""]


def congruence_normal_form(w: Word, alphabet: Alphabet = Alphabet()) -> Word:
    """Least rotation of ``w`` or ``w^-1`` in the letter order ``a < A < b < B``."""
    order = {c: k for k, c in enumerate(alphabet.letters)}

    def key(u: Word) -> list[int]:
        return [order[c] for c in u]

    return min(cyclic_rotations(w) + cyclic_rotations(invert(w)), key=key)


def validate_diagram(d: Diagram, p: Presentation) -> Report:
    rep = validate_map(d.map)
    allowed = set(p.alphabet.symbols) | {s.upper() for s in p.alphabet.symbols}
    for e, c in d.labels.items():
        if c not in allowed:
            rep.add(f"edge {e}: label {c!r} is not a letter of the alphabet")
    if not rep.ok:
        return rep
    rels = p.symmetrized
    for f in d.map.complex.faces:
        w = face_word(d, f)
        if w in rels:
            continue
        if any(rot in rels for rot in cyclic_rotations(w)):
            rep.add(f"face {f}: label {w} is a relator only up to rotation of its c-contour")
            rep.notes.append(f"face {f} is cyclically a relator")
        else:
            rep.add(f"face {f}: label {w} is not a relator")
    return rep


def immediately_cancellable_pairs(d: Diagram) -> set[frozenset[int]]:
    """Pairs of distinct faces with c-contours starting on a common edge and reading the same label."""
    c = d.map.complex
    out: set[frozenset[int]] = set()

    def reading(f: int, k: int, t: int) -> Word:
        bd = c.faces[f]
        n = len(bd)
        if t > 0:
            return d.path_label(bd[(k + s) % n] for s in range(n))
        return d.path_label(bd[(k - s) % n].inverse() for s in range(n))

    for e, ss in c.sides().items():
        for i in range(len(ss)):
            for j in range(i + 1, len(ss)):
                (f1, k1, d1), (f2, k2, d2) = ss[i], ss[j]
                if f1 != f2 and reading(f1, k1, d1) == reading(f2, k2, d2):
                    out.add(frozenset((f1, f2)))
    return out


def is_weakly_reduced(d: Diagram) -> bool:
    return not immediately_cancellable_pairs(d)


def diagram_diamond_move(d: Diagram, e1: OrientedEdge, e2: OrientedEdge) -> tuple[Diagram, str]:
    """Diamond move with the inherited labelling; returns the diagram and the move kind."""
    e1, e2 = OrientedEdge(*e1), OrientedEdge(*e2)
    for x in (e1, e2):
        if x.edge not in d.labels:
            raise DiagramError(f"no edge {x.edge}")
    if d.label(e1) != d.label(e2):
        raise DiagramError(f"label mismatch: {d.label(e1)} vs {d.label(e2)}")
    letter = d.label(e1)
    moved, info = diamond_move(d.map, e1, e2)
    labels = dict(d.labels)
    labels[e1.edge] = letter
    labels[e2.edge] = letter
    return Diagram(moved, labels), info.kind


def genus_and_cl_bound(d: Diagram) -> tuple[int, int]:
    """Genus of the closure of a one-contour diagram; its contour word has commutator length at most that."""
    if len(d.map.contours) != 1:
        raise DiagramError("genus needs exactly one contour")
    if not d.map.contours[0].edges:
        return 0, 0
    cls = classify_surface(closure(d.map).complex)
    if not cls.orientable:
        raise DiagramError("closure is not orientable")
    return cls.genus_or_crosscaps, cls.genus_or_crosscaps


# ---------------------------------------------------------------------------
# builders


def glue_diagram(
    polygons: Mapping[int, Word],
    pairs: Sequence[tuple[SideRef, SideRef]],
    boundary: Sequence[int] = (),
    relator_starts: Mapping[int, int] | None = None,
    corner_joins: Sequence[tuple[SideRef, SideRef]] = (),
) -> Diagram:
    """Glue labelled polygons and remove the ``boundary`` polygons as contours (in that order).

    Side ``k`` of polygon ``P`` reads ``polygons[P][k]``; paired sides must
    carry equal or mutually inverse letters.  Face ``f`` keeps the c-contour
    starting at slot ``relator_starts[f]`` (default 0), read forward.
    """
    triples = []
    for s, t in pairs:
        s, t = SideRef(*s), SideRef(*t)
        x, y = polygons[s.face][s.slot], polygons[t.face][t.slot]
        if x == y:
            triples.append((s, t, True))
        elif x == inverse_letter(y):
            triples.append((s, t, False))
        else:
            raise DiagramError(f"sides {tuple(s)} and {tuple(t)} carry unrelated letters {x}, {y}")
    sizes = {f: len(w) for f, w in polygons.items()}
    if any(n == 0 for n in sizes.values()):
        raise DiagramError("polygons need at least one side")
    c = glue_polygons(sizes, triples, corner_joins=[(SideRef(*x), SideRef(*y)) for x, y in corner_joins])
    labels: dict[int, str] = {}
    for f, bd in c.faces.items():
        for k, x in enumerate(bd):
            letter = polygons[f][k]
            labels[x.edge] = letter if x.direction > 0 else inverse_letter(letter)
    starts = relator_starts or {}
    m = GMap(c, {f: (starts.get(f, 0), 1) for f in c.faces}, ())
    for f in boundary:
        m = remove_face(m, f)
    return Diagram(m, labels)


def open_diagram(polygons: Mapping[int, Word], pairs: Sequence[tuple[SideRef, SideRef]]) -> Diagram:
    """Glue labelled polygons and keep the unpaired sides as contours (see :func:`open_map`)."""
    triples = []
    for s, t in pairs:
        s, t = SideRef(*s), SideRef(*t)
        x, y = polygons[s.face][s.slot], polygons[t.face][t.slot]
        if x not in (y, inverse_letter(y)):
            raise DiagramError(f"sides {tuple(s)} and {tuple(t)} carry unrelated letters {x}, {y}")
        triples.append((s, t, x == y))
    c = glue_polygons({f: len(w) for f, w in polygons.items()}, triples)
    labels: dict[int, str] = {}
    for f, bd in c.faces.items():
        for k, x in enumerate(bd):
            labels[x.edge] = polygons[f][k] if x.direction > 0 else inverse_letter(polygons[f][k])
    return Diagram(open_map(c), labels)


def faceless_diagram(word: Word, gluing: Sequence[tuple[int, int]]) -> Diagram:
    """A single polygon reading ``word`` with its sides glued in the given pairs, then removed.

    ``abAB`` with pairs ``(0, 2), (1, 3)`` gives the torus-closure commutator
    diagram; ``abABabAB`` with four pairs gives a genus-2 octagon.
    """
    if not word:
        raise DiagramError("use trivial_diagram for the empty word")
    return glue_diagram({0: word}, [(SideRef(0, i), SideRef(0, j)) for i, j in gluing], boundary=[0])


def trivial_diagram() -> Diagram:
    from .complex import Complex
    from .gmap import Contour

    return Diagram(GMap(Complex((0,), {}, {}), {}, (Contour(0, ()),)), {})


def torus_commutator_diagram() -> Diagram:
    return faceless_diagram("abAB", [(0, 2), (1, 3)])


def octagon_diagram() -> Diagram:
    return faceless_diagram("abABabAB", [(0, 2), (1, 3), (4, 6), (5, 7)])


def hexagon_torus_diagram() -> Diagram:
    """Torus from a hexagon with opposite sides glued.

    Its two ``a`` edges share their head, so it admits a diagram diamond
    move; the move is disconnecting.
    """
    return faceless_diagram("abaABA", [(0, 3), (1, 4), (2, 5)])


def disc_diagram_for_relator(r: Word) -> Diagram:
    """One face labelled ``r``; its contour reads ``r`` as well."""
    return glue_diagram({0: r, 1: r}, [(SideRef(0, k), SideRef(1, k)) for k in range(len(r))], boundary=[1])


__all__ = [
    "ComplexError",
    "Diagram",
    "DiagramError",
    "MapError",
    "Presentation",
    "WordError",
    "congruence_normal_form",
    "contour_word",
    "cyclic_rotations",
    "diagram_diamond_move",
    "disc_diagram_for_relator",
    "eliminates_generator",
    "face_word",
    "faceless_diagram",
    "genus_and_cl_bound",
    "glue_diagram",
    "hexagon_torus_diagram",
    "immediately_cancellable_pairs",
    "is_weakly_reduced",
    "octagon_diagram",
    "open_diagram",
    "torus_commutator_diagram",
    "trivial_diagram",
    "validate_diagram",
]
