from __future__ import annotations

import random

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from kampen.complex import OrientedEdge
from kampen.gmap import GMap, SideRef, glue_polygons, open_map
from kampen.presgen import SortTag
from kampen.smap import SMap

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

# criterion number -> (status, detail), filled by tests marked ``criterion(n)``
CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_configure(config) -> None:
    config.addinivalue_line("markers", "criterion(n): acceptance criterion reported in the terminal summary")


@pytest.fixture
def detail(request):
    """Collects the one-line detail printed next to the test's acceptance criterion."""
    parts: list[str] = []
    request.node.criterion_detail = parts
    return parts.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    status = "PASS" if rep.passed else "FAIL"
    text = "; ".join(getattr(item, "criterion_detail", [])) or (rep.wasxfail if hasattr(rep, "wasxfail") else "error")
    CRITERIA[marker.args[0]] = (status, text)


def pytest_terminal_summary(terminalreporter) -> None:
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n, (status, text) in sorted(CRITERIA.items()):
        terminalreporter.write_line(f"criterion {n}: {status} ({text})")

LETTERS = "aAbB"

words = st.text(alphabet=LETTERS, max_size=14)


@st.composite
def reduced_words(draw, max_size: int = 14) -> str:
    from kampen.words import reduce

    return reduce(draw(st.text(alphabet=LETTERS, max_size=max_size)))


def oracle_u_length(sort: SortTag, i: int, j: int, prev: int, v: str, w: str) -> int:
    """Sum of the exponents in the product defining ``u_ij``, term by term."""
    m = sort.n if sort.kind == "I" else i
    blocks = 4 * (14 * m + 8)
    count = 2 * m + 2 if sort.kind == "I" else 4 * i + 4
    top = 2 * (prev + len(v) + len(w)) + blocks * count
    return sum(k + (top + 1 - k) for k in range(blocks * (j - 1) + 1, blocks * j + 1))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20240611)


def random_closed_complex(rng: random.Random, max_faces: int = 8, max_sides: int = 6):
    """Polygons with all sides glued in random pairs, retried until connected."""
    from kampen.complex import components
    from kampen.gmap import SideRef, glue_polygons

    while True:
        nf = rng.randint(1, max_faces)
        sizes = {f: rng.randint(1, max_sides) for f in range(nf)}
        if sum(sizes.values()) % 2:
            sizes[0] += 1
        sides = [SideRef(f, k) for f, n in sizes.items() for k in range(n)]
        rng.shuffle(sides)
        pairs = [(sides[i], sides[i + 1], rng.random() < 0.3) for i in range(0, len(sides), 2)]
        c = glue_polygons(sizes, pairs)
        if len(components(c)) == 1:
            return c


def random_bordered_complex(rng: random.Random, max_faces: int = 6, max_sides: int = 6):
    """Like :func:`random_closed_complex` but some sides stay unglued; retried until a connected surface."""
    from kampen.complex import NOT_SURFACE, components, is_surface
    from kampen.gmap import SideRef, glue_polygons

    while True:
        nf = rng.randint(1, max_faces)
        sizes = {f: rng.randint(1, max_sides) for f in range(nf)}
        sides = [SideRef(f, k) for f, n in sizes.items() for k in range(n)]
        rng.shuffle(sides)
        npairs = rng.randint(len(sides) // 4, len(sides) // 2)
        pairs = [(sides[2 * i], sides[2 * i + 1], rng.random() < 0.3) for i in range(npairs)]
        c = glue_polygons(sizes, pairs)
        if len(components(c)) == 1 and is_surface(c) != NOT_SURFACE:
            return c


def random_subdivision(rng: random.Random, c):
    """Apply one random subdivision move or inverse move that is applicable to ``c``."""
    from kampen.complex import ComplexError, subdivide

    for _ in range(100):
        move = rng.choice(["divide-edge", "divide-face", "pull-edge", "merge-edges", "merge-faces", "push-edge-out"])
        if move in ("divide-edge", "merge-faces", "push-edge-out"):
            args: tuple[int, ...] = (rng.choice(list(c.edges)),)
        elif move == "merge-edges":
            args = (rng.choice(c.vertices),)
        else:
            f = rng.choice(list(c.faces))
            n = len(c.faces[f])
            if move == "pull-edge":
                args = (f, rng.randrange(n))
            elif n < 2:
                continue
            else:
                i, j = rng.sample(range(n), 2)
                args = (f, i, j)
        try:
            return subdivide(c, move, *args), move
        except ComplexError:
            continue
    raise AssertionError("no applicable subdivision move found")


def random_open_map(rng: random.Random, max_faces: int = 6):
    """A connected map on a random surface, closed or with boundary."""
    from kampen.complex import CLOSED, NOT_SURFACE, is_surface
    from kampen.gmap import GMap, open_map, validate_map

    while True:
        c = random_bordered_complex(rng, max_faces=max_faces)
        kind = is_surface(c)
        if kind == NOT_SURFACE:
            continue
        m = GMap(c, {f: (0, 1) for f in c.faces}, ()) if kind == CLOSED else open_map(c)
        if validate_map(m).ok:
            return m


def random_smap(rng: random.Random, max_faces: int = 6):
    """A random S-map with regular selections, ranks 1 or 2 and some exceptional arcs, or None."""
    from kampen.smap import (
        FULL,
        Interval,
        SMap,
        _backtrack_after,
        arc_rank,
        maximal_selected_arcs,
        selection_problems,
        validate_smap,
    )

    m = random_open_map(rng, max_faces)
    sel: dict = {}
    for f, q in m.complex.faces.items():
        n = len(q)
        r = rng.random()
        if r < 0.15 and not any(_backtrack_after(q, p) for p in range(n)):
            sel[f] = FULL
            continue
        if r < 0.3:
            sel[f] = ()
            continue
        ivs, p, used = [], rng.randrange(n), 0
        while used < n:
            gap = rng.randint(0, 1)
            p, used = p + gap, used + gap
            want = rng.randint(1, max(1, n - used))
            if used + want > n:
                break
            k = 1
            while k < want and not _backtrack_after(q, p + k - 1):
                k += 1
            ivs.append(Interval(p % n, k))
            p, used = p + k, used + k
        sel[f] = tuple(ivs)
    s = SMap(m, {f: rng.randint(1, 2) for f in m.complex.faces}, sel)
    if selection_problems(s):
        return None
    cands = maximal_selected_arcs(s)
    rng.shuffle(cands)
    exc: list = []
    used_edges: set = set()
    for a in cands:
        if rng.random() < 0.6 and arc_rank(s, a) is not None and not ({x.edge for x in a} & used_edges):
            exc.append(a)
            used_edges |= {x.edge for x in a}
    s = s.with_(exceptional=tuple(exc))
    return s if validate_smap(s).ok else None


def long_face_smap():
    """A 60-gon and a hexagon sharing an arc of three edges, selected on both sides."""
    c = glue_polygons({0: 60, 1: 6}, [(SideRef(0, k), SideRef(1, 2 - k), False) for k in range(3)])
    return SMap(open_map(c), {0: 1, 1: 1}, {0: [(0, 3)], 1: [(0, 3)]})


def ringed_triangle(selected: dict):
    """Triangle 0 whose sides are glued to triangles 1, 2, 3."""
    c = glue_polygons({0: 3, 1: 3, 2: 3, 3: 3}, [(SideRef(0, k), SideRef(k + 1, 0), False) for k in range(3)])
    return SMap(open_map(c), {f: 1 for f in range(4)}, selected)


def triangle_in_hexagon(selected: dict):
    """Triangle 1 glued along three consecutive sides of hexagon 0."""
    c = glue_polygons({0: 6, 1: 3}, [(SideRef(1, k), SideRef(0, 2 - k), False) for k in range(3)])
    return SMap(open_map(c), {0: 1, 1: 1}, selected)


def octagon_sphere(ranks: dict):
    """Octagon 0 with sides 0 and 4 glued, capped by triangles 1 and 2; the glued edge is exceptional."""
    c = glue_polygons(
        {0: 8, 1: 3, 2: 3},
        [(SideRef(0, 0), SideRef(0, 4), False)]
        + [(SideRef(0, 1 + k), SideRef(1, 2 - k), False) for k in range(3)]
        + [(SideRef(0, 5 + k), SideRef(2, 2 - k), False) for k in range(3)],
    )
    m = GMap(c, {f: (0, 1) for f in c.faces}, ())
    shared = next(e for e, occ in ((e, [f for f, bd in c.faces.items() for x in bd if x.edge == e]) for e in c.edges)
                  if occ == [0, 0])
    q = SMap(m, ranks, {}).cycles[0]
    pos = [p for p, x in enumerate(q) if x.edge == shared]
    return SMap(m, ranks, {0: [(p, 1) for p in pos]}, exceptional=((OrientedEdge(shared, 1),),))
