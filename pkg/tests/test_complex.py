from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_bordered_complex, random_closed_complex, random_subdivision
from kampen.complex import (
    CLOSED,
    NOT_SURFACE,
    WITH_BOUNDARY,
    Complex,
    ComplexError,
    OrientedEdge,
    annulus,
    classify_surface,
    components,
    divide_edge,
    divide_face,
    euler_characteristic,
    face_orientation,
    is_surface,
    link,
    merge_edges,
    merge_faces,
    oe,
    polygon,
    projective_plane,
    pull_edge,
    push_edge_out,
    sample_disc,
    sample_sphere,
    subdivide,
    torus,
)
from kampen.gmap import SideRef, glue_polygons


def klein_bottle() -> Complex:
    a, b = OrientedEdge(0), OrientedEdge(1)
    return Complex((0,), {0: (0, 0), 1: (0, 0)}, {0: (a, b, a.inverse(), b)})


def mobius_band() -> Complex:
    """A square with two opposite sides glued after a half twist."""
    return glue_polygons({0: 4}, [(SideRef(0, 1), SideRef(0, 3), True)])


class TestBasics:
    def test_oriented_edge_text(self) -> None:
        assert oe("+3") == OrientedEdge(3, 1)
        assert oe("-3") == OrientedEdge(3, -1)
        assert oe(4) == OrientedEdge(4, 1)
        assert str(oe("-7")) == "-7"
        with pytest.raises(ComplexError):
            oe("x1")

    def test_rejects_broken_boundary(self) -> None:
        with pytest.raises(ComplexError, match="not consecutive"):
            Complex((0, 1, 2), {0: (0, 1), 1: (2, 0)}, {0: (OrientedEdge(0), OrientedEdge(1))})
        with pytest.raises(ComplexError, match="missing vertex"):
            Complex((0,), {0: (0, 1)}, {})

    def test_sides(self) -> None:
        s = torus().sides()
        assert [len(v) for v in s.values()] == [2, 2]

    def test_link_of_torus_vertex_is_a_circle(self) -> None:
        lk = link(torus(), 0)
        assert len(lk.nodes) == 4 and len(lk.arcs) == 4
        assert lk.is_circle()

    def test_link_of_disc_corner_is_a_segment(self) -> None:
        lk = link(polygon(3), 0)
        assert lk.is_segment() and not lk.is_circle()


class TestEulerAndClassification:
    @pytest.mark.parametrize(
        "make, chi, closed, orientable, g",
        [
            (sample_sphere, 2, True, True, 0),
            (sample_disc, 1, False, True, 0),
            (lambda: polygon(5), 1, False, True, 0),
            (projective_plane, 1, True, False, 1),
            (torus, 0, True, True, 1),
            (annulus, 0, False, True, 0),
            (klein_bottle, 0, True, False, 2),
            (mobius_band, 0, False, False, 1),
        ],
    )
    def test_standard_surfaces(self, make, chi: int, closed: bool, orientable: bool, g: int) -> None:
        c = make()
        assert euler_characteristic(c) == chi
        sc = classify_surface(c)
        assert (sc.closed, sc.orientable, sc.genus_or_crosscaps) == (closed, orientable, g)

    def test_boundary_components(self) -> None:
        assert classify_surface(annulus()).boundary_components == 2
        assert classify_surface(polygon(4)).boundary_components == 1

    def test_not_a_surface(self) -> None:
        # three discs sharing one boundary edge
        c = Complex((0,), {0: (0, 0)}, {f: (OrientedEdge(0),) for f in range(3)})
        assert is_surface(c) == NOT_SURFACE
        with pytest.raises(ComplexError):
            classify_surface(c)

    def test_describe(self) -> None:
        assert classify_surface(torus()).describe() == "orientable surface, genus 1, closed, euler 0"

    @given(st.integers(min_value=0, max_value=10**6))
    def test_random_closed_surfaces_are_consistent(self, seed: int) -> None:
        c = random_closed_complex(random.Random(seed))
        assert is_surface(c) == CLOSED
        sc = classify_surface(c)
        assert sc.euler == euler_characteristic(c) <= 2
        if sc.orientable:
            assert sc.euler == 2 - 2 * sc.genus_or_crosscaps
        else:
            assert sc.euler == 2 - sc.genus_or_crosscaps

    def test_orientation_flip_consistency(self) -> None:
        orient = face_orientation(torus())
        assert orient == {0: 1}
        assert face_orientation(projective_plane()) is None


class TestSubdivision:
    def test_moves_and_inverses(self) -> None:
        c = torus()
        d = divide_edge(c, 0)
        assert euler_characteristic(d) == 0
        assert merge_edges(d, 1) == c
        f = divide_face(c, 0, 0, 2)
        assert len(f.faces) == 2
        assert merge_faces(f, 2) == c
        p = pull_edge(c, 0, 1)
        assert push_edge_out(p, 2) == c

    @pytest.mark.parametrize("move, args", [("divide-face", (0, 1, 1)), ("merge-edges", (0,)), ("push-edge-out", (0,))])
    def test_inapplicable(self, move: str, args: tuple[int, ...]) -> None:
        with pytest.raises(ComplexError):
            subdivide(torus(), move, *args)

    def test_unknown_move(self) -> None:
        with pytest.raises(ComplexError, match="unknown move"):
            subdivide(torus(), "twist", 0)

    @given(st.integers(min_value=0, max_value=10**6))
    def test_euler_and_class_invariant(self, seed: int) -> None:
        rng = random.Random(seed)
        c = random_bordered_complex(rng) if rng.random() < 0.5 else random_closed_complex(rng)
        before = classify_surface(c)
        for _ in range(10):
            c, _ = random_subdivision(rng, c)
        assert classify_surface(c) == before
        assert len(components(c)) == 1

    def test_kinds(self) -> None:
        assert is_surface(polygon(3)) == WITH_BOUNDARY
        assert is_surface(torus()) == CLOSED
