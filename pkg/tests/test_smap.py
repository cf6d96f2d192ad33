from __future__ import annotations

import itertools
import random
from fractions import Fraction
from pathlib import Path

import pytest
from conftest import long_face_smap, octagon_sphere, random_smap, ringed_triangle, triangle_in_hexagon
from hypothesis import given
from hypothesis import strategies as st

from kampen.complex import OrientedEdge
from kampen.gmap import GMap, SideRef, glue_polygons
from kampen.io import load_path
from kampen.smap import (
    FULL,
    HypothesisError,
    SMap,
    SMapError,
    Template,
    check_D,
    check_Y,
    check_Z,
    el1_hypotheses,
    hall_assign,
    hall_condition_ii,
    hall_condition_iii,
    incident_faces,
    is_correct,
    is_simple_disc,
    is_special,
    kappa_counts,
    maximal_selected_arcs,
    selection_problems,
    validate_smap,
    verify_estimating_1,
    verify_estimating_2,
)

DATA = Path(__file__).parent / "data"
TEMPLATES = {1: [Template(("abb",), "a", "B"), Template(("abb",), "aa", "b")]}


@pytest.fixture
def two_faces() -> SMap:
    s = load_path(DATA / "two_faces_smap.txt")
    assert isinstance(s, SMap)
    return s


class TestSelection:
    def test_sample_is_valid(self, two_faces: SMap) -> None:
        assert validate_smap(two_faces).ok
        assert maximal_selected_arcs(two_faces) == [(OrientedEdge(0, 1), OrientedEdge(1, 1))]

    def test_full_face_has_no_kappa(self) -> None:
        s = long_face_smap().with_(selection={0: FULL, 1: [(0, 3)]})
        assert kappa_counts(s, 0) == (0, 0)

    def test_kappa_counts_intervals(self, two_faces: SMap) -> None:
        assert kappa_counts(two_faces, 0) == (2, 2)

    def test_kappa_prime_merges_adjacent_intervals(self) -> None:
        s = long_face_smap().with_(selection={0: [(0, 2), (2, 2)], 1: [(0, 3)]})
        assert kappa_counts(s, 0) == (2, 1)

    def test_out_of_range_interval(self) -> None:
        s = long_face_smap().with_(selection={0: [(0, 3)], 1: [(0, 9)]})
        assert any("out of range" in p for p in selection_problems(s))

    def test_unknown_face(self) -> None:
        with pytest.raises(SMapError):
            long_face_smap().with_(selection={7: [(0, 1)]})


class TestCorrectness:
    def test_correct_but_not_special(self, two_faces: SMap) -> None:
        assert is_correct(two_faces, TEMPLATES).ok
        rep = is_special(two_faces, TEMPLATES)
        assert not rep.ok
        assert any("extendible" in p for p in rep.problems)

    def test_shortened_interval_breaks_correctness(self, two_faces: SMap) -> None:
        shorter = two_faces.with_(selection={0: ((0, 2), (4, 3)), 1: ((0, 3), (5, 3))})
        assert not is_correct(shorter, TEMPLATES).ok


class TestZ:
    def test_single_cover_fails(self) -> None:
        s = triangle_in_hexagon({0: [(0, 3)]})
        assert is_simple_disc(s, {1})
        z = check_Z(s, {1}, 2)
        assert not z.holds and z.minimum == 1 and len(z.witness) == 1

    def test_three_faces_hold(self) -> None:
        s = ringed_triangle({1: [(0, 1)], 2: [(0, 1)], 3: [(0, 1)]})
        z = check_Z(s, {0}, 2)
        assert z.holds and z.minimum == 3

    def test_uncovered_boundary_is_vacuous(self) -> None:
        s = triangle_in_hexagon({})
        for n in (0, 1, 5):
            assert check_Z(s, {1}, n).holds

    def test_requires_simple_disc(self) -> None:
        s = ringed_triangle({})
        with pytest.raises(SMapError):
            check_Z(s, {1, 2}, 2)


class TestY:
    def test_no_exceptional_arcs(self) -> None:
        assert check_Y(long_face_smap()).holds

    def test_two_disc_components_against_one_face(self) -> None:
        y = check_Y(octagon_sphere({0: 1, 1: 2, 2: 2}))
        assert not y.holds and y.per_rank == {1: (2, 1)}

    def test_counts_against_two_faces(self) -> None:
        y = check_Y(octagon_sphere({0: 1, 1: 1, 2: 2}))
        assert y.holds and y.per_rank == {1: (1, 2)}


class TestD:
    @pytest.mark.parametrize("mu, holds", [(Fraction(1, 10), True), (Fraction(1, 30), False)])
    def test_d2_on_long_face(self, mu: Fraction, holds: bool) -> None:
        res = check_D(long_face_smap(), 0, mu, 0, relative_to=[0])
        assert res.clauses["D2"][0] is holds

    def test_d1_counts_unselected_edges(self) -> None:
        res = check_D(long_face_smap(), Fraction(57, 60), 1, 0, relative_to=[0])
        assert res.clauses["D1"][0]
        res = check_D(long_face_smap(), Fraction(56, 60), 1, 0, relative_to=[0])
        assert not res.clauses["D1"][0]

    def test_fully_selected_without_exceptional(self) -> None:
        s = long_face_smap().with_(selection={0: FULL, 1: FULL})
        res = check_D(s, 0, 1, 0)
        assert res.clauses["D1"][0] and res.clauses["D3"][0]

    def test_primed_variant_names(self) -> None:
        assert set(check_D(long_face_smap(), 1, 1, 1, variant="D'").clauses) == {"D1", "D2'", "D3'"}

    def test_unknown_variant(self) -> None:
        with pytest.raises(SMapError):
            check_D(long_face_smap(), 1, 1, 1, variant="E")


def brute_force_hall(A: list, B: list, R: dict, w: dict) -> bool:
    options = [[y for y in B if y in R.get(x, ())] for x in A]
    for h in itertools.product(*options):
        if all(h.count(y) <= w.get(y, 0) for y in B):
            return True
    return False


@st.composite
def hall_instances(draw):
    A = list(range(draw(st.integers(0, 4))))
    B = [f"y{k}" for k in range(draw(st.integers(0, 4)))]
    R = {x: {y for y in B if draw(st.booleans())} for x in A}
    w = {y: draw(st.integers(0, 2)) for y in B}
    return A, B, R, w


class TestHall:
    def test_empty(self) -> None:
        assert hall_assign([], ["y"], {}, {"y": 1}).assignment == {}

    def test_single(self) -> None:
        assert hall_assign(["x"], ["y"], {"x": ["y"]}, {"y": 1}).assignment == {"x": "y"}

    def test_deficiency(self) -> None:
        res = hall_assign(["x1", "x2"], ["y"], {"x1": ["y"], "x2": ["y"]}, {"y": 1})
        assert res.deficiency == frozenset({"x1", "x2"})

    def test_pairs_form(self) -> None:
        assert hall_assign([1, 2], ["p", "q"], [(1, "p"), (2, "p"), (2, "q")], {"p": 1, "q": 1}).assignment == {1: "p", 2: "q"}

    @given(hall_instances())
    def test_agrees_with_brute_force(self, inst) -> None:
        A, B, R, w = inst
        res = hall_assign(A, B, R, w)
        assert res.ok == brute_force_hall(A, B, R, w) == hall_condition_ii(A, B, R, w)
        if res.ok:
            assert all(res.assignment[x] in R[x] for x in A)
            assert all(list(res.assignment.values()).count(y) <= w[y] for y in B)
        else:
            X = res.deficiency
            assert sum(w[y] for y in set().union(*(R[x] for x in X))) < len(X)

    @given(hall_instances())
    def test_conditions_agree(self, inst) -> None:
        assert hall_condition_ii(*inst) == hall_condition_iii(*inst)


class TestEstimating:
    def test_empty_a(self, two_faces: SMap) -> None:
        assert verify_estimating_1(two_faces, [], set(two_faces.complex.faces), set()).holds

    def test_projective_plane_outside_hypotheses(self) -> None:
        c = glue_polygons({0: 2}, [(SideRef(0, 0), SideRef(0, 1), True)])
        s = SMap(GMap(c, {0: (0, 1)}, ()), {0: 1}, {0: FULL})
        assert el1_hypotheses(s, [], {0}, set())
        with pytest.raises(HypothesisError):
            verify_estimating_1(s, [], {0}, set())

    def test_b_must_lie_in_c(self, two_faces: SMap) -> None:
        with pytest.raises(HypothesisError):
            verify_estimating_1(two_faces, [], {0}, set(), B={1})

    def test_sample_arc(self, two_faces: SMap) -> None:
        arc = maximal_selected_arcs(two_faces)
        res = verify_estimating_1(two_faces, arc, incident_faces(two_faces, arc[0]), set())
        assert res.holds and res.lhs == 1

    def test_second_lemma_needs_y(self) -> None:
        with pytest.raises(HypothesisError):
            verify_estimating_2(octagon_sphere({0: 1, 1: 2, 2: 2}))

    def test_second_lemma_sample(self, two_faces: SMap) -> None:
        res = verify_estimating_2(two_faces)
        assert res.holds and res.per_rank == {1: (1, 2, 0, 3)}

    def test_random_instances(self) -> None:
        rng = random.Random(7)
        checked = 0
        while checked < 40:
            s = random_smap(rng)
            if s is None:
                continue
            arcs = maximal_selected_arcs(s)
            try:
                assert verify_estimating_2(s).holds
                assert verify_estimating_1(s, arcs[:1], set(s.complex.faces), set()).holds
            except HypothesisError:
                continue
            checked += 1
