from __future__ import annotations

import itertools

import pytest
from conftest import words
from hypothesis import given, settings

from kampen.decide import (
    CONJUGATE,
    NONTRIVIAL,
    NOT_CONJUGATE,
    TRIVIAL,
    UNDECIDED,
    Budget,
    decide_conjugacy,
    decide_word,
    decide_word_G,
    family_certified,
)
from kampen.diagram import Presentation, contour_word, validate_diagram
from kampen.presgen import SortTag
from kampen.words import RunWord, cyclic_reduce, iter_words, reduce

FREE = Presentation.free()


def exponent_sum(w: str, g: str) -> int:
    return w.count(g) - w.count(g.upper())


def order_two_a_trivial(w: str) -> bool:
    r = reduce(w.replace("A", "a"))
    while "aa" in r:
        r = reduce(r.replace("aa", ""))
    return r == ""


# Normal-form oracles: each decides triviality in the named one-relator group.
TOY_ORACLES = {
    "ab": lambda w: exponent_sum(w, "a") == exponent_sum(w, "b"),
    "aab": lambda w: exponent_sum(w, "a") == 2 * exponent_sum(w, "b"),
    "b": lambda w: reduce(w.replace("b", "").replace("B", "")) == "",
    "aa": order_two_a_trivial,
    "abAB": lambda w: exponent_sum(w, "a") == 0 and exponent_sum(w, "b") == 0,
}
CERTIFIED_TOYS = {"ab", "aab", "b"}


def free_conjugate(x: str, y: str) -> bool:
    cx, cy = cyclic_reduce(x)[0], cyclic_reduce(y)[0]
    return len(cx) == len(cy) and cy in cx + cx


def check_witness(p: Presentation, w: str, witness) -> None:
    assert validate_diagram(witness, p).ok
    assert reduce(contour_word(witness, 0)) == reduce(w)


class TestFreeWords:
    @given(words)
    def test_matches_reduction(self, w: str) -> None:
        res = decide_word(FREE, w)
        assert res.verdict == (TRIVIAL if reduce(w) == "" else NONTRIVIAL)
        if res.verdict == TRIVIAL:
            check_witness(FREE, w, res.witness)

    def test_exhaustive_short(self) -> None:
        for n in range(7):
            for w in map("".join, itertools.product("aAbB", repeat=n)):
                assert (decide_word(FREE, w).verdict == TRIVIAL) == (reduce(w) == "")

    def test_empty_word(self) -> None:
        res = decide_word(FREE, "")
        assert res.verdict == TRIVIAL and res.witness is not None

    def test_rejects_foreign_letters(self) -> None:
        with pytest.raises(ValueError):
            decide_word(FREE, "abc")


class TestFreeConjugacy:
    def test_reduced_pairs(self) -> None:
        red = list(iter_words(4))
        for x, y in itertools.product(red, red):
            if len(x) + len(y) > 6:
                continue
            res = decide_conjugacy(FREE, x, y)
            assert (res.verdict == CONJUGATE) == free_conjugate(x, y), (x, y)
            assert res.verdict in (CONJUGATE, NOT_CONJUGATE)

    def test_annular_witness(self) -> None:
        res = decide_conjugacy(FREE, "ab", "ba")
        assert res.verdict == CONJUGATE and res.branch == "annular"
        assert validate_diagram(res.witness, FREE).ok
        assert contour_word(res.witness, 0) == "ab"
        assert contour_word(res.witness, 1) == "AB"

    def test_trivial_branch(self) -> None:
        res = decide_conjugacy(FREE, "aA", "")
        assert res.verdict == CONJUGATE and res.branch == "x=1" and len(res.trivial_witnesses) == 2

    def test_nontrivial_against_trivial(self) -> None:
        assert decide_conjugacy(FREE, "a", "bB").verdict == NOT_CONJUGATE


class TestToyPresentations:
    @pytest.mark.parametrize("rel", sorted(TOY_ORACLES))
    def test_against_oracle(self, rel: str) -> None:
        p = Presentation(relators=(rel,), certified=rel in CERTIFIED_TOYS)
        for w in iter_words(5):
            res = decide_word(p, w, timeout=5)
            if TOY_ORACLES[rel](w):
                assert res.verdict == TRIVIAL, w
                check_witness(p, w, res.witness)
            else:
                assert res.verdict == (NONTRIVIAL if rel in CERTIFIED_TOYS else UNDECIDED), w

    def test_small_budget_is_undecided(self) -> None:
        p = Presentation(relators=("ab",), certified=True)
        assert decide_word(p, "aaab", budget=Budget(3, 6, 3)).verdict == UNDECIDED

    def test_timeout_is_undecided(self) -> None:
        p = Presentation(relators=("aabbb",))
        assert decide_word(p, "abababab", timeout=0.2).verdict == UNDECIDED

    def test_conjugacy_in_quotient(self) -> None:
        p = Presentation(relators=("ab",), certified=True)
        assert decide_conjugacy(p, "aa", "BB").verdict == CONJUGATE
        assert decide_conjugacy(p, "a", "aa").verdict == NOT_CONJUGATE


class TestBudget:
    def test_word_budget(self) -> None:
        assert Budget.for_word("abc") == Budget(18, 36, 18)

    def test_conjugacy_budget(self) -> None:
        assert Budget.for_conjugacy("ab", "ba").max_edges == 23

    def test_positive(self) -> None:
        with pytest.raises(ValueError):
            Budget(0, 1, 1)


class TestGroups:
    II = SortTag.parse("II")
    I0 = SortTag.parse("I.0")

    @settings(max_examples=100)
    @given(words)
    def test_fast_path(self, w: str) -> None:
        res = decide_word_G(self.II, w)
        assert res.k == 0 and res.relator_count == 0
        assert res.verdict == (TRIVIAL if reduce(w) == "" else NONTRIVIAL)

    def test_trace_mentions_threshold(self) -> None:
        res = decide_word_G(self.I0, "ab" * 600)
        assert res.k == 1 and res.relator_count == 0
        assert res.render_trace().splitlines()[0] == "threshold k = 1"
        assert res.verdict == NONTRIVIAL

    def test_rank_zero_relators_are_not_certified(self) -> None:
        r = (RunWord.from_word("ab"),)
        assert not family_certified(self.I0, r)
        assert family_certified(self.I0, ())
        assert family_certified(SortTag.parse("I.1"), r)
        assert family_certified(self.II, r)
