from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import LETTERS, reduced_words, words
from kampen.words import (
    Alphabet,
    RunWord,
    WordError,
    cyclic_reduce,
    enumerate_pairs,
    enumerate_words,
    format_runs,
    format_word,
    invert,
    is_cyclically_reduced,
    is_reduced,
    iter_words,
    max_common_factor_with_z,
    max_piece_length,
    max_piece_lengths,
    parse_runs,
    parse_word,
    reduce,
    substitute,
    word_index,
)


def naive_reduce(w: str) -> str:
    """Delete any cancelling pair until none is left."""
    pairs = [c + c.swapcase() for c in LETTERS]
    changed = True
    while changed:
        changed = False
        for p in pairs:
            if p in w:
                w = w.replace(p, "", 1)
                changed = True
    return w


def naive_pieces(family: list[str], rule: str) -> list[int]:
    occ: dict[str, set[tuple[int, int, int]]] = {}
    for m, u in enumerate(family):
        for sign, s in ((1, u), (-1, invert(u))):
            for i in range(len(s)):
                for j in range(i + 1, len(s) + 1):
                    occ.setdefault(s[i:j], set()).add((m, sign, i))
    best = [0] * len(family)
    for factor, where in occ.items():
        members = {m for m, _, _ in where}
        distinct = len(members) >= 2 if rule == "member" else len(where) >= 2
        if distinct:
            for m in members:
                best[m] = max(best[m], len(factor))
    return best


def naive_z_factor(u: str, z1: str, z2: str) -> int:
    """Longest factor of ``u`` that is a factor of some product of z-blocks, by recursion on blocks."""
    zs = {z1, invert(z1), z2, invert(z2)}

    def from_block_start(f: str) -> bool:
        return not f or any(f.startswith(z) and from_block_start(f[len(z):]) or z.startswith(f) for z in zs)

    def is_factor(f: str) -> bool:
        return any(
            z[o:].startswith(f) or (f.startswith(z[o:]) and from_block_start(f[len(z) - o:]))
            for z in zs
            for o in range(len(z))
        )

    best = 0
    for i in range(len(u)):
        for j in range(i + best + 1, len(u) + 1):
            if not is_factor(u[i:j]):
                break
            best = j - i
    return best


class TestFreeReduction:
    @pytest.mark.parametrize(
        "w, expected",
        [("", ""), ("aA", ""), ("abBA", ""), ("abAB", "abAB"), ("aAb", "b"), ("baBAab", "ba")],
    )
    def test_examples(self, w: str, expected: str) -> None:
        assert reduce(w) == expected

    @given(words)
    def test_matches_naive(self, w: str) -> None:
        assert reduce(w) == naive_reduce(w)

    @given(words)
    def test_reduced_and_idempotent(self, w: str) -> None:
        r = reduce(w)
        assert is_reduced(r)
        assert reduce(r) == r

    @given(words, words)
    def test_homomorphism(self, u: str, v: str) -> None:
        assert reduce(u + v) == reduce(reduce(u) + reduce(v))
        assert reduce(u + invert(u)) == ""

    @given(words)
    def test_cyclic_reduce(self, w: str) -> None:
        core, conj = cyclic_reduce(w)
        assert is_cyclically_reduced(core)
        assert reduce(conj + core + invert(conj)) == reduce(w)


class TestText:
    def test_empty_word_prints_as_one(self) -> None:
        assert format_word("") == "1"
        assert parse_word("1") == ""

    def test_bad_character(self) -> None:
        with pytest.raises(WordError, match="column 2"):
            parse_word("a1")

    @pytest.mark.parametrize("text, runs", [("aaa", "a^3"), ("aaabBB", "a^3 b^1 B^2"), ("", "1")])
    def test_runs(self, text: str, runs: str) -> None:
        assert format_runs(RunWord.from_word(text)) == runs
        assert parse_runs(runs).to_word() == text

    @given(words)
    def test_runs_roundtrip(self, w: str) -> None:
        rw = RunWord.from_word(w)
        assert len(rw) == len(w)
        assert parse_runs(format_runs(rw)) == rw
        assert rw.inverse().to_word() == invert(w)
        assert rw.is_reduced() == is_reduced(w)

    def test_runs_merge_and_errors(self) -> None:
        assert RunWord((("a", 2), ("a", 3), ("b", 0))).runs == (("a", 5),)
        with pytest.raises(WordError):
            parse_runs("a^x")
        with pytest.raises(WordError):
            RunWord((("a", -1),))

    def test_expansion_cap(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("KAMPEN_MAX_MEM", "10")
        with pytest.raises(WordError, match="KAMPEN_MAX_MEM"):
            RunWord((("a", 11),)).to_word()
        assert RunWord((("a", 10),)).to_word() == "a" * 10


class TestEnumeration:
    def test_first_words(self) -> None:
        assert [enumerate_words(k) for k in range(6)] == ["", "a", "A", "b", "B", "aa"]

    def test_counts(self) -> None:
        counts = [0] * 5
        for w in iter_words(4):
            counts[len(w)] += 1
        assert counts == [1, 4, 12, 36, 108]

    @given(st.integers(min_value=0, max_value=50_000))
    def test_index_roundtrip(self, k: int) -> None:
        w = enumerate_words(k)
        assert is_reduced(w)
        assert word_index(w) == k

    def test_pairs_cover_diagonals(self) -> None:
        seen = {enumerate_pairs(k) for k in range(55)}
        assert len(seen) == 55
        assert ("", "") in seen and ("a", "") in seen

    def test_three_generators(self) -> None:
        abc = Alphabet(("a", "b", "c"))
        assert sum(1 for w in iter_words(2, abc) if len(w) == 2) == 6 * 5


class TestPieces:
    @given(st.lists(reduced_words(max_size=9), min_size=1, max_size=3), st.sampled_from(["tuple", "member"]))
    def test_matches_naive(self, family: list[str], rule: str) -> None:
        family = [u for u in family if u] or ["ab"]
        assert max_piece_lengths(family, rule) == naive_pieces(family, rule)

    def test_runword_family_agrees(self) -> None:
        fam = ["aabbbab", "abbbaab", "baaBBa"]
        assert max_piece_lengths([RunWord.from_word(u) for u in fam]) == naive_pieces(fam, "tuple")
        assert max_piece_length(fam) == max(naive_pieces(fam, "tuple"))

    def test_long_runs_without_expansion(self) -> None:
        n = 10**9
        assert max_piece_lengths([RunWord((("a", n), ("b", 3))), RunWord((("a", 5), ("b", n)))], "member") == [8, 8]
        assert max_piece_lengths([RunWord((("a", n), ("b", 1))), RunWord((("a", n), ("B", 1)))], "member") == [n, n]
        assert max_piece_lengths([RunWord((("a", n), ("b", 1)))], "tuple") == [n - 1]

    def test_unknown_rule(self) -> None:
        with pytest.raises(WordError):
            max_piece_lengths(["ab"], "other")


class TestZFactor:
    @given(reduced_words(max_size=10), st.sampled_from([("aa", "bb"), ("aba", "bab"), ("a", "b")]))
    def test_matches_naive(self, u: str, zs: tuple[str, str]) -> None:
        assert max_common_factor_with_z(u, *zs) == naive_z_factor(u, *zs)

    def test_long_run_uses_squaring(self) -> None:
        assert max_common_factor_with_z(RunWord((("a", 10**12),)), "aa", "bb") == 10**12

    def test_rejects_bad_z(self) -> None:
        with pytest.raises(WordError):
            max_common_factor_with_z("ab", "aA", "bb")


class TestSubstitute:
    def test_example(self) -> None:
        assert substitute("xY", "aa", "bb") == "aaBB"

    @pytest.mark.parametrize("z1, z2", [("ba", "bb"), ("aa", "ab"), ("", "b")])
    def test_condition_on_z(self, z1: str, z2: str) -> None:
        with pytest.raises(WordError):
            substitute("xy", z1, z2)

    @given(st.text(alphabet="xXyY", max_size=8))
    def test_reduced_template_gives_reduced_word(self, t: str) -> None:
        if is_reduced(t):
            assert is_reduced(substitute(t, "aba", "bab"))
