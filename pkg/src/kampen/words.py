"""Free-group words and the factor machinery behind the small-cancellation conditions.

A word is a plain ``str``: a lowercase letter is a positive generator and the
matching uppercase letter is its inverse.  The empty word prints as ``"1"``.
Very long words (the conjugators ``u_ij`` reach millions of letters) are
handled as :class:`RunWord`, a run-length encoded sequence of ``(letter, exponent)``
pairs.
"""

from __future__ import annotations

import math
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

Word = str

EMPTY_TEXT = "1"
DEFAULT_MAX_MEM = 50_000_000


class WordError(ValueError):
    """Raised when a word violates a stated precondition; parse errors carry a 1-based ``column``."""

    def __init__(self, msg: str, column: int = 0) -> None:
        super().__init__(msg)
        self.column = column


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of generator names, each a single lowercase letter."""

    symbols: tuple[str, ...] = ("a", "b")

    def __post_init__(self) -> None:
        if not self.symbols:
            raise WordError("alphabet must be non-empty")
        if len(set(self.symbols)) != len(self.symbols):
            raise WordError("alphabet symbols must be pairwise distinct")
        for s in self.symbols:
            if len(s) != 1 or not s.islower():
                raise WordError(f"generator {s!r} must be a single lowercase letter")

    @property
    def letters(self) -> tuple[str, ...]:
        """All letters in the fixed order ``a < A < b < B < ...``."""
        out: list[str] = []
        for s in self.symbols:
            out.extend((s, s.upper()))
        return tuple(out)

    def check(self, w: Word) -> None:
        allowed = set(self.letters)
        for pos, ch in enumerate(w):
            if ch not in allowed:
                raise WordError(f"letter {ch!r} at position {pos} is not in the alphabet")


def inverse_letter(c: str) -> str:
    return c.lower() if c.isupper() else c.upper()


def invert(w: Word) -> Word:
    return w[::-1].swapcase()


def reduce(w: Word) -> Word:
    """Return the freely reduced form of ``w``."""
    stack: list[str] = []
    for c in w:
        if stack and stack[-1] == inverse_letter(c):
            stack.pop()
        else:
            stack.append(c)
    return "".join(stack)


def is_reduced(w: Word) -> bool:
    return all(w[i + 1] != inverse_letter(w[i]) for i in range(len(w) - 1))


def is_cyclically_reduced(w: Word) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != inverse_letter(w[-1]))


def cyclic_reduce(w: Word) -> tuple[Word, Word]:
    """Split ``reduce(w)`` as ``conjugator * core * conjugator^-1`` with ``core`` cyclically reduced."""
    r = reduce(w)
    i, j = 0, len(r)
    while j - i >= 2 and r[i] == inverse_letter(r[j - 1]):
        i += 1
        j -= 1
    return r[i:j], r[:i]


def format_word(w: Word) -> str:
    return w if w else EMPTY_TEXT


def parse_word(text: str) -> Word:
    text = text.strip()
    if text == EMPTY_TEXT:
        return ""
    for pos, ch in enumerate(text):
        if not ch.isalpha():
            raise WordError(f"unexpected character {ch!r} at column {pos + 1}", pos + 1)
    return text


def substitute(t: Word, z1: Word, z2: Word) -> Word:
    """Evaluate ``t(z1, z2)`` for ``t`` over ``{x, y}``.

    Condition (3) on the substituted words is checked: ``z1`` must start and
    end with ``a`` and ``z2`` with ``b``; under it the result is reduced when
    ``t`` is.
    """
    for name, z, letter in (("z1", z1, "a"), ("z2", z2, "b")):
        if not z or z[0] != letter or z[-1] != letter:
            raise WordError(f"{name}={format_word(z)} must start and end with {letter}")
    table = {"x": z1, "X": invert(z1), "y": z2, "Y": invert(z2)}
    try:
        return "".join(table[c] for c in t)
    except KeyError as exc:
        raise WordError(f"template letter {exc.args[0]!r} is not in {{x, y}}") from None


# ---------------------------------------------------------------------------
# run-length words


def max_mem() -> int:
    """Expansion cap in letters, taken from ``KAMPEN_MAX_MEM`` when set."""
    raw = os.environ.get("KAMPEN_MAX_MEM")
    if raw is None:
        return DEFAULT_MAX_MEM
    try:
        return int(raw)
    except ValueError:
        raise WordError(f"KAMPEN_MAX_MEM={raw!r} is not an integer") from None


@dataclass(frozen=True)
class RunWord:
    """Run-length encoded word; adjacent runs always carry different letters."""

    runs: tuple[tuple[str, int], ...] = ()
    length: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        merged: list[tuple[str, int]] = []
        for c, e in self.runs:
            if e < 0:
                raise WordError(f"negative exponent {e} for {c!r}")
            if e == 0:
                continue
            if merged and merged[-1][0] == c:
                merged[-1] = (c, merged[-1][1] + e)
            else:
                merged.append((c, e))
        object.__setattr__(self, "runs", tuple(merged))
        object.__setattr__(self, "length", sum(e for _, e in merged))

    @classmethod
    def from_word(cls, w: Word) -> "RunWord":
        runs: list[tuple[str, int]] = []
        for c in w:
            if runs and runs[-1][0] == c:
                runs[-1] = (c, runs[-1][1] + 1)
            else:
                runs.append((c, 1))
        return cls(tuple(runs))

    def __len__(self) -> int:
        return self.length

    def __add__(self, other: "RunWord") -> "RunWord":
        return RunWord(self.runs + other.runs)

    def inverse(self) -> "RunWord":
        return RunWord(tuple((inverse_letter(c), e) for c, e in reversed(self.runs)))

    def first_letter(self) -> str | None:
        return self.runs[0][0] if self.runs else None

    def last_letter(self) -> str | None:
        return self.runs[-1][0] if self.runs else None

    def is_reduced(self) -> bool:
        return all(self.runs[i + 1][0] != inverse_letter(self.runs[i][0]) for i in range(len(self.runs) - 1))

    def to_word(self, limit: int | None = None) -> Word:
        cap = max_mem() if limit is None else limit
        if self.length > cap:
            raise WordError(f"expanding {self.length} letters exceeds the cap of {cap} (KAMPEN_MAX_MEM)")
        return "".join(c * e for c, e in self.runs)

    def __str__(self) -> str:
        return format_runs(self)


def as_runword(w: Union[Word, RunWord]) -> RunWord:
    return w if isinstance(w, RunWord) else RunWord.from_word(w)


def format_runs(w: RunWord) -> str:
    if not w.runs:
        return EMPTY_TEXT
    return " ".join(f"{c}^{e}" for c, e in w.runs)


def parse_runs(text: str) -> RunWord:
    """Parse ``a^1 b^64 ...``; bare letters count as exponent 1."""
    text = text.strip()
    if text in ("", EMPTY_TEXT):
        return RunWord()
    runs: list[tuple[str, int]] = []
    col = 1
    for tok in text.split():
        col = text.index(tok, col - 1) + 1
        letter, _, exp = tok.partition("^")
        if len(letter) != 1 or not letter.isalpha():
            raise WordError(f"bad run token {tok!r} at column {col}", col)
        if exp == "":
            if "^" in tok:
                raise WordError(f"missing exponent in {tok!r} at column {col}", col)
            runs.append((letter, 1))
            continue
        if not exp.isdigit():
            raise WordError(f"bad exponent in {tok!r} at column {col}", col)
        runs.append((letter, int(exp)))
    return RunWord(tuple(runs))


# ---------------------------------------------------------------------------
# pieces (condition 2)


def _owner_best(values: dict[int, int], owner: int, value: int) -> None:
    if value > values.get(owner, 0):
        values[owner] = value


def max_piece_lengths(family: Sequence[Union[Word, RunWord]], occurrence_rule: str = "tuple") -> list[int]:
    """For each member, the longest piece with an occurrence in that member or its inverse.

    A piece is a word with two distinct occurrences among the strings
    ``u^{+1}, u^{-1}`` for ``u`` in the family.  With ``occurrence_rule="tuple"``
    two occurrences are distinct when their (member, sign, position) tuples
    differ; with ``"member"`` they must lie in different members.

    Works on the run-length form: a factor spanning several runs starts with
    a suffix of one run, continues through identical whole runs and ends
    with a prefix of a run, so it is determined by its starting run.
    """
    if occurrence_rule not in ("tuple", "member"):
        raise WordError(f"unknown occurrence rule {occurrence_rule!r}")
    across = occurrence_rule == "member"
    strings: list[tuple[int, tuple[tuple[str, int], ...]]] = []
    for idx, u in enumerate(family):
        rw = as_runword(u)
        strings.append((idx, rw.runs))
        strings.append((idx, rw.inverse().runs))

    best: dict[int, int] = {}

    # Factors inside a single run: x^l.
    by_letter: dict[str, list[tuple[int, int]]] = defaultdict(list)
    for owner, runs in strings:
        for c, e in runs:
            by_letter[c].append((e, owner))
    for entries in by_letter.values():
        if across:
            top: dict[int, int] = {}
            for e, owner in entries:
                top[owner] = max(top.get(owner, 0), e)
            ranked = sorted(top.items(), key=lambda kv: -kv[1])
            for e, owner in entries:
                other = next((v for o, v in ranked if o != owner), 0)
                _owner_best(best, owner, min(e, other))
        else:
            exps = sorted((e for e, _ in entries), reverse=True)
            for e, owner in entries:
                if len(exps) == 1:
                    other = 0
                else:
                    other = exps[1] if e == exps[0] else exps[0]
                _owner_best(best, owner, max(e - 1, min(e, other)))

    # Factors crossing one run boundary without any full inner run.
    starts: dict[tuple[str, str], list[tuple[int, int, int]]] = defaultdict(list)
    for owner, runs in strings:
        for r in range(len(runs) - 1):
            starts[(runs[r][0], runs[r + 1][0])].append((runs[r][1], runs[r + 1][1], owner))
    for group in starts.values():
        if len(group) < 2:
            continue
        e = np.array([g[0] for g in group], dtype=np.int64)
        f = np.array([g[1] for g in group], dtype=np.int64)
        owners = np.array([g[2] for g in group], dtype=np.int64)
        chunk = max(1, 4_000_000 // len(group))
        for lo in range(0, len(group), chunk):
            hi = min(len(group), lo + chunk)
            val = np.minimum(e[lo:hi, None], e[None, :]) + np.minimum(f[lo:hi, None], f[None, :])
            if across:
                val[owners[lo:hi, None] == owners[None, :]] = 0
            else:
                idx = np.arange(lo, hi)
                val[idx - lo, idx] = 0
            row = val.max(axis=1)
            for k in range(hi - lo):
                _owner_best(best, int(owners[lo + k]), int(row[k]))

    # Factors containing at least one full run: the full runs must agree exactly.
    full: dict[tuple[str, tuple[str, int]], list[tuple[int, int]]] = defaultdict(list)
    for s, (owner, runs) in enumerate(strings):
        for r in range(len(runs) - 1):
            full[(runs[r][0], runs[r + 1])].append((s, r))
    for group in full.values():
        if len(group) < 2:
            continue
        for x in range(len(group)):
            s1, r1 = group[x]
            o1, runs1 = strings[s1]
            for y in range(x + 1, len(group)):
                s2, r2 = group[y]
                o2, runs2 = strings[s2]
                if across and o1 == o2:
                    continue
                value = min(runs1[r1][1], runs2[r2][1])
                k = 1
                while r1 + k < len(runs1) and r2 + k < len(runs2) and runs1[r1 + k] == runs2[r2 + k]:
                    value += runs1[r1 + k][1]
                    k += 1
                if r1 + k < len(runs1) and r2 + k < len(runs2) and runs1[r1 + k][0] == runs2[r2 + k][0]:
                    value += min(runs1[r1 + k][1], runs2[r2 + k][1])
                _owner_best(best, o1, value)
                _owner_best(best, o2, value)

    return [best.get(i, 0) for i in range(len(family))]


def max_piece_length(family: Iterable[Union[Word, RunWord]], occurrence_rule: str = "tuple") -> int:
    """Longest factor with two distinct occurrences among the family's words and inverses."""
    values = max_piece_lengths(list(family), occurrence_rule)
    return max(values, default=0)


# ---------------------------------------------------------------------------
# common factors with z-products (condition 4)

_NEG = -np.inf


def _z_states(z1: Word, z2: Word) -> tuple[list[tuple[int, int]], list[str]]:
    blocks: list[str] = []
    for z in (z1, invert(z1), z2, invert(z2)):
        if z and z not in blocks:
            blocks.append(z)
    states = [(b, t) for b, z in enumerate(blocks) for t in range(len(z))]
    return states, blocks


@lru_cache(maxsize=64)
def _z_step_powers(z1: Word, z2: Word, letter: str) -> tuple[np.ndarray, ...]:
    """Max-plus matrices T, T^2, T^4, ... of the one-letter transition on ``letter``."""
    states, blocks = _z_states(z1, z2)
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    const, best = n, n + 1
    t = np.full((n + 2, n + 2), _NEG)
    t[const, const] = 0.0
    t[best, best] = 0.0
    for (b, pos), i in index.items():
        z = blocks[b]
        if z[pos] != letter:
            continue
        if pos + 1 < len(z):
            targets = [index[(b, pos + 1)]]
        else:
            targets = [index[(b2, 0)] for b2 in range(len(blocks))]
        for j in targets:
            t[i, j] = 1.0
            t[const, j] = 1.0
        t[i, best] = 1.0
        t[const, best] = 1.0
    powers = [t]
    for _ in range(40):
        p = powers[-1]
        powers.append(np.max(p[:, :, None] + p[None, :, :], axis=1))
    return tuple(powers)


def max_common_factor_with_z(u: Union[Word, RunWord], z1: Word, z2: Word) -> int:
    """Length of the longest factor of ``u`` that is a factor of some product of ``z1^{±1}, z2^{±1}``.

    Runs a max-plus dynamic program over the automaton of bi-infinite
    z-products; long runs are jumped with repeated squaring.
    """
    for name, z in (("z1", z1), ("z2", z2)):
        if not z or not is_cyclically_reduced(z):
            raise WordError(f"{name}={format_word(z)} must be non-empty and cyclically reduced")
    rw = as_runword(u)
    states, _ = _z_states(z1, z2)
    n = len(states)
    v = np.full(n + 2, _NEG)
    v[n] = 0.0
    v[n + 1] = 0.0
    for c, e in rw.runs:
        powers = _z_step_powers(z1, z2, c)
        bit = 0
        while e:
            if e & 1:
                v = np.max(v[:, None] + powers[bit], axis=0)
            e >>= 1
            bit += 1
    return int(max(v[n + 1], 0.0))


# ---------------------------------------------------------------------------
# enumerations


def _count_reduced(length: int, rank: int) -> int:
    if length == 0:
        return 1
    return 2 * rank * (2 * rank - 1) ** (length - 1)


def enumerate_words(k: int, alphabet: Alphabet = Alphabet()) -> Word:
    """The ``k``-th reduced word in length-lex order ``a < A < b < B < ...`` (0-based)."""
    if k < 0:
        raise WordError("index must be non-negative")
    rank = len(alphabet.symbols)
    length = 0
    while k >= _count_reduced(length, rank):
        k -= _count_reduced(length, rank)
        length += 1
    letters = alphabet.letters
    out: list[str] = []
    for pos in range(length):
        choices = [c for c in letters if not out or c != inverse_letter(out[-1])]
        block = (2 * rank - 1) ** (length - pos - 1)
        q, k = divmod(k, block)
        out.append(choices[q])
    return "".join(out)


def word_index(w: Word, alphabet: Alphabet = Alphabet()) -> int:
    """Inverse of :func:`enumerate_words` on reduced words."""
    if not is_reduced(w):
        raise WordError(f"{format_word(w)} is not reduced")
    rank = len(alphabet.symbols)
    k = sum(_count_reduced(n, rank) for n in range(len(w)))
    letters = alphabet.letters
    for pos, c in enumerate(w):
        choices = [x for x in letters if pos == 0 or x != inverse_letter(w[pos - 1])]
        k += choices.index(c) * (2 * rank - 1) ** (len(w) - pos - 1)
    return k


def enumerate_pairs(k: int, alphabet: Alphabet = Alphabet()) -> tuple[Word, Word]:
    """The ``k``-th pair of reduced words under the Cantor diagonal pairing."""
    if k < 0:
        raise WordError("index must be non-negative")
    d = (math.isqrt(8 * k + 1) - 1) // 2
    t = k - d * (d + 1) // 2
    return enumerate_words(d - t, alphabet), enumerate_words(t, alphabet)


def iter_words(max_length: int, alphabet: Alphabet = Alphabet()) -> Iterator[Word]:
    """All reduced words of length at most ``max_length`` in enumeration order."""
    k = 0
    while True:
        w = enumerate_words(k, alphabet)
        if len(w) > max_length:
            return
        yield w
        k += 1
