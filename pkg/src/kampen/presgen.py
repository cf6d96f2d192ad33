"""Generators and validators for the two families of presentations.

Sort ``I.n`` has one relator per step::

    r_i = u_{i,1} w_i u_{i,1}^-1 ... u_{i,2n+2} w_i u_{i,2n+2}^-1 v_i^-1

and sort ``II`` has two per step, ending in ``a^-1`` and ``b^-1``.  All
conjugators ``u_ij`` are kept run-length encoded.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .words import (
    RunWord,
    Word,
    WordError,
    enumerate_pairs,
    enumerate_words,
    format_word,
    is_cyclically_reduced,
    max_common_factor_with_z,
    max_piece_lengths,
)


@dataclass(frozen=True)
class SortTag:
    """``SortTag("I", n)`` or ``SortTag("II")``."""

    kind: str
    n: int | None = None

    def __post_init__(self) -> None:
        if self.kind == "I":
            if self.n is None or self.n < 0:
                raise ValueError("sort I needs an index n >= 0")
        elif self.kind == "II":
            if self.n is not None:
                raise ValueError("sort II takes no index")
        else:
            raise ValueError(f"unknown sort {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "SortTag":
        text = text.strip()
        if text == "II":
            return cls("II")
        if text.startswith("I.") and text[2:].isdigit():
            return cls("I", int(text[2:]))
        raise ValueError(f"sort must be 'II' or 'I.<n>', got {text!r}")

    def __str__(self) -> str:
        return "II" if self.kind == "II" else f"I.{self.n}"


@dataclass(frozen=True)
class Params:
    n: int
    lam: Fraction
    mu: Fraction
    nu: Fraction


def params(n: int) -> Params:
    if n < 0:
        raise ValueError("n must be non-negative")
    return Params(
        n=n,
        lam=Fraction(1, 20 * n + 20),
        mu=Fraction(1, (14 * n + 8) * (8 * n + 8)),
        nu=Fraction(1, 4 * n + 4),
    )


def main_inequality(p: Params) -> Fraction:
    """Left side of ``2λ + (14n+8)μ + (2n+1)/(4n+4) < 1/2``."""
    n = p.n
    return 2 * p.lam + (14 * n + 8) * p.mu + Fraction(2 * n + 1, 4 * n + 4)


def gamma_bound(p: Params) -> Fraction:
    """Left side of ``λ + (8n+11)μ + 2ν < 19/44``."""
    return p.lam + (8 * p.n + 11) * p.mu + 2 * p.nu


def check_params(n: int) -> tuple[bool, bool]:
    p = params(n)
    return main_inequality(p) < Fraction(1, 2), gamma_bound(p) < Fraction(19, 44)


def gen_z() -> tuple[Word, Word]:
    z1, z2 = "aa", "bb"
    assert is_cyclically_reduced(z1) and is_cyclically_reduced(z2)
    return z1, z2


# ---------------------------------------------------------------------------
# conjugator words


@dataclass(frozen=True)
class StepContext:
    """The data one step of the construction depends on."""

    i: int
    v: Word
    w: Word
    u_prev_len: int


def step_words(sort: SortTag, i: int) -> tuple[Word, Word]:
    """``(v_i, w_i)``; sort II has no ``v`` and reports ``""``."""
    if sort.kind == "I":
        return enumerate_pairs(i)
    return "", enumerate_words(i)


def block_count(sort: SortTag, i: int) -> int:
    """Number of ``a^k b^m`` blocks in each ``u_ij``."""
    m = sort.n if sort.kind == "I" else i
    return 4 * (14 * m + 8)


def conjugator_count(sort: SortTag, i: int) -> int:
    return 2 * sort.n + 2 if sort.kind == "I" else 4 * i + 4


def _exponent_sum(sort: SortTag, i: int, u_prev_len: int, v_len: int, w_len: int) -> int:
    """The ``M`` in ``a^k b^{M+1-k}``."""
    blocks = block_count(sort, i)
    if sort.kind == "I":
        return 2 * (u_prev_len + v_len + w_len) + blocks * conjugator_count(sort, i)
    return 2 * (u_prev_len + w_len) + blocks * conjugator_count(sort, i)


def u_length(sort: SortTag, i: int, u_prev_len: int, v_len: int, w_len: int) -> int:
    """``|u_ij|`` from the length formula alone (every block has length ``M+1``)."""
    return block_count(sort, i) * (_exponent_sum(sort, i, u_prev_len, v_len, w_len) + 1)


def gen_u(sort: SortTag, i: int, j: int, ctx: StepContext) -> RunWord:
    if not 1 <= j <= conjugator_count(sort, i):
        raise ValueError(f"j={j} out of range 1..{conjugator_count(sort, i)} for sort {sort}, i={i}")
    blocks = block_count(sort, i)
    m = _exponent_sum(sort, i, ctx.u_prev_len, len(ctx.v), len(ctx.w))
    runs: list[tuple[str, int]] = []
    for k in range(blocks * (j - 1) + 1, blocks * j + 1):
        runs.append(("a", k))
        runs.append(("b", m + 1 - k))
    return RunWord(tuple(runs))


def _conjugate_chain(us: Sequence[RunWord], w: Word) -> RunWord:
    ww = RunWord.from_word(w)
    out = RunWord()
    for u in us:
        out = out + u + ww + u.inverse()
    return out


def gen_relators(sort: SortTag, i: int, ctx: StepContext, us: Sequence[RunWord] | None = None) -> RunWord | tuple[RunWord, RunWord]:
    """Relators of step ``i`` as literal (unreduced) concatenations."""
    if us is None:
        us = [gen_u(sort, i, j, ctx) for j in range(1, conjugator_count(sort, i) + 1)]
    if sort.kind == "I":
        return _conjugate_chain(us, ctx.w) + RunWord.from_word(ctx.v).inverse()
    half = 2 * i + 2
    r1 = _conjugate_chain(us[:half], ctx.w) + RunWord((("A", 1),))
    r2 = _conjugate_chain(us[half:], ctx.w) + RunWord((("B", 1),))
    return r1, r2


@dataclass
class FamilyStep:
    i: int
    v: Word
    w: Word
    us: list[RunWord]

    @property
    def u_len(self) -> int:
        return len(self.us[0])


def generate_family(sort: SortTag, i_max: int) -> list[FamilyStep]:
    steps: list[FamilyStep] = []
    prev = 0
    for i in range(i_max + 1):
        v, w = step_words(sort, i)
        ctx = StepContext(i, v, w, prev)
        us = [gen_u(sort, i, j, ctx) for j in range(1, conjugator_count(sort, i) + 1)]
        steps.append(FamilyStep(i, v, w, us))
        prev = len(us[0])
    return steps


def next_u_length(sort: SortTag, steps: Sequence[FamilyStep]) -> int:
    """``|u_{i+1,1}|`` after the last step, from the length formula."""
    last = steps[-1]
    v, w = step_words(sort, last.i + 1)
    return u_length(sort, last.i + 1, last.u_len, len(v), len(w))


# ---------------------------------------------------------------------------
# verification


@dataclass
class ClauseResult:
    clause: str
    i: int
    ok: bool
    detail: str


@dataclass
class FamilyReport:
    sort: SortTag
    i_max: int
    results: list[ClauseResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def failures(self) -> list[ClauseResult]:
        return [r for r in self.results if not r.ok]

    def add(self, clause: str, i: int, ok: bool, detail: str) -> None:
        self.results.append(ClauseResult(clause, i, ok, detail))

    def render(self) -> str:
        lines = [f"family sort {self.sort} i<={self.i_max}: {'ok' if self.ok else 'FAILED'}"]
        for r in self.results:
            lines.append(f"  [{r.clause}] i={r.i} {'ok' if r.ok else 'VIOLATED'}: {r.detail}")
        return "\n".join(lines)


def _fmt(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _op(holds: bool, op: str) -> str:
    """``op`` when the comparison holds, else its negation."""
    return op if holds else {"<=": ">", ">=": "<"}[op]


def _mu_scale(sort: SortTag, i: int) -> Fraction:
    m = sort.n if sort.kind == "I" else i
    p = params(m)
    return p.mu * (4 * m + 4)


def _lam_scale(sort: SortTag, i: int) -> Fraction:
    m = sort.n if sort.kind == "I" else i
    return params(m).lam * (4 * m + 4)


def verify_family(sort: SortTag, i_max: int, family: Sequence[FamilyStep] | None = None,
                  z: tuple[Word, Word] | None = None) -> FamilyReport:
    """Check every listed condition on ``u_ij`` (``i <= i_max``) with exact arithmetic.

    ``family`` defaults to the generated one; passing a modified family is how
    mutation tests exercise the checker.
    """
    steps = list(family) if family is not None else generate_family(sort, i_max)
    z1, z2 = z if z is not None else gen_z()
    report = FamilyReport(sort, i_max)

    for st in steps:
        lengths = [len(u) for u in st.us]
        equal = len(set(lengths)) == 1
        if sort.kind == "I":
            ok = equal and lengths[0] >= st.i
            report.add("1a", st.i, ok, f"|u_i,j| = {sorted(set(lengths))}, need all equal and >= {st.i}"
                       + ("" if equal else f"; first mismatch at j={1 + next(j for j, x in enumerate(lengths) if x != lengths[0])}"))
            lhs = _lam_scale(sort, st.i) * lengths[0]
            rhs = len(st.v) + (2 * sort.n + 2) * len(st.w)
            report.add("1b", st.i, lhs >= rhs, f"lambda(4n+4)|u| = {_fmt(lhs)} {_op(lhs >= rhs, '>=')} |v|+(2n+2)|w| = {rhs}")
        else:
            report.add("1a", st.i, equal, f"|u_i,j| = {sorted(set(lengths))}"
                       + ("" if equal else f"; first mismatch at j={1 + next(j for j, x in enumerate(lengths) if x != lengths[0])}"))
            lhs = _lam_scale(sort, st.i) * lengths[0]
            rhs = 1 + (2 * st.i + 2) * len(st.w)
            report.add("1b", st.i, lhs >= rhs, f"lambda_i(4i+4)|u| = {_fmt(lhs)} {_op(lhs >= rhs, '>=')} 1+(2i+2)|w| = {rhs}")
            later = steps[st.i + 1].u_len if st.i + 1 < len(steps) else next_u_length(sort, steps)
            lhs_c, rhs_c = lhs, _lam_scale(sort, st.i + 1) * later
            report.add("1c", st.i, lhs_c <= rhs_c, f"{_fmt(lhs_c)} {_op(lhs_c <= rhs_c, '<=')} {_fmt(rhs_c)}")
            lhs_d, rhs_d = _mu_scale(sort, st.i) * lengths[0], _mu_scale(sort, st.i + 1) * later
            report.add("1d", st.i, lhs_d <= rhs_d, f"{_fmt(lhs_d)} {_op(lhs_d <= rhs_d, '<=')} {_fmt(rhs_d)}")
            report.add("1e", st.i, lengths[0] <= later, f"|u_i,1| = {lengths[0]} {_op(lengths[0] <= later, '<=')} |u_i+1,1| = {later}")
            report.add("1f", st.i, lhs_d >= st.i, f"mu_i(4i+4)|u| = {_fmt(lhs_d)} {_op(lhs_d >= st.i, '>=')} {st.i}")

    flat: list[RunWord] = []
    where: list[tuple[int, int]] = []
    for st in steps:
        for j, u in enumerate(st.us, start=1):
            flat.append(u)
            where.append((st.i, j))
    pieces = max_piece_lengths(flat)
    for (i, j), u, piece in zip(where, flat, pieces):
        bound = _mu_scale(sort, i) * len(u)
        report.add("2", i, piece <= bound, f"j={j}: longest piece {piece} {_op(piece <= bound, '<=')} mu(4m+4)|u| = {_fmt(bound)}")

    ok3 = bool(z1) and bool(z2) and z1[0] == z1[-1] == "a" and z2[0] == z2[-1] == "b"
    report.add("3", 0, ok3, f"z1={format_word(z1)} starts/ends with a, z2={format_word(z2)} with b")

    for (i, j), u in zip(where, flat):
        common = max_common_factor_with_z(u, z1, z2)
        bound = _mu_scale(sort, i) * len(u)
        report.add("4", i, common <= bound, f"j={j}: common factor with z-products {common} {_op(common <= bound, '<=')} {_fmt(bound)}")
    return report


# ---------------------------------------------------------------------------
# inductive construction

Decider = Callable[[Word, tuple[RunWord, ...]], str]


@dataclass
class StepRecord:
    i: int
    w: Word
    verdict: str
    added: bool


@dataclass
class BuildResult:
    relators: list[RunWord]
    indices: list[int]
    trace: list[StepRecord]
    halted_at: int | None = None

    @property
    def complete(self) -> bool:
        return self.halted_at is None


def build_R(sort: SortTag, i_max: int, decider: Decider) -> BuildResult:
    """Run steps ``0..i_max``; step ``i`` adds its relators unless ``w_i = 1`` already follows.

    The decider receives ``w_i`` and the relators gathered by earlier steps and
    answers ``"trivial"``, ``"nontrivial"`` or ``"undecided"``; an undecided
    answer halts the construction at that step.
    """
    result = BuildResult([], [], [])
    prev = 0
    for i in range(i_max + 1):
        v, w = step_words(sort, i)
        ctx = StepContext(i, v, w, prev)
        prev = u_length(sort, i, prev, len(v), len(w))
        if w == "":
            result.trace.append(StepRecord(i, w, "trivial", False))
            continue
        verdict = decider(w, tuple(result.relators))
        if verdict == "undecided":
            result.trace.append(StepRecord(i, w, verdict, False))
            result.halted_at = i
            break
        if verdict == "trivial":
            result.trace.append(StepRecord(i, w, verdict, False))
            continue
        if verdict != "nontrivial":
            raise WordError(f"decider returned {verdict!r}")
        rel = gen_relators(sort, i, ctx)
        result.relators.extend(rel if isinstance(rel, tuple) else (rel,))
        result.indices.append(i)
        result.trace.append(StepRecord(i, w, verdict, True))
    return result


def min_relator_length_lower_bound(sort: SortTag, i: int) -> int:
    """Lower bound on the length of every relator added at step ``i``.

    Each relator contains ``2(2m+2)`` conjugator copies, and ``|u_i,1|`` is
    bounded below by the length formula with ``|v|, |w| = 0`` at every step.
    """
    if i < 0:
        raise ValueError("i must be non-negative")
    prev = 0
    for k in range(i + 1):
        prev = u_length(sort, k, prev, 0, 0)
    copies = 2 * sort.n + 2 if sort.kind == "I" else 2 * i + 2
    return 2 * copies * prev


def threshold_index(sort: SortTag, input_size: int) -> int:
    """Smallest ``k`` whose relator lower bound exceeds ``10 * input_size``.

    Relators from steps ``>= k`` cannot occur in a minimal diagram for an
    input of this size, so only steps ``0..k-1`` need to be materialized.
    """
    if input_size < 0:
        raise ValueError("input size must be non-negative")
    k = 0
    while min_relator_length_lower_bound(sort, k) <= 10 * input_size:
        k += 1
    return k
