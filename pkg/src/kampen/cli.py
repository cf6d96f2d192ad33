"""Command-line interface.

Exit codes: 0 when the command succeeded or reached a verdict, 1 when a
validation or hypothesis check failed, 2 when a decision stayed undecided,
3 on usage or input errors.  Numbers in verdicts are printed as exact
``p/q`` rationals.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

from .complex import Complex, ComplexError, classify_surface, euler_characteristic, oe
from .decide import (
    UNDECIDED,
    Budget,
    decide_conjugacy,
    decide_word,
    decide_word_G,
)
from .diagram import (
    Diagram,
    DiagramError,
    Presentation,
    diagram_diamond_move,
    genus_and_cl_bound,
    validate_diagram,
)
from .gmap import GMap, MapError, diamond_move, open_map, remove_free_arc, validate_map
from .io import FormatError, convert, dumps, load_path, read_family, write_family
from .presgen import (
    SortTag,
    check_params,
    gamma_bound,
    generate_family,
    main_inequality,
    params,
    verify_family,
)
from .smap import (
    HypothesisError,
    SMap,
    SMapError,
    Template,
    check_D,
    check_Y,
    check_Z,
    family_templates,
    hall_assign,
    is_correct,
    is_special,
    verify_estimating_1,
    verify_estimating_2,
)
from .words import Alphabet, WordError, parse_word

OK, FAILED, UNDECIDED_EXIT, USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _q(x: Fraction | int) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _load(path: str, want: type) -> object:
    obj = load_path(path)
    if want is GMap:
        if isinstance(obj, SMap):
            return obj.map
        if isinstance(obj, Diagram):
            return obj.map
    if want is Diagram and isinstance(obj, SMap):
        return obj.diagram
    if want is SMap and isinstance(obj, Diagram):
        return SMap(obj.map, {}, {}, labels=obj.labels)
    if want is SMap and isinstance(obj, GMap):
        return SMap(obj, {}, {})
    if not isinstance(obj, want):
        raise FormatError(f"{path} holds a {type(obj).__name__}, not a {want.__name__}")
    return obj


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(",", " ").split()]


def _arcs(text: str | None) -> list[tuple]:
    if not text:
        return []
    return [tuple(oe(t) for t in chunk.split()) for chunk in text.split(";") if chunk.strip()]


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# commands


def cmd_gen_presentation(a: argparse.Namespace) -> int:
    sort = SortTag.parse(a.sort)
    for p in write_family(a.out, sort, generate_family(sort, a.max_i)):
        print(p)
    return OK


def cmd_check_family(a: argparse.Namespace) -> int:
    sort = SortTag.parse(a.sort)
    family = read_family(a.dir)[: a.max_i + 1] if a.dir else None
    rep = verify_family(sort, a.max_i, family)
    print(rep.render())
    return OK if rep.ok else FAILED


def cmd_params(a: argparse.Namespace) -> int:
    ok = True
    for n in range(a.n, (a.upto if a.upto is not None else a.n) + 1):
        p = params(n)
        first, second = check_params(n)
        ok = ok and first and second
        if a.upto is None or not (first and second):
            print(f"n={n} lambda={_q(p.lam)} mu={_q(p.mu)} nu={_q(p.nu)}")
            print(f"  2lambda+(14n+8)mu+(2n+1)/(4n+4) = {_q(main_inequality(p))} < 1/2: {first}")
            print(f"  lambda+(8n+11)mu+2nu = {_q(gamma_bound(p))} < 19/44: {second}")
    if a.upto is not None:
        print(f"n={a.n}..{a.upto}: {'all hold' if ok else 'violations above'}")
    return OK if ok else FAILED


def cmd_euler(a: argparse.Namespace) -> int:
    obj = load_path(a.file)
    c = obj if not hasattr(obj, "complex") else obj.complex  # type: ignore[union-attr]
    if isinstance(obj, Diagram):
        c = obj.map.complex
    print(euler_characteristic(c))
    return OK


def cmd_classify(a: argparse.Namespace) -> int:
    obj = load_path(a.file)
    c = obj.map.complex if isinstance(obj, Diagram) else getattr(obj, "complex", obj)
    print(classify_surface(c).describe())
    return OK


def cmd_diamond(a: argparse.Namespace) -> int:
    obj = load_path(a.file)
    e1, e2 = oe(a.e1), oe(a.e2)
    if isinstance(obj, Diagram):
        d, kind = diagram_diamond_move(obj, e1, e2)
        print(f"kind: {kind}")
        _write(a.out, dumps(d))
        return OK
    m = obj.map if isinstance(obj, SMap) else obj
    if isinstance(m, Complex):
        m = open_map(m)
    moved, info = diamond_move(m, e1, e2)  # type: ignore[arg-type]
    print(f"kind: {info.kind}{' (loop case)' if info.loop_case else ''}")
    print(f"vertex delta: {info.vertex_delta}, euler delta: {info.euler_delta}, "
          f"component delta: {info.component_delta}")
    _write(a.out, dumps(moved))
    return OK


def cmd_remove_arc(a: argparse.Namespace) -> int:
    m = _load(a.file, GMap)
    out = remove_free_arc(m, [oe(t) for t in a.arc.split()])  # type: ignore[arg-type]
    print(f"contours: {len(out.contours)}")
    _write(a.out, dumps(out))
    return OK


def cmd_validate_map(a: argparse.Namespace) -> int:
    rep = validate_map(_load(a.file, GMap))  # type: ignore[arg-type]
    print(rep.render("map"))
    return OK if rep.ok else FAILED


def _presentation(a: argparse.Namespace) -> Presentation:
    alphabet = Alphabet(tuple(a.alphabet)) if getattr(a, "alphabet", None) else Alphabet()
    rels = tuple(parse_word(r) for r in (a.relators or "").split(",") if r.strip())
    return Presentation(alphabet, rels, certified=getattr(a, "certified", False) or not rels)


def cmd_validate_diagram(a: argparse.Namespace) -> int:
    rep = validate_diagram(_load(a.file, Diagram), _presentation(a))  # type: ignore[arg-type]
    print(rep.render("diagram"))
    return OK if rep.ok else FAILED


def cmd_genus(a: argparse.Namespace) -> int:
    g, cl = genus_and_cl_bound(_load(a.file, Diagram))  # type: ignore[arg-type]
    print(f"genus: {g}")
    print(f"commutator length bound: {cl}")
    return OK


def _templates(a: argparse.Namespace, s: SMap) -> dict[int, list[Template]]:
    if a.templates:
        out: dict[int, list[Template]] = {}
        for n, line in enumerate(Path(a.templates).read_text().splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            fields = {k.strip(): v.strip() for k, _, v in (part.partition(":") for part in line.split(";")) if k.strip()}
            try:
                rank = int(fields["rank"])
                us = tuple(parse_word(u) for u in fields["us"].split(","))
                tpl = Template(us, parse_word(fields.get("w", "1")), parse_word(fields.get("tail", "1")))
            except (KeyError, ValueError) as exc:
                raise FormatError(f"template line needs rank, us, w, tail ({exc})", n, 1) from None
            out.setdefault(rank, []).append(tpl)
        return out
    if s.sort is None:
        raise UsageError("give --templates or a file with a sort section")
    top = max(s.ranks.values(), default=1)
    return family_templates(s.sort, max(0, top - 1))


def cmd_check_correct(a: argparse.Namespace) -> int:
    s = _load(a.file, SMap)
    rep = is_correct(s, _templates(a, s))  # type: ignore[arg-type]
    print(rep.render("S-diagram (correctness)"))
    return OK if rep.ok else FAILED


def cmd_check_special(a: argparse.Namespace) -> int:
    s = _load(a.file, SMap)
    rep = is_special(s, _templates(a, s))  # type: ignore[arg-type]
    print(rep.render("S-diagram (special)"))
    return OK if rep.ok else FAILED


def cmd_check_Z(a: argparse.Namespace) -> int:
    res = check_Z(_load(a.file, SMap), _ints(a.phi), a.n)  # type: ignore[arg-type]
    print(f"Z({a.n}) {res.render()}")
    for g, iv, t in res.witness:
        print(f"  face {g} interval {tuple(iv)} read {'forward' if t > 0 else 'backward'}")
    return OK if res.holds else FAILED


def cmd_check_Y(a: argparse.Namespace) -> int:
    res = check_Y(_load(a.file, SMap))  # type: ignore[arg-type]
    print(res.render())
    return OK if res.holds else FAILED


def cmd_check_D(a: argparse.Namespace) -> int:
    rel = _ints(a.relative_to) if a.relative_to else None
    res = check_D(_load(a.file, SMap), Fraction(a.lam), Fraction(a.mu), Fraction(a.nu),  # type: ignore[arg-type]
                  a.variant, rel)
    print(res.render())
    return OK if res.holds else FAILED


def cmd_verify_el1(a: argparse.Namespace) -> int:
    s = _load(a.file, SMap)
    B = _ints(a.B) if a.B is not None else None
    res = verify_estimating_1(s, _arcs(a.A), _ints(a.C), _ints(a.D), B)  # type: ignore[arg-type]
    print(res.render())
    return OK if res.holds else FAILED


def cmd_verify_el2(a: argparse.Namespace) -> int:
    res = verify_estimating_2(_load(a.file, SMap))  # type: ignore[arg-type]
    print(res.render())
    return OK if res.holds else FAILED


def cmd_hall(a: argparse.Namespace) -> int:
    A = [x for x in (a.A or "").split(",") if x]
    B = [y for y in (a.B or "").split(",") if y]
    R: dict[str, set[str]] = {x: set() for x in A}
    for part in (a.R or "").split(";"):
        if part.strip():
            x, _, ys = part.partition(":")
            R.setdefault(x.strip(), set()).update(y.strip() for y in ys.split(",") if y.strip())
    w = {}
    for part in (a.w or "").split(","):
        if part.strip():
            y, _, k = part.partition(":")
            w[y.strip()] = int(k)
    res = hall_assign(A, B, R, w)
    if res.ok:
        print("assignment: " + ", ".join(f"{x}->{y}" for x, y in sorted(res.assignment.items())))  # type: ignore[union-attr]
        return OK
    print("deficiency: {" + ", ".join(sorted(res.deficiency)) + "}")  # type: ignore[arg-type]
    return FAILED


def _exit_for(verdict: str) -> int:
    return UNDECIDED_EXIT if verdict == UNDECIDED else OK


def _g_summary(res) -> str:  # noqa: ANN001
    if res.verdict != UNDECIDED and res.k == 0 and res.relator_count == 0:
        return f"{res.verdict} (free fast path, k=0)"
    return f"{res.verdict} (k={res.k}, relators={res.relator_count})"


def cmd_decide_word(a: argparse.Namespace) -> int:
    x = parse_word(a.word)
    if a.sort:
        res = decide_word_G(SortTag.parse(a.sort), x)
        print(_g_summary(res))
        if res.witness is not None:
            _write(a.witness_out, dumps(res.witness))
        return _exit_for(res.verdict)
    p = _presentation(a)
    budget = Budget(a.max_edges, 2 * a.max_edges, a.max_edges) if a.max_edges else None
    r = decide_word(p, x, budget, a.timeout)
    print(f"{r.verdict} (budget {r.budget.max_edges} edges{', truncated' if r.truncated else ''})")
    if r.witness is not None:
        _write(a.witness_out, dumps(r.witness))
    return _exit_for(r.verdict)


def cmd_decide_conj(a: argparse.Namespace) -> int:
    x, y = parse_word(a.x), parse_word(a.y)
    p = _presentation(a)
    budget = Budget(a.max_edges, 2 * a.max_edges, a.max_edges) if a.max_edges else None
    r = decide_conjugacy(p, x, y, budget, a.timeout)
    print(f"{r.verdict} (branch {r.branch}, budget {r.budget.max_edges} edges)")
    if r.witness is not None:
        _write(a.witness_out, dumps(r.witness))
    return _exit_for(r.verdict)


def cmd_decide_word_G(a: argparse.Namespace) -> int:
    res = decide_word_G(SortTag.parse(a.sort), parse_word(a.word))
    print(res.render_trace())
    print(_g_summary(res))
    if res.witness is not None:
        _write(a.witness_out, dumps(res.witness))
    return _exit_for(res.verdict)


def cmd_convert(a: argparse.Namespace) -> int:
    out = convert(Path(a.file).read_text(), a.src, a.dst)
    if a.out:
        Path(a.out).write_text(out)
    else:
        sys.stdout.write(out)
    return OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kampen", description="Maps, diagrams, S-map estimates and word problems.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, fn: Callable[[argparse.Namespace], int], help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("gen-presentation", cmd_gen_presentation, "write the conjugator family and relators")
    sp.add_argument("--sort", required=True, help="I.<n> or II")
    sp.add_argument("--max-i", type=int, required=True)
    sp.add_argument("--out", required=True, help="output directory")

    sp = add("check-family", cmd_check_family, "check the conditions on a generated or stored family")
    sp.add_argument("--sort", required=True)
    sp.add_argument("--max-i", type=int, required=True)
    sp.add_argument("dir", nargs="?", help="family directory (generated on the fly when omitted)")

    sp = add("params", cmd_params, "the parameter sequences and both inequalities")
    sp.add_argument("--n", type=int, default=0)
    sp.add_argument("--upto", type=int, help="check every n up to this bound")

    for name, fn, what in (("euler", cmd_euler, "Euler characteristic"),
                           ("classify", cmd_classify, "surface type")):
        sp = add(name, fn, what)
        sp.add_argument("file")

    sp = add("diamond", cmd_diamond, "diamond move along two co-terminal oriented edges")
    sp.add_argument("file")
    sp.add_argument("--e1", required=True, help="oriented edge such as +3")
    sp.add_argument("--e2", required=True)
    sp.add_argument("--out")

    sp = add("remove-arc", cmd_remove_arc, "remove a free arc")
    sp.add_argument("file")
    sp.add_argument("--arc", required=True, help="oriented edges, e.g. '+1 +2'")
    sp.add_argument("--out")

    sp = add("validate-map", cmd_validate_map, "check the map axioms")
    sp.add_argument("file")

    sp = add("validate-diagram", cmd_validate_diagram, "check a diagram against a presentation")
    sp.add_argument("file")
    sp.add_argument("--relators", default="", help="comma-separated relators")
    sp.add_argument("--alphabet", help="generator symbols, e.g. ab")

    sp = add("genus", cmd_genus, "genus of the closure of a one-contour diagram")
    sp.add_argument("file")

    for name, fn, text in (("check-correct", cmd_check_correct, "clauses of a correct S-diagram"),
                           ("check-special", cmd_check_special, "correct plus weakly reduced with no extendible arc")):
        sp = add(name, fn, text)
        sp.add_argument("file")
        sp.add_argument("--templates", help="lines 'rank: 1; us: abb,ba; w: a; tail: B'")

    sp = add("check-Z", cmd_check_Z, "condition Z(n) relative to a simple disc submap")
    sp.add_argument("file")
    sp.add_argument("--phi", required=True, help="face ids of the submap")
    sp.add_argument("--n", type=int, default=2)

    sp = add("check-Y", cmd_check_Y, "condition Y")
    sp.add_argument("file")

    sp = add("check-D", cmd_check_D, "condition D or D' with constant lambda, mu, nu")
    sp.add_argument("file")
    sp.add_argument("--lambda", dest="lam", default="1")
    sp.add_argument("--mu", default="1")
    sp.add_argument("--nu", default="1")
    sp.add_argument("--variant", choices=("D", "D'"), default="D")
    sp.add_argument("--relative-to", help="face ids of the submap (default: all)")

    sp = add("verify-el1", cmd_verify_el1, "First Estimating Lemma on an instance")
    sp.add_argument("file")
    sp.add_argument("--A", default="", help="arcs separated by ';', e.g. '+0 +1; -4'")
    sp.add_argument("--B")
    sp.add_argument("--C", default="")
    sp.add_argument("--D", default="")

    sp = add("verify-el2", cmd_verify_el2, "Second Estimating Lemma on an instance")
    sp.add_argument("file")

    sp = add("hall", cmd_hall, "capacitated Hall assignment or a deficient set")
    sp.add_argument("--A", default="", help="comma-separated elements")
    sp.add_argument("--B", default="")
    sp.add_argument("--R", default="", help="'x1:y1,y2;x2:y1'")
    sp.add_argument("--w", default="", help="'y1:2,y2:1'")

    for name, fn, text in (("decide-word", cmd_decide_word, "is the word trivial: bounded disc diagram search"),
                           ("decide-conj", cmd_decide_conj, "are x and y conjugate: bounded annular diagram search")):
        sp = add(name, fn, text)
        if name == "decide-word":
            sp.add_argument("--word", required=True)
            sp.add_argument("--sort", help="decide in the constructed group of this sort")
        else:
            sp.add_argument("--x", required=True)
            sp.add_argument("--y", required=True)
        sp.add_argument("--relators", default="")
        sp.add_argument("--alphabet")
        sp.add_argument("--certified", action="store_true",
                        help="the presentation satisfies the 6|w| edge bound")
        sp.add_argument("--max-edges", type=int)
        sp.add_argument("--timeout", type=float)
        sp.add_argument("--witness-out")

    sp = add("decide-word-G", cmd_decide_word_G, "word problem in a constructed group, with trace")
    sp.add_argument("--sort", required=True)
    sp.add_argument("--word", required=True)
    sp.add_argument("--witness-out")

    sp = add("convert", cmd_convert, "convert between text/json or literal/runs forms")
    sp.add_argument("file")
    sp.add_argument("--from", dest="src", required=True)
    sp.add_argument("--to", dest="dst", required=True)
    sp.add_argument("--out")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE
    except HypothesisError as exc:
        print(f"hypothesis not met: {exc}", file=sys.stderr)
        return FAILED
    except (FormatError, WordError, ComplexError, MapError, DiagramError, SMapError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    raise SystemExit(main())
