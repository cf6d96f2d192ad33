"""Text and JSON forms of complexes, maps, diagrams and S-maps, plus family directories.

The text form is one ``key: value`` section per line, values written in a
small flow syntax::

    vertices: [0, 1]
    edges: {0: [0, 1], 1: [1, 0]}
    faces: {0: [+0, +1]}
    face_contours: {0: [0, 1]}
    contours: [[0, [-1, -0]]]
    labels: {0: a, 1: b}

Oriented edges keep their sign even for edge 0, which is why the parser
keeps scalars as text and leaves interpretation to each section.  Lines
starting with ``#`` are comments.  Formatting is canonical (sorted by id),
so ``dump(load(text)) == text`` for every canonically written file.
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Any, Union

from .complex import Complex, OrientedEdge, oe
from .diagram import Diagram
from .gmap import Contour, GMap
from .presgen import FamilyStep, SortTag, gen_relators, StepContext
from .smap import FULL, Interval, SMap
from .words import RunWord, format_runs, format_word, parse_runs, parse_word


class FormatError(ValueError):
    """Malformed input, reported with its line and column."""

    def __init__(self, msg: str, line: int = 0, col: int = 0) -> None:
        where = f"line {line}, column {col}: " if line else ""
        super().__init__(where + msg)
        self.line, self.col = line, col


SECTIONS = ("vertices", "edges", "faces", "face_contours", "contours", "labels",
            "ranks", "selection", "exceptional", "sort")
_TOKEN = re.compile(r"\s*(?:([\[\]{}:,])|([+-]?\d+|[A-Za-z_][\w.]*))")


# ---------------------------------------------------------------------------
# flow syntax


def _parse_value(text: str, line: int, offset: int) -> Any:
    toks: list[tuple[str, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormatError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line,
                              offset + pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1)
        toks.append((m.group(1) or m.group(2), offset + m.start(m.lastindex) + 1))
        pos = m.end()
    k = 0

    def peek() -> tuple[str, int]:
        return toks[k] if k < len(toks) else ("<end>", offset + len(text) + 1)

    def take(want: str | None = None) -> str:
        nonlocal k
        tok, col = peek()
        if tok == "<end>" or (want is not None and tok != want):
            raise FormatError(f"expected {repr(want) if want else 'a value'}, found {tok!r}", line, col)
        k += 1
        return tok

    def value() -> Any:
        tok, col = peek()
        if tok == "[":
            take("[")
            out = []
            while peek()[0] != "]":
                out.append(value())
                if peek()[0] != "]":
                    take(",")
            take("]")
            return out
        if tok == "{":
            take("{")
            out: dict = {}
            while peek()[0] != "}":
                key = take()
                if key in "[]{}:,":
                    raise FormatError(f"expected a key, found {key!r}", line, peek()[1])
                take(":")
                out[key] = value()
                if peek()[0] != "}":
                    take(",")
            take("}")
            return out
        if tok in ("]", "}", ":", ","):
            raise FormatError(f"unexpected {tok!r}", line, col)
        return take()

    v = value()
    if k != len(toks):
        raise FormatError(f"trailing {toks[k][0]!r}", line, toks[k][1])
    return v


def _fmt(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    return str(v)


def parse_sections(text: str) -> dict[str, tuple[Any, int]]:
    """``section -> (raw value, line number)``."""
    out: dict[str, tuple[Any, int]] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        m = re.match(r"([A-Za-z_]+)\s*:", raw)
        if not m:
            raise FormatError("expected a 'section: value' line", n, 1)
        name = m.group(1)
        if name not in SECTIONS:
            raise FormatError(f"unknown section {name!r}", n, 1)
        if name in out:
            raise FormatError(f"section {name!r} repeated", n, 1)
        out[name] = (_parse_value(raw[m.end():], n, m.end()), n)
    return out


# ---------------------------------------------------------------------------
# structured values <-> objects


def _int(tok: Any, line: int, what: str) -> int:
    if isinstance(tok, str) and re.fullmatch(r"\d+", tok):
        return int(tok)
    raise FormatError(f"{what}: expected a non-negative integer, found {tok!r}", line, 1)


def _edge(tok: Any, line: int) -> OrientedEdge:
    if isinstance(tok, str) and re.fullmatch(r"[+-]\d+", tok):
        return oe(tok)
    raise FormatError(f"expected a signed edge like +3 or -3, found {tok!r}", line, 1)


def _oe_text(x: OrientedEdge) -> str:
    return str(OrientedEdge(*x))


def _need(sec: dict, name: str) -> tuple[Any, int]:
    if name not in sec:
        raise FormatError(f"missing section {name!r}")
    return sec[name]


def complex_from_sections(sec: dict) -> Complex:
    vs, lv = _need(sec, "vertices")
    es, le = _need(sec, "edges")
    fs, lf = _need(sec, "faces")
    if not isinstance(vs, list) or not isinstance(es, dict) or not isinstance(fs, dict):
        raise FormatError("vertices must be a list, edges and faces maps", lv)
    edges = {}
    for k, ends in es.items():
        if not isinstance(ends, list) or len(ends) != 2:
            raise FormatError(f"edge {k} needs two end vertices", le, 1)
        edges[_int(k, le, "edge id")] = (_int(ends[0], le, "vertex"), _int(ends[1], le, "vertex"))
    faces = {}
    for k, bd in fs.items():
        if not isinstance(bd, list):
            raise FormatError(f"face {k} needs a list of signed edges", lf, 1)
        faces[_int(k, lf, "face id")] = tuple(_edge(t, lf) for t in bd)
    return Complex(tuple(_int(v, lv, "vertex") for v in vs), edges, faces)


def complex_sections(c: Complex) -> dict[str, Any]:
    return {
        "vertices": [str(v) for v in c.vertices],
        "edges": {str(e): [str(a), str(b)] for e, (a, b) in c.edges.items()},
        "faces": {str(f): [_oe_text(x) for x in bd] for f, bd in c.faces.items()},
    }


def map_from_sections(sec: dict) -> GMap:
    c = complex_from_sections(sec)
    fc: dict[int, tuple[int, int]] = {}
    if "face_contours" in sec:
        raw, line = sec["face_contours"]
        for k, v in raw.items():
            if not isinstance(v, list) or len(v) != 2 or v[1] not in ("1", "-1", "+1"):
                raise FormatError(f"face contour of {k} must be [start, 1 or -1]", line, 1)
            fc[_int(k, line, "face id")] = (_int(v[0], line, "slot"), int(v[1]))
    contours = []
    if "contours" in sec:
        raw, line = sec["contours"]
        for item in raw:
            if not isinstance(item, list) or len(item) != 2 or not isinstance(item[1], list):
                raise FormatError("each contour is [base vertex, [signed edges]]", line, 1)
            contours.append(Contour(_int(item[0], line, "vertex"), tuple(_edge(t, line) for t in item[1])))
    return GMap(c, fc, tuple(contours))


def map_sections(m: GMap) -> dict[str, Any]:
    out = complex_sections(m.complex)
    out["face_contours"] = {str(f): [str(s), str(d)] for f, (s, d) in m.face_contours.items()}
    out["contours"] = [[str(con.vertex), [_oe_text(x) for x in con.edges]] for con in m.contours]
    return out


def diagram_from_sections(sec: dict) -> Diagram:
    m = map_from_sections(sec)
    raw, line = _need(sec, "labels")
    labels = {}
    for k, v in raw.items():
        if not isinstance(v, str) or len(v) != 1 or not v.isalpha():
            raise FormatError(f"label of edge {k} must be one letter", line, 1)
        labels[_int(k, line, "edge id")] = v
    return Diagram(m, labels)


def diagram_sections(d: Diagram) -> dict[str, Any]:
    out = map_sections(d.map)
    out["labels"] = {str(e): c for e, c in d.labels.items()}
    return out


def smap_from_sections(sec: dict) -> SMap:
    m = map_from_sections(sec)
    labels = diagram_from_sections(sec).labels if "labels" in sec else None
    ranks: dict[int, int] = {}
    if "ranks" in sec:
        raw, line = sec["ranks"]
        ranks = {_int(k, line, "face id"): _int(v, line, "rank") for k, v in raw.items()}
    selection: dict[int, Any] = {}
    if "selection" in sec:
        raw, line = sec["selection"]
        for k, v in raw.items():
            f = _int(k, line, "face id")
            if v == FULL:
                selection[f] = FULL
            elif isinstance(v, list):
                ivs = []
                for iv in v:
                    if not isinstance(iv, list) or len(iv) != 2:
                        raise FormatError(f"selection of face {k}: intervals are [start, length]", line, 1)
                    ivs.append(Interval(_int(iv[0], line, "start"), _int(iv[1], line, "length")))
                selection[f] = tuple(ivs)
            else:
                raise FormatError(f"selection of face {k} must be 'full' or a list of intervals", line, 1)
    exceptional = []
    if "exceptional" in sec:
        raw, line = sec["exceptional"]
        for arc in raw:
            if not isinstance(arc, list):
                raise FormatError("exceptional arcs are lists of signed edges", line, 1)
            exceptional.append(tuple(_edge(t, line) for t in arc))
    sort = None
    if "sort" in sec:
        raw, line = sec["sort"]
        try:
            sort = SortTag.parse(raw)
        except (ValueError, TypeError) as exc:
            raise FormatError(str(exc), line, 1) from None
    return SMap(m, ranks, selection, tuple(exceptional), labels, sort)


def smap_sections(s: SMap) -> dict[str, Any]:
    out = diagram_sections(s.diagram) if s.labels is not None else map_sections(s.map)
    out["ranks"] = {str(f): str(r) for f, r in s.ranks.items()}
    out["selection"] = {str(f): FULL if sel == FULL else [[str(iv.start), str(iv.length)] for iv in sel]
                        for f, sel in s.selection.items()}
    out["exceptional"] = [[_oe_text(x) for x in arc] for arc in s.exceptional]
    if s.sort is not None:
        out["sort"] = str(s.sort)
    return out


Structure = Union[Complex, GMap, Diagram, SMap]


def to_sections(obj: Structure) -> dict[str, Any]:
    if isinstance(obj, SMap):
        return smap_sections(obj)
    if isinstance(obj, Diagram):
        return diagram_sections(obj)
    if isinstance(obj, GMap):
        return map_sections(obj)
    if isinstance(obj, Complex):
        return complex_sections(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_sections(sec: dict) -> Structure:
    """The richest structure the sections describe."""
    if {"ranks", "selection", "exceptional", "sort"} & set(sec):
        return smap_from_sections(sec)
    if "labels" in sec:
        return diagram_from_sections(sec)
    if "face_contours" in sec or "contours" in sec:
        return map_from_sections(sec)
    return complex_from_sections(sec)


def dumps(obj: Structure) -> str:
    return "".join(f"{k}: {_fmt(v)}\n" for k, v in to_sections(obj).items())


def loads(text: str) -> Structure:
    return from_sections(parse_sections(text))


def to_json(obj: Structure) -> str:
    return json.dumps(to_sections(obj), indent=1) + "\n"


def from_json(text: str) -> Structure:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, dict):
        raise FormatError("top level must be an object", 1, 1)
    unknown = set(raw) - set(SECTIONS)
    if unknown:
        raise FormatError(f"unknown section {sorted(unknown)[0]!r}", 1, 1)

    def text_scalars(v: Any) -> Any:
        if isinstance(v, list):
            return [text_scalars(x) for x in v]
        if isinstance(v, dict):
            return {str(k): text_scalars(x) for k, x in v.items()}
        return str(v)

    return from_sections({k: (text_scalars(v), 0) for k, v in raw.items()})


def load_path(path: Union[str, Path]) -> Structure:
    text = Path(path).read_text()
    return from_json(text) if text.lstrip().startswith("{") else loads(text)


# ---------------------------------------------------------------------------
# conversion


WORD_FORMATS = ("literal", "runs")
STRUCT_FORMATS = ("text", "json")


def convert(text: str, src: str, dst: str) -> str:
    """Convert between ``text``/``json`` structure forms or ``literal``/``runs`` word forms."""
    if src in WORD_FORMATS and dst in WORD_FORMATS:
        out = []
        for n, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                out.append(line)
                continue
            key, sep, raw = line.rpartition(":")
            prefix = key + sep + " " if sep else ""
            body = raw.strip()
            start = len(key) + len(sep) + len(raw) - len(raw.lstrip())
            try:
                if body == "1" or src == "literal":
                    w = RunWord.from_word(parse_word(body))
                else:
                    w = parse_runs(body)
            except ValueError as exc:
                col = getattr(exc, "column", 0) or 1
                raise FormatError(str(exc), n, start + col) from None
            out.append(prefix + (format_runs(w) if dst == "runs" else format_word(w.to_word())))
        return "\n".join(out) + ("\n" if out else "")
    if src in STRUCT_FORMATS and dst in STRUCT_FORMATS:
        obj = from_json(text) if src == "json" else loads(text)
        return to_json(obj) if dst == "json" else dumps(obj)
    raise FormatError(f"cannot convert {src} to {dst}; formats are {WORD_FORMATS} or {STRUCT_FORMATS}")


# ---------------------------------------------------------------------------
# family directories


def write_family(directory: Union[str, Path], sort: SortTag, steps: list[FamilyStep]) -> list[Path]:
    """One ``step-<i>.txt`` per step (``v``, ``w`` and each ``u``) plus ``relators.txt``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    written = []
    relators: list[RunWord] = []
    prev = 0
    for st in steps:
        p = d / f"step-{st.i}.txt"
        lines = [f"# sort {sort}, step {st.i}", f"v: {format_word(st.v)}", f"w: {format_word(st.w)}"]
        lines += [f"u{j}: {format_runs(u)}" for j, u in enumerate(st.us, start=1)]
        p.write_text("\n".join(lines) + "\n")
        written.append(p)
        rel = gen_relators(sort, st.i, StepContext(st.i, st.v, st.w, prev), st.us)
        relators.extend(rel if isinstance(rel, tuple) else (rel,))
        prev = st.u_len
    p = d / "relators.txt"
    p.write_text("".join(format_runs(r) + "\n" for r in relators))
    written.append(p)
    return written


def read_family(directory: Union[str, Path]) -> list[FamilyStep]:
    d = Path(directory)
    files = sorted(d.glob("step-*.txt"), key=lambda p: int(p.stem.split("-")[1]))
    if not files:
        raise FormatError(f"no step files in {d}")
    steps = []
    for p in files:
        i = int(p.stem.split("-")[1])
        v = w = ""
        us: list[RunWord] = []
        for n, line in enumerate(p.read_text().splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            key, sep, val = line.partition(":")
            if not sep:
                raise FormatError(f"{p.name}: expected 'key: value'", n, 1)
            key = key.strip()
            try:
                if key == "v":
                    v = parse_word(val)
                elif key == "w":
                    w = parse_word(val)
                elif re.fullmatch(r"u\d+", key):
                    us.append(parse_runs(val))
                else:
                    raise FormatError(f"{p.name}: unknown key {key!r}", n, 1)
            except FormatError:
                raise
            except ValueError as exc:
                raise FormatError(f"{p.name}: {exc}", n, len(key) + 2) from None
        steps.append(FamilyStep(i, v, w, us))
    return steps


__all__ = [
    "FormatError",
    "convert",
    "dumps",
    "from_json",
    "from_sections",
    "load_path",
    "loads",
    "parse_sections",
    "read_family",
    "to_json",
    "to_sections",
    "write_family",
]
