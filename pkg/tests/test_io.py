from __future__ import annotations

from pathlib import Path

import pytest

from kampen.complex import Complex
from kampen.diagram import Diagram, octagon_diagram, torus_commutator_diagram
from kampen.gmap import GMap, open_map
from kampen.io import (
    FormatError,
    convert,
    dumps,
    from_json,
    load_path,
    loads,
    read_family,
    to_json,
    write_family,
)
from kampen.presgen import SortTag, generate_family
from kampen.smap import SMap

DATA = Path(__file__).parent / "data"


@pytest.mark.parametrize("name, kind", [
    ("torus.txt", Complex),
    ("disc.txt", GMap),
    ("commutator_diagram.txt", Diagram),
    ("two_faces_smap.txt", SMap),
])
def test_loads_richest_structure(name: str, kind: type) -> None:
    assert type(load_path(DATA / name)) is kind


@pytest.mark.parametrize("name", ["torus.txt", "disc.txt", "commutator_diagram.txt", "two_faces_smap.txt"])
def test_text_and_json_round_trip(name: str) -> None:
    text = (DATA / name).read_text()
    obj = loads(text)
    assert dumps(obj) == text
    assert dumps(from_json(to_json(obj))) == text
    assert convert(convert(text, "text", "json"), "json", "text") == text


@pytest.mark.parametrize("obj", [torus_commutator_diagram(), octagon_diagram()])
def test_diagram_round_trip(obj: Diagram) -> None:
    assert loads(dumps(obj)) == obj


def test_open_map_round_trip() -> None:
    m = open_map(loads((DATA / "torus.txt").read_text()))
    assert dumps(loads(dumps(m))) == dumps(m)


class TestWordConversion:
    def test_literal_to_runs(self) -> None:
        assert convert("aaa\n", "literal", "runs") == "a^3\n"

    def test_runs_to_literal(self) -> None:
        assert convert("a^3 B^2\n", "runs", "literal") == "aaaBB\n"

    def test_keeps_prefixes_comments_and_empty_word(self) -> None:
        text = "# step 0\nv: a\nw: 1\n\nu1: abb\n"
        assert convert(text, "literal", "runs") == "# step 0\nv: a^1\nw: 1\n\nu1: a^1 b^2\n"

    def test_error_column_points_at_token(self) -> None:
        with pytest.raises(FormatError) as info:
            convert("u1:  a^3 b^q\n", "runs", "literal")
        assert (info.value.line, info.value.col) == (1, 10)

    def test_unknown_formats(self) -> None:
        with pytest.raises(FormatError):
            convert("a", "literal", "json")


class TestMalformed:
    def test_unclosed_bracket(self) -> None:
        with pytest.raises(FormatError) as info:
            loads("vertices: [0, 1\n")
        assert (info.value.line, info.value.col) == (1, 16)

    def test_unknown_section_header(self) -> None:
        with pytest.raises(FormatError) as info:
            loads("vertices: [0]\nfoo: [1]\n")
        assert info.value.line == 2
        assert "foo" in str(info.value)

    def test_missing_colon(self) -> None:
        with pytest.raises(FormatError, match="line 1, column 1"):
            loads("vertices [0]\n")

    def test_bad_json(self) -> None:
        with pytest.raises(FormatError) as info:
            from_json('{"vertices": [0,]}')
        assert info.value.line == 1


def test_family_directory_round_trip(tmp_path: Path) -> None:
    sort = SortTag.parse("I.0")
    steps = generate_family(sort, 1)
    files = write_family(tmp_path, sort, steps)
    assert [p.name for p in files] == ["step-0.txt", "step-1.txt", "relators.txt"]
    back = read_family(tmp_path)
    assert [(s.v, s.w, s.us) for s in back] == [(s.v, s.w, s.us) for s in steps]
