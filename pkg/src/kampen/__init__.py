"""Combinatorial maps, van Kampen diagrams, S-map estimates and word problems
for the constructed two-generator groups."""

from __future__ import annotations

from .complex import Complex, OrientedEdge, classify_surface, euler_characteristic, oe
from .decide import decide_conjugacy, decide_word, decide_word_G
from .diagram import Diagram, Presentation
from .gmap import GMap, diamond_move, validate_map
from .presgen import SortTag, generate_family, params, verify_family
from .smap import SMap, check_D, check_Y, check_Z, hall_assign, verify_estimating_1, verify_estimating_2
from .words import Alphabet, RunWord, invert, reduce

__all__ = [
    "Alphabet", "Complex", "Diagram", "GMap", "OrientedEdge", "Presentation", "RunWord", "SMap",
    "SortTag", "check_D", "check_Y", "check_Z", "classify_surface", "decide_conjugacy",
    "decide_word", "decide_word_G", "diamond_move", "euler_characteristic", "generate_family",
    "hall_assign", "invert", "oe", "params", "reduce", "validate_map", "verify_estimating_1",
    "verify_estimating_2", "verify_family",
]
