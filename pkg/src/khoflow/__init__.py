"""Khovanov homology from planar diagrams, with the combinatorics of the
Khovanov flow category (resolution posets, ladybug matchings and the
index 3 boundary graphs)."""

from .cube import SignAssignment, random_gauge, standard_sign, verify_sign
from .homology import HomologyGroup, IntChainComplex, IntMatrix, moore_decomposition, smith_normal_form
from .khcomplex import build_complex, homology_table, reduced_complex, reduced_homology_table, skein_split
from .moduli import boundary_graph, build_poset, match_index2, right_pair, sweep_diagram, verify_6cycles
from .pd import LinkDiagram, PdCode, load_diagram, orient_and_sign, parse_pd
from .resolution import DecoratedConfig, LabeledConfig, ResolutionConfig, resolve

__version__ = "0.1.0"

__all__ = [
    "SignAssignment", "random_gauge", "standard_sign", "verify_sign",
    "HomologyGroup", "IntChainComplex", "IntMatrix", "moore_decomposition", "smith_normal_form",
    "build_complex", "homology_table", "reduced_complex", "reduced_homology_table", "skein_split",
    "boundary_graph", "build_poset", "match_index2", "right_pair", "sweep_diagram", "verify_6cycles",
    "LinkDiagram", "PdCode", "load_diagram", "orient_and_sign", "parse_pd",
    "DecoratedConfig", "LabeledConfig", "ResolutionConfig", "resolve",
]
