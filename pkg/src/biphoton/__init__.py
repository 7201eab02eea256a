"""Nonlocality and contextuality of biphoton (symmetric two-qubit) states."""
from .classify import (
    Label,
    RegionClassification,
    chsh_max,
    noncontextual_min,
    scan_region,
)
from .kcbs import kcbs_matrix, pentagram_directions, spectrum_from_s
from .symstate import SpectrumTriple, assemble_state, random_spectrum, spectrum

__version__ = "0.1.0"
