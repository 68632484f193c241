"""Quantum circuits for periodized wavelet and wavelet-packet transforms.

Circuits are built from Walsh-Hadamard stages, reversible increments and
local rotations, simulated on dense state vectors and checked against
classical QMF filter banks.
"""
from .builders import (
    build_decrement_mod, build_decrement_pow2, build_increment_mod, build_increment_pow2,
    build_local_rotation, build_split_analysis, build_split_synthesis, build_transform,
    build_walsh_hadamard,
)
from .circuit import (
    Circuit, CircuitError, Control, Gate, GateCountReport, Qubit, anc, compose, count_gates,
    data, invert, neg, pos, validate,
)
from .classical import (
    QmfPair, classical_transform, extract_qmf, lattice_factor, qmf_check, splitting_matrix,
    subband_permutation,
)
from .decompose import decompose_to_elementary
from .plan import TransformPlan
from .qcformat import parse, serialize
from .simulator import apply_circuit, extract_matrix, simulate
from .words import Rot, Shift, SplitWord, lattice_to_word

__version__ = "0.1.0"

__all__ = [
    "build_decrement_mod", "build_decrement_pow2", "build_increment_mod", "build_increment_pow2",
    "build_local_rotation", "build_split_analysis", "build_split_synthesis", "build_transform",
    "build_walsh_hadamard",
    "Circuit", "CircuitError", "Control", "Gate", "GateCountReport", "Qubit", "anc", "compose",
    "count_gates", "data", "invert", "neg", "pos", "validate",
    "QmfPair", "classical_transform", "extract_qmf", "lattice_factor", "qmf_check",
    "splitting_matrix", "subband_permutation",
    "decompose_to_elementary", "TransformPlan", "parse", "serialize",
    "apply_circuit", "extract_matrix", "simulate",
    "Rot", "Shift", "SplitWord", "lattice_to_word",
]
