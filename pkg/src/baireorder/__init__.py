"""
BaireOrder: exact computation with alternating-lexicographic transfinite sequences.

Compares finitely presented decreasing sequences of rationals, builds order
embeddings into them, decomposes finitary functions on [0, omega^k] into
alternating sums of upper semicontinuous stages and constructs the compact
witnesses that separate the associated families of sets.
"""

__version__ = "0.1.0"

from .combinators import compile_expr, expr_from_json, points, verify_embedding
from .hyperspace import CompactFig, check_witness, psi_compact, witness_between
from .kl import FinitaryFunction, decompose, fn_indicator, star_sum, theta_compare
from .ordinal import Order, Ordinal
from .seq import TransfiniteSeq, altlex_compare, delta_first_difference, evenize, seq

__all__ = [
    "CompactFig",
    "FinitaryFunction",
    "Order",
    "Ordinal",
    "TransfiniteSeq",
    "altlex_compare",
    "check_witness",
    "compile_expr",
    "decompose",
    "delta_first_difference",
    "evenize",
    "expr_from_json",
    "fn_indicator",
    "points",
    "psi_compact",
    "seq",
    "star_sum",
    "theta_compare",
    "verify_embedding",
    "witness_between",
]
