"""
Engine and self-test defaults.
"""

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class EngineConfig:
    """Tunable limits shared by the engine and the command line."""
    ordinal_depth_cap: int = 8  # nesting depth of CNF exponents
    stage_budget: int = 64  # successor steps per round of decompose
    precision: int = 40  # basis boxes used by usc_index_approx
    value_bound: Fraction = Fraction(1)  # M, top of the box enumeration
    hausdorff_eps: Fraction = Fraction(1, 2**20)
    seed: int = 0


@dataclass(frozen=True)
class SelftestConfig:
    """Corpus sizes for the acceptance suite run by ``baireorder selftest``."""
    order_laws_samples: int = 10_000
    oracle_pairs: int = 10_000
    oracle_horizon: int = 200
    combinator_exprs: int = 200
    combinator_max_points: int = 60
    decompositions: int = 100
    monotone_pairs: int = 500
    envelope_functions: int = 500
    envelope_majorants: int = 200
    usc_pairs: int = 1_000
    witness_pairs: int = 1_000
    witness_tail_pairs: int = 100
    evenize_members: int = 1_000
    scale: int = 1  # divide every corpus size by this
    fault: str = ""  # "parity" flips the ordinal parity table

    def size(self, name: str) -> int:
        """Corpus size for ``name`` after applying ``scale`` (at least 1)."""
        return max(1, getattr(self, name) // max(1, self.scale))


DEFAULT_CONFIG = EngineConfig()
