"""String constraint solving for the weakly chaining fragment.

Thin wrapper over the C++ core: parsing, fragment classification, the full
decision pipeline and the bounded brute-force oracle.
"""

from chainfree._core import classify, decide, oracle_sat, solve_lia

__all__ = ["classify", "decide", "oracle_sat", "solve_lia"]
__version__ = "0.1.0"
