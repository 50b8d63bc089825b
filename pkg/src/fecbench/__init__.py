"""fecbench — polar SC/SSC and LDPC layered min-sum decoding under one
LLR-operation accounting model.

Every soft operation on log-likelihood ratios is classified as either an
ADD or a MIN and charged to an :class:`~fecbench.llr.OpLedger`; hard
decisions, XORs and syndrome checks are bit operations and cost nothing.
This makes decoder families with very different structure (recursive
polar decoding vs. iterative message passing) comparable by a single
number: counted operations per information bit.
"""

__version__ = "0.1.0"

from .llr import FLOAT, FixedMode, LlrValue, OpLedger, f_minsum, g_update, hard_decision, ledger_merge

__all__ = [
    "FLOAT",
    "FixedMode",
    "LlrValue",
    "OpLedger",
    "f_minsum",
    "g_update",
    "hard_decision",
    "ledger_merge",
    "__version__",
]
