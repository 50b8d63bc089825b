"""LLR value/mode types and the operation ledger shared by all decoders.

The accounting model: soft operations on LLRs are either an ADD (signed
addition, including subtraction) or a MIN (magnitude comparison with sign
bookkeeping). The two are weighted equally. Hard decisions, sign/XOR
manipulation and parity checks are bit operations and are never charged.

Two arithmetic modes exist. Float mode is the default. Fixed mode models a
``bits``-wide two's-complement datapath with quantization step ``step``:
values live on the grid ``k * step`` and additions saturate at
``±(2**(bits-1) - 1) * step`` (saturating, not wrapping — overflow would
corrupt min-sum magnitudes).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class FloatMode:
    """Unquantized float LLRs."""


@dataclass(frozen=True)
class FixedMode:
    """Fixed-point LLRs: multiples of ``step``, saturating at the word edge."""

    bits: int = 5
    step: float = 1.0

    def __post_init__(self) -> None:
        if self.bits < 2:
            raise ValueError(f"need at least 2 bits, got {self.bits}")
        if self.step <= 0:
            raise ValueError(f"step must be positive, got {self.step}")

    @property
    def max_value(self) -> float:
        return (2 ** (self.bits - 1) - 1) * self.step


FLOAT = FloatMode()

Mode = FloatMode | FixedMode


def quantize(value: float, mode: Mode) -> float:
    """Map ``value`` onto the mode's grid (round-half-even), saturating."""
    if isinstance(mode, FloatMode):
        return float(value)
    k = float(np.round(value / mode.step))
    return float(np.clip(k * mode.step, -mode.max_value, mode.max_value))


@dataclass(frozen=True)
class LlrValue:
    """One log-likelihood ratio; value >= 0 means bit 0 is more likely."""

    value: float
    mode: Mode = FLOAT

    def quantized(self) -> "LlrValue":
        return LlrValue(quantize(self.value, self.mode), self.mode)


@dataclass
class OpLedger:
    """Counter of ADD and MIN operations performed on LLR values.

    Counts only go up; ``tally`` rejects negative increments so a ledger is
    monotone over a decoding call. Ledgers are per-call (or per-worker) and
    combined with :func:`ledger_merge`.
    """

    add_count: int = 0
    min_count: int = 0

    @property
    def total(self) -> int:
        return self.add_count + self.min_count

    def tally(self, add: int = 0, min: int = 0) -> None:
        if add < 0 or min < 0:
            raise ValueError("ledger increments must be non-negative")
        self.add_count += int(add)
        self.min_count += int(min)

    def copy(self) -> "OpLedger":
        return OpLedger(self.add_count, self.min_count)


def ledger_merge(a: OpLedger, b: OpLedger) -> OpLedger:
    """Component-wise sum of two ledgers (commutative, associative)."""
    return OpLedger(a.add_count + b.add_count, a.min_count + b.min_count)


def hard_decision(llr: LlrValue | float) -> int:
    """0 if the LLR is >= 0 else 1. A bit operation: nothing is charged."""
    v = llr.value if isinstance(llr, LlrValue) else llr
    return 0 if v >= 0 else 1


def _require_same_mode(a: LlrValue, b: LlrValue) -> Mode:
    if a.mode != b.mode:
        raise ValueError(f"mode mismatch: {a.mode} vs {b.mode}")
    return a.mode


def f_minsum(a: LlrValue, b: LlrValue, ledger: OpLedger) -> LlrValue:
    """sgn(a)*sgn(b)*min(|a|,|b|); charges exactly one MIN."""
    mode = _require_same_mode(a, b)
    ledger.tally(min=1)
    mag = min(abs(a.value), abs(b.value))
    sign = (-1.0 if a.value < 0 else 1.0) * (-1.0 if b.value < 0 else 1.0)
    v = sign * mag
    if a.value == 0.0 or b.value == 0.0:
        v = 0.0
    return LlrValue(v, mode)


def g_update(a: LlrValue, b: LlrValue, partial_bit: int, ledger: OpLedger) -> LlrValue:
    """(-1)**partial_bit * a + b; charges exactly one ADD.

    Saturates at the word edge in fixed mode. Operands are assumed to be on
    the grid already; the sum of two grid values is a grid value.
    """
    mode = _require_same_mode(a, b)
    ledger.tally(add=1)
    v = (-a.value if partial_bit else a.value) + b.value
    if isinstance(mode, FixedMode):
        v = float(np.clip(v, -mode.max_value, mode.max_value))
    return LlrValue(v, mode)


# ---------------------------------------------------------------------------
# Array forms used by the batched decoders. These operate on plain float
# arrays (float mode); the caller charges the ledger in bulk with the
# accounting-model counts.

def f_minsum_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))


def g_update_arr(a: np.ndarray, b: np.ndarray, partial_bits: np.ndarray) -> np.ndarray:
    return b + np.where(partial_bits.astype(bool), -a, a)


def hard_decision_arr(llrs: np.ndarray) -> np.ndarray:
    return (llrs < 0).astype(np.uint8)
