"""LDPC decoding: layered normalized min-sum (production) and flooding
sum-product (reference), with exact operation accounting for min-sum.

Charged cost per full min-sum iteration is 5E - 3M: forming each
variable-to-check message by subtraction costs E ADDs, the two-minimum
search inside each check costs 2d-3 MINs (sum 2E - 3M), attenuating each
outgoing magnitude costs E ADDs (realized as m - (m>>2) on fixed-point
grids, a multiply in float), and writing the posterior back costs E ADDs.
Syndrome checks, sign products and hard decisions are bit operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..llr import FLOAT, FixedMode, FloatMode, LlrValue, OpLedger
from .code import SparseParityCheck


@dataclass
class DecodeOutcome:
    hard_bits: np.ndarray
    iterations_used: int
    syndrome_ok: bool
    ledger: OpLedger


def syndrome_ok(code: SparseParityCheck, bits: np.ndarray) -> bool:
    """True iff every check's adjacent bits XOR to zero. Bit ops only."""
    bits = np.asarray(bits)
    if bits.shape[-1] != code.n:
        raise ValueError(f"expected {code.n} bits, got {bits.shape[-1]}")
    return all(int(np.bitwise_xor.reduce(bits[row])) == 0 for row in code.cn_adj)


def count_ops_lms(code: SparseParityCheck, n_iter: int) -> int:
    """Charged ops for n_iter full layered min-sum iterations."""
    if n_iter < 0:
        raise ValueError("iteration count must be non-negative")
    return n_iter * (5 * code.e - 3 * code.m)


def _two_min(mags: Sequence[float]) -> tuple[float, float, int]:
    """Smallest magnitude, second smallest, and the index of the first."""
    best = second = float("inf")
    arg = 0
    for idx, m in enumerate(mags):
        if m < best:
            second = best
            best = m
            arg = idx
        elif m < second:
            second = m
    return best, second, arg


def _attenuate(mag: float, alpha: float, mode) -> float:
    if isinstance(mode, FixedMode):
        if alpha != 0.75:
            raise ValueError("fixed mode implements attenuation as m - (m>>2); alpha must be 0.75")
        k = int(round(mag / mode.step))
        return (k - (k >> 2)) * mode.step
    return alpha * mag


def cn_update_minsum(incoming, alpha: float = 0.75, ledger: OpLedger | None = None):
    """Check-node update: r_j = alpha * (prod of other signs) * (min of
    other magnitudes), via the first/second-minimum bookkeeping.

    ``incoming`` is a list of LlrValue (any single mode) or of plain
    floats (treated as float mode). Charges exactly (2d-3) MINs and d ADDs
    (one attenuation per outgoing edge).
    """
    if ledger is None:
        ledger = OpLedger()
    as_llr = len(incoming) > 0 and isinstance(incoming[0], LlrValue)
    if as_llr:
        mode = incoming[0].mode
        if any(q.mode != mode for q in incoming):
            raise ValueError("mode mismatch among incoming messages")
        values = [q.value for q in incoming]
    else:
        mode = FLOAT
        values = [float(q) for q in incoming]
    d = len(values)
    if d < 2:
        raise ValueError(f"check degree {d} < 2")

    ledger.tally(min=2 * d - 3, add=d)
    mags = [abs(v) for v in values]
    neg = [v < 0 for v in values]
    total_neg = sum(neg) % 2
    min1, min2, arg = _two_min(mags)
    out = []
    for j in range(d):
        mag = min2 if j == arg else min1
        att = _attenuate(mag, alpha, mode)
        sign_neg = total_neg ^ neg[j]
        out.append(-att if sign_neg else att)
    if as_llr:
        return [LlrValue(v, mode) for v in out]
    return out


def lms_decode(
    ch_llrs: np.ndarray,
    code: SparseParityCheck,
    layering: Sequence[np.ndarray],
    puncture=(),
    alpha: float = 0.75,
    max_iter: int = 20,
    early_stop: bool = True,
) -> DecodeOutcome:
    """Layered min-sum decoding of one frame (scalar reference path).

    Per check in the active layer: peel the old check message off the
    posterior (q = Q - r), run the min-sum check update, write the
    refreshed posterior back (Q = q + r_new). The syndrome is tested once
    per full iteration; iterations_used counts completed iterations
    including the converging one.
    """
    ch = np.array(ch_llrs, dtype=float)
    if ch.size != code.n:
        raise ValueError(f"expected {code.n} channel LLRs, got {ch.size}")
    punct = np.asarray(list(puncture), dtype=np.int64)
    if punct.size:
        ch[punct] = 0.0
    covered = np.concatenate([np.asarray(l) for l in layering]) if layering else np.array([])
    if sorted(covered.tolist()) != list(range(code.m)):
        raise ValueError("layering must cover every check exactly once")

    ledger = OpLedger()
    q_post = ch.copy()
    r_msg = [np.zeros(row.size) for row in code.cn_adj]

    iterations = 0
    converged = False
    for _ in range(max_iter):
        for layer in layering:
            for i in np.asarray(layer):
                row = code.cn_adj[i]
                q_in = []
                for t, j in enumerate(row):
                    ledger.tally(add=1)
                    q_in.append(q_post[j] - r_msg[i][t])
                r_new = cn_update_minsum(q_in, alpha, ledger)
                for t, j in enumerate(row):
                    ledger.tally(add=1)
                    q_post[j] = q_in[t] + r_new[t]
                    r_msg[i][t] = r_new[t]
        iterations += 1
        if early_stop and syndrome_ok(code, (q_post < 0).astype(np.uint8)):
            converged = True
            break

    hard = (q_post < 0).astype(np.uint8)
    return DecodeOutcome(
        hard_bits=hard,
        iterations_used=iterations,
        syndrome_ok=converged or syndrome_ok(code, hard),
        ledger=ledger,
    )


# ---------------------------------------------------------------------------
# Batched layered min-sum


class LmsBatchDecoder:
    """Vectorized layered min-sum over frame batches.

    Requires every layer to consist of equal-degree checks that share no
    variable (true for quasi-cyclic block-row layers, where each block
    holds at most one circulant). Results are bit-identical to running
    :func:`lms_decode` frame by frame with the same layering.
    """

    def __init__(self, code: SparseParityCheck, layering: Sequence[np.ndarray],
                 alpha: float = 0.75):
        self.code = code
        self.alpha = alpha
        covered = np.concatenate([np.asarray(l) for l in layering])
        if sorted(covered.tolist()) != list(range(code.m)):
            raise ValueError("layering must cover every check exactly once")
        self.layer_vars: list[np.ndarray] = []
        for l_idx, layer in enumerate(layering):
            checks = np.asarray(layer)
            degs = {code.cn_adj[i].size for i in checks}
            if len(degs) != 1:
                raise ValueError(f"layer {l_idx} mixes check degrees {sorted(degs)}; "
                                 "use the scalar decoder")
            v = np.stack([code.cn_adj[i] for i in checks])  # (nchecks, d)
            if np.unique(v).size != v.size:
                raise ValueError(f"layer {l_idx} has checks sharing a variable; "
                                 "use the scalar decoder")
            self.layer_vars.append(v)

    def decode(self, ch_llrs: np.ndarray, max_iter: int, early_stop: bool = True):
        """Returns (hard_bits (B,N) uint8, iterations (B,), syndrome_ok (B,))."""
        q_post = np.array(ch_llrs, dtype=float)
        if q_post.ndim != 2 or q_post.shape[1] != self.code.n:
            raise ValueError("expected a (B, N) LLR batch")
        b = q_post.shape[0]
        r_msg = [np.zeros((b, v.shape[0], v.shape[1])) for v in self.layer_vars]

        out_bits = np.zeros((b, self.code.n), dtype=np.uint8)
        out_iters = np.zeros(b, dtype=np.int64)
        out_ok = np.zeros(b, dtype=bool)
        active = np.arange(b)

        for it in range(1, max_iter + 1):
            for v, r in zip(self.layer_vars, r_msg):
                q = q_post[:, v] - r  # (Bact, nchecks, d)
                neg = q < 0
                parity = np.bitwise_xor.reduce(neg, axis=2)
                mag = np.abs(q)
                part = np.partition(mag, 1, axis=2)
                min1, min2 = part[:, :, 0], part[:, :, 1]
                arg = np.argmin(mag, axis=2)
                out_mag = np.where(
                    np.arange(v.shape[1])[None, None, :] == arg[:, :, None],
                    min2[:, :, None], min1[:, :, None])
                att = self.alpha * out_mag
                sign_neg = parity[:, :, None] ^ neg
                r_new = np.where(sign_neg, -att, att)
                q_post[:, v] = q + r_new
                r[...] = r_new
            if early_stop:
                bits = (q_post < 0)
                bad = np.zeros(q_post.shape[0], dtype=bool)
                for v in self.layer_vars:
                    bad |= np.bitwise_xor.reduce(bits[:, v], axis=2).any(axis=1)
                done = ~bad
                if done.any():
                    rows = np.flatnonzero(done)
                    out_bits[active[rows]] = bits[rows].astype(np.uint8)
                    out_iters[active[rows]] = it
                    out_ok[active[rows]] = True
                    keep = np.flatnonzero(~done)
                    active = active[keep]
                    q_post = q_post[keep]
                    r_msg = [r[keep] for r in r_msg]
                    if active.size == 0:
                        return out_bits, out_iters, out_ok
        if active.size:
            bits = (q_post < 0).astype(np.uint8)
            out_bits[active] = bits
            out_iters[active] = max_iter
            if not early_stop:
                good = np.ones(active.size, dtype=bool)
                for v in self.layer_vars:
                    good &= ~np.bitwise_xor.reduce(bits[:, v].astype(bool), axis=2).any(axis=1)
                out_ok[active] = good
        return out_bits, out_iters, out_ok


# ---------------------------------------------------------------------------
# Flooding sum-product reference


def _boxplus_excl(values: list[float], skip: int) -> float:
    others = [v for t, v in enumerate(values) if t != skip]
    if len(others) == 1:
        return others[0]  # exact pass-through, no tanh round-trip
    prod = 1.0
    for v in others:
        prod *= np.tanh(np.clip(v, -40.0, 40.0) / 2.0)
    prod = float(np.clip(prod, -1.0 + 1e-15, 1.0 - 1e-15))
    return float(2.0 * np.arctanh(prod))


def spa_decode(ch_llrs: np.ndarray, code: SparseParityCheck, max_iter: int = 20) -> DecodeOutcome:
    """Flooding sum-product with the exact tanh check rule.

    Correctness reference only — its ops are not part of the accounting
    model, so the returned ledger stays empty.
    """
    ch = np.asarray(ch_llrs, dtype=float)
    if ch.size != code.n:
        raise ValueError(f"expected {code.n} channel LLRs, got {ch.size}")
    q_msg = [np.array([ch[j] for j in row]) for row in code.cn_adj]
    r_msg = [np.zeros(row.size) for row in code.cn_adj]

    iterations = 0
    converged = False
    q_total = ch.copy()
    for _ in range(max_iter):
        for i, row in enumerate(code.cn_adj):
            vals = q_msg[i].tolist()
            r_msg[i] = np.array([_boxplus_excl(vals, t) for t in range(row.size)])
        q_total = ch.copy()
        for i, row in enumerate(code.cn_adj):
            q_total[row] += r_msg[i]
        for i, row in enumerate(code.cn_adj):
            q_msg[i] = q_total[row] - r_msg[i]
        iterations += 1
        if syndrome_ok(code, (q_total < 0).astype(np.uint8)):
            converged = True
            break

    hard = (q_total < 0).astype(np.uint8)
    return DecodeOutcome(hard_bits=hard, iterations_used=iterations,
                         syndrome_ok=converged, ledger=OpLedger())
