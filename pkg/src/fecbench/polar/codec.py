"""Polar transform, successive-cancellation decoding, and the pruned-tree
fast decoder with exact operation accounting.

Both decoders work on one frame (shape ``(N,)``) or a batch (``(B, N)``).
Charged operations follow the shared model: every pairwise f (sign-min)
costs one MIN, every pairwise g (signed add) costs one ADD, and all hard
decisions / XOR recombinations are free. The plain SC decoder always runs
the full recursion, so its per-frame cost is exactly N*log2(N).

The pruned-tree decoder stops the recursion at four closed-form leaf
shapes and skips work that shortening has already decided: a wire whose
value is known (forced-zero code bit, LLR ~ +inf) cannot influence any
decision, so f/g pairs with both operands known are not charged, and
repetition/parity leaves only pay for their unknown inputs. With no
shortening this reduces to the usual size-based recursion. Outputs are
bit-identical to plain SC either way; the vector kernels still *evaluate*
full spans (the known entries ride along as ~1e30 and cannot change any
decision), but the ledger records the model count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..llr import OpLedger, f_minsum_arr, g_update_arr, hard_decision_arr
from .construction import CodeConstruction


def polar_encode(u: np.ndarray) -> np.ndarray:
    """In-place butterfly transform x = u*G over GF(2); involutive.

    Accepts ``(N,)`` or ``(B, N)`` arrays of 0/1; returns the same shape,
    dtype uint8. XOR only — never charged to a ledger.
    """
    x = np.asarray(u, dtype=np.uint8).copy()
    n_len = x.shape[-1]
    if n_len & (n_len - 1):
        raise ValueError(f"length {n_len} is not a power of two")
    h = 1
    while h < n_len:
        view = x.reshape(*x.shape[:-1], n_len // (2 * h), 2, h)
        view[..., 0, :] ^= view[..., 1, :]
        h *= 2
    return x


def count_ops_sc(n_mother: int) -> int:
    """Per-frame charged operations of full-recursion SC: N*log2(N)."""
    n = int(np.log2(n_mother))
    if 2**n != n_mother:
        raise ValueError(f"block length {n_mother} is not a power of two")
    return n_mother * n


def _as_batch(ch_llrs: np.ndarray, n_mother: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(ch_llrs, dtype=float)
    squeeze = arr.ndim == 1
    if squeeze:
        arr = arr[None, :]
    if arr.shape[-1] != n_mother:
        raise ValueError(f"expected {n_mother} channel LLRs, got {arr.shape[-1]}")
    return arr, squeeze


def sc_decode(
    ch_llrs: np.ndarray,
    construction: CodeConstruction,
    ledger: OpLedger,
) -> tuple[np.ndarray, np.ndarray]:
    """Full successive-cancellation decoding.

    Returns ``(u_hat, x_hat)`` with the input's leading shape. Frozen
    positions decide 0 regardless of their LLR. The ledger gains exactly
    B * N/2 * log2(N) ADDs and the same number of MINs.
    """
    n_mother = construction.n_mother
    llrs, squeeze = _as_batch(ch_llrs, n_mother)
    b = llrs.shape[0]
    frozen = construction.frozen_mask()
    u_hat = np.zeros((b, n_mother), dtype=np.uint8)
    x_hat = np.zeros((b, n_mother), dtype=np.uint8)

    def rec(span_llrs: np.ndarray, lo: int, size: int) -> None:
        if size == 1:
            if not frozen[lo]:
                bits = hard_decision_arr(span_llrs[:, 0])
                u_hat[:, lo] = bits
                x_hat[:, lo] = bits
            return
        h = size // 2
        a, b_ = span_llrs[:, :h], span_llrs[:, h:]
        ledger.tally(min=b * h)
        rec(f_minsum_arr(a, b_), lo, h)
        x1 = x_hat[:, lo:lo + h]
        ledger.tally(add=b * h)
        rec(g_update_arr(a, b_, x1), lo + h, h)
        x1 ^= x_hat[:, lo + h:lo + size]

    rec(llrs, 0, n_mother)
    if squeeze:
        return u_hat[0], x_hat[0]
    return u_hat, x_hat


# ---------------------------------------------------------------------------
# Pruned tree


@dataclass
class TreeNode:
    kind: str  # rate0 | rate1 | rep | spc | branch
    lo: int
    size: int
    add_ops: int = 0  # per-frame charged ADDs at this node
    min_ops: int = 0  # per-frame charged MINs at this node
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None


@dataclass
class PrunedTree:
    root: TreeNode
    n_mother: int
    frozen_mask: np.ndarray
    add_total: int
    min_total: int

    @property
    def op_total(self) -> int:
        return self.add_total + self.min_total


def build_pruned_tree(construction: CodeConstruction) -> PrunedTree:
    """Classify frozen-pattern spans into decodable leaves, at every size.

    Rule order: all-frozen -> Rate0; all-info -> Rate1; single info bit at
    the span's end -> Rep; single frozen bit at the span's start -> Spc;
    anything else branches. Wires known through shortening reduce the
    charged counts as described in the module docstring.
    """
    frozen = construction.frozen_mask()
    forced = construction.shortening.forced_frozen_u()
    if not frozen[forced].all():
        raise ValueError("construction does not freeze its shortened u-indices")
    known0 = construction.shortening.internal_known_mask()

    def build(lo: int, size: int, known: np.ndarray) -> TreeNode:
        span = frozen[lo:lo + size]
        nf = int(span.sum())
        unknown = size - int(known.sum())
        if nf == size:
            return TreeNode("rate0", lo, size)
        if nf == 0:
            return TreeNode("rate1", lo, size)
        if nf == size - 1 and not span[-1]:
            return TreeNode("rep", lo, size, add_ops=max(unknown - 1, 0))
        if nf == 1 and span[0]:
            return TreeNode("spc", lo, size, min_ops=max(unknown - 1, 0))
        h = size // 2
        ka, kb = known[:h], known[h:]
        live = int((~ka & ~kb).sum())
        left = build(lo, h, ka & kb)
        right = build(lo + h, h, ka | kb)
        return TreeNode("branch", lo, size, add_ops=live, min_ops=live,
                        left=left, right=right)

    root = build(0, construction.n_mother, known0)

    add_total = 0
    min_total = 0
    stack = [root]
    while stack:
        node = stack.pop()
        add_total += node.add_ops
        min_total += node.min_ops
        if node.left is not None:
            stack.extend((node.left, node.right))
    return PrunedTree(root, construction.n_mother, frozen, add_total, min_total)


def count_ops_ssc(tree: PrunedTree) -> int:
    """Per-frame charged operations of the pruned-tree decoder."""
    return tree.op_total


def ssc_decode(
    ch_llrs: np.ndarray,
    tree: PrunedTree,
    ledger: OpLedger,
) -> tuple[np.ndarray, np.ndarray]:
    """Pruned-tree decoding; bit-identical to :func:`sc_decode`.

    Leaf rules: Rate0 emits zeros; Rate1 is a per-bit hard decision; Rep
    sums its span (pairwise halving, the same association the full
    recursion would produce) and broadcasts the sign; Spc takes hard
    decisions and flips the least-reliable one when the parity is odd.
    Message bits are recovered from each leaf's codeword estimate through
    the (free) butterfly, so ``u_hat`` matches plain SC as well. Ledger
    increments equal ``count_ops_ssc`` per frame, exactly.
    """
    n_mother = tree.n_mother
    llrs, squeeze = _as_batch(ch_llrs, n_mother)
    b = llrs.shape[0]
    u_hat = np.zeros((b, n_mother), dtype=np.uint8)
    x_hat = np.zeros((b, n_mother), dtype=np.uint8)

    def rec(node: TreeNode, span_llrs: np.ndarray) -> None:
        lo, size = node.lo, node.size
        if node.kind == "rate0":
            return
        if node.kind == "rate1":
            bits = hard_decision_arr(span_llrs)
            x_hat[:, lo:lo + size] = bits
            u_hat[:, lo:lo + size] = polar_encode(bits)
            return
        if node.kind == "rep":
            ledger.tally(add=b * node.add_ops)
            v = span_llrs
            while v.shape[1] > 1:
                h = v.shape[1] // 2
                v = v[:, :h] + v[:, h:]
            bit = hard_decision_arr(v[:, 0])
            x_hat[:, lo:lo + size] = bit[:, None]
            u_hat[:, lo + size - 1] = bit
            return
        if node.kind == "spc":
            ledger.tally(min=b * node.min_ops)
            bits = hard_decision_arr(span_llrs)
            parity = np.bitwise_xor.reduce(bits, axis=1)
            worst = np.argmin(np.abs(span_llrs), axis=1)
            bits[np.arange(b), worst] ^= parity
            x_hat[:, lo:lo + size] = bits
            u_hat[:, lo:lo + size] = polar_encode(bits)
            return
        h = size // 2
        a, b_ = span_llrs[:, :h], span_llrs[:, h:]
        ledger.tally(add=b * node.add_ops, min=b * node.min_ops)
        rec(node.left, f_minsum_arr(a, b_))
        x1 = x_hat[:, lo:lo + h]
        rec(node.right, g_update_arr(a, b_, x1))
        x1 ^= x_hat[:, lo + h:lo + size]

    rec(tree.root, llrs)
    if squeeze:
        return u_hat[0], x_hat[0]
    return u_hat, x_hat
