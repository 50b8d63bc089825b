"""Monte Carlo block-error-rate measurement and iteration matching.

Reproducibility contract: every frame owns a random stream derived from
(master_seed, frame_index) through numpy's SeedSequence, and data bits
are always drawn before noise. Statistics are therefore bit-identical
for any batch size or worker split. When the frame-error target is hit
mid-batch, results are truncated at the exact frame that reached it, so
early stopping cannot depend on batching either.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import ChannelPoint
from .ldpc.code import SparseParityCheck, systematic_encoder
from .ldpc.decode import LmsBatchDecoder, count_ops_lms, lms_decode, spa_decode
from .llr import OpLedger
from .polar.codec import (
    PrunedTree,
    build_pruned_tree,
    count_ops_sc,
    count_ops_ssc,
    polar_encode,
    sc_decode,
    ssc_decode,
)
from .polar.construction import M_INF, CodeConstruction

POLAR_DECODERS = ("sc", "ssc")
LDPC_DECODERS = ("lms", "spa")


@dataclass(frozen=True)
class SimConfig:
    max_frames: int = 100_000
    min_frame_errors: int = 100
    master_seed: int = 0
    all_zero_mode: bool = False
    batch_size: int = 256

    def __post_init__(self):
        if self.max_frames < 1:
            raise ValueError("max_frames must be at least 1")
        if self.min_frame_errors < 0:
            raise ValueError("min_frame_errors must be non-negative")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")


@dataclass(frozen=True)
class BlerPoint:
    ebno_db: float
    frames: int
    frame_errors: int
    bit_errors: int
    avg_iterations: float
    avg_ops_per_info_bit: float

    @property
    def bler(self) -> float:
        return self.frame_errors / self.frames if self.frames else 0.0


def frame_rng(master_seed: int, frame_index: int) -> np.random.Generator:
    """The random stream owned by one frame; pure function of its args."""
    return np.random.default_rng(np.random.SeedSequence((master_seed, frame_index)))


# ---------------------------------------------------------------------------
# Simulation-facing code bundles


@dataclass
class PolarScheme:
    """A polar construction bound to everything a simulation needs."""

    construction: CodeConstruction
    code_id: str = ""

    def __post_init__(self):
        self.tree: PrunedTree = build_pruned_tree(self.construction)
        short = self.construction.shortening
        self.perm = short.physical_order()
        dropped = np.array(sorted(short.shortened_set), dtype=np.int64)
        self.tx_positions = np.setdiff1d(
            np.arange(self.construction.n_mother), dropped)
        if not self.code_id:
            c = self.construction
            self.code_id = (f"polar_k{c.k}_n{c.n_target}"
                            + ("" if short.variant == "full" else f"_{short.variant}"))

    @property
    def k(self) -> int:
        return self.construction.k

    @property
    def n_transmitted(self) -> int:
        return self.construction.n_target

    @property
    def rate(self) -> float:
        return self.k / self.n_transmitted

    def ops_per_frame(self, decoder: str) -> int:
        if decoder == "sc":
            return count_ops_sc(self.construction.n_mother)
        return count_ops_ssc(self.tree)

    def frame_llrs(self, rng: np.random.Generator, sigma2: float,
                   all_zero: bool) -> tuple[np.ndarray, np.ndarray]:
        """(info_bits, internal-order channel LLRs) for one frame."""
        n = self.construction.n_mother
        if all_zero:
            msg = np.zeros(self.k, dtype=np.uint8)
            x_nat = np.zeros(n, dtype=np.uint8)
        else:
            msg = rng.integers(0, 2, size=self.k).astype(np.uint8)
            u = np.zeros(n, dtype=np.uint8)
            u[self.construction.info_set] = msg
            x_nat = polar_encode(u)
        x_phys = np.empty(n, dtype=np.uint8)
        x_phys[self.perm] = x_nat
        tx = x_phys[self.tx_positions]
        s = 1.0 - 2.0 * tx.astype(float)
        y = s + rng.normal(0.0, math.sqrt(sigma2), size=s.shape)
        llr_phys = np.full(n, M_INF)
        llr_phys[self.tx_positions] = 2.0 * y / sigma2
        return msg, llr_phys[self.perm]

    def decode_batch(self, decoder: str, llrs: np.ndarray):
        """(info_bit_estimates, per-frame iterations, per-frame ops)."""
        ledger = OpLedger()
        if decoder == "sc":
            u_hat, _ = sc_decode(llrs, self.construction, ledger)
        else:
            u_hat, _ = ssc_decode(llrs, self.tree, ledger)
        b = llrs.shape[0]
        iters = np.ones(b, dtype=np.int64)
        ops = np.full(b, self.ops_per_frame(decoder), dtype=np.int64)
        return u_hat[:, self.construction.info_set], iters, ops


@dataclass
class LdpcScheme:
    """A parity-check code bound to layering, puncturing, and decoder knobs."""

    code: SparseParityCheck
    layering: Sequence[np.ndarray]
    puncture: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))
    alpha: float = 0.75
    max_iter: int = 20
    code_id: str = ""

    def __post_init__(self):
        self.puncture = np.asarray(self.puncture, dtype=np.int64)
        self.info_cols, self.encode = systematic_encoder(self.code)
        self.tx_positions = np.setdiff1d(np.arange(self.code.n), self.puncture)
        try:
            self.batch_decoder = LmsBatchDecoder(self.code, self.layering, self.alpha)
        except ValueError:
            self.batch_decoder = None  # irregular layers: scalar fallback
        if not self.code_id:
            self.code_id = f"ldpc_k{self.k}_n{self.n_transmitted}"

    @property
    def k(self) -> int:
        return len(self.info_cols)

    @property
    def n_transmitted(self) -> int:
        return int(self.tx_positions.size)

    @property
    def rate(self) -> float:
        return self.k / self.n_transmitted

    def frame_llrs(self, rng: np.random.Generator, sigma2: float,
                   all_zero: bool) -> tuple[np.ndarray, np.ndarray]:
        if all_zero:
            msg = np.zeros(self.k, dtype=np.uint8)
            cw = np.zeros(self.code.n, dtype=np.uint8)
        else:
            msg = rng.integers(0, 2, size=self.k).astype(np.uint8)
            cw = self.encode(msg)
        tx = cw[self.tx_positions]
        s = 1.0 - 2.0 * tx.astype(float)
        y = s + rng.normal(0.0, math.sqrt(sigma2), size=s.shape)
        llr = np.zeros(self.code.n)  # punctured coordinates stay at 0
        llr[self.tx_positions] = 2.0 * y / sigma2
        return msg, llr

    def decode_batch(self, decoder: str, llrs: np.ndarray):
        b = llrs.shape[0]
        per_iter = 5 * self.code.e - 3 * self.code.m
        if decoder == "spa":
            bits = np.zeros((b, self.code.n), dtype=np.uint8)
            iters = np.zeros(b, dtype=np.int64)
            for f in range(b):
                out = spa_decode(llrs[f], self.code, self.max_iter)
                bits[f] = out.hard_bits
                iters[f] = out.iterations_used
            ops = np.zeros(b, dtype=np.int64)  # reference decoder: unaccounted
        elif self.batch_decoder is not None:
            bits, iters, _ = self.batch_decoder.decode(llrs, self.max_iter)
            ops = iters * per_iter
        else:
            bits = np.zeros((b, self.code.n), dtype=np.uint8)
            iters = np.zeros(b, dtype=np.int64)
            for f in range(b):
                out = lms_decode(llrs[f], self.code, self.layering,
                                 puncture=self.puncture, alpha=self.alpha,
                                 max_iter=self.max_iter)
                bits[f] = out.hard_bits
                iters[f] = out.iterations_used
            ops = iters * per_iter
        return bits[:, self.info_cols], iters, ops


# ---------------------------------------------------------------------------
# Monte Carlo driver


def _check_pairing(decoder: str, scheme) -> None:
    if decoder in POLAR_DECODERS:
        if not isinstance(scheme, PolarScheme):
            raise ValueError(f"decoder {decoder!r} requires a polar scheme")
    elif decoder in LDPC_DECODERS:
        if not isinstance(scheme, LdpcScheme):
            raise ValueError(f"decoder {decoder!r} requires an LDPC scheme")
    else:
        raise ValueError(f"unknown decoder {decoder!r}; "
                         f"choose from {POLAR_DECODERS + LDPC_DECODERS}")


def run_bler_point(decoder: str, scheme, point: ChannelPoint,
                   config: SimConfig) -> BlerPoint:
    """Measure one BLER point; reproducible for a fixed master seed
    regardless of batch size (see module docstring)."""
    _check_pairing(decoder, scheme)
    if not np.isclose(point.rate, scheme.rate, rtol=1e-9):
        raise ValueError(f"channel rate {point.rate} != code rate {scheme.rate}")

    frames = frame_errors = bit_errors = 0
    iter_sum = 0
    ops_sum = 0
    k = scheme.k
    target = config.min_frame_errors

    start = 0
    while start < config.max_frames:
        b = min(config.batch_size, config.max_frames - start)
        msgs = np.zeros((b, k), dtype=np.uint8)
        llrs = np.zeros((b, scheme.construction.n_mother
                         if isinstance(scheme, PolarScheme) else scheme.code.n))
        for t in range(b):
            rng = frame_rng(config.master_seed, start + t)
            msgs[t], llrs[t] = scheme.frame_llrs(rng, point.sigma2,
                                                 config.all_zero_mode)
        est, iters, ops = scheme.decode_batch(decoder, llrs)
        err_flags = (est != msgs).any(axis=1)
        bit_err = (est != msgs).sum(axis=1)

        keep = b
        if target > 0:
            cum = frame_errors + np.cumsum(err_flags)
            hit = np.flatnonzero(cum >= target)
            if hit.size:
                keep = int(hit[0]) + 1
        frames += keep
        frame_errors += int(err_flags[:keep].sum())
        bit_errors += int(bit_err[:keep].sum())
        iter_sum += int(iters[:keep].sum())
        ops_sum += int(ops[:keep].sum())
        if keep < b or (target > 0 and frame_errors >= target):
            break
        start += b

    return BlerPoint(
        ebno_db=point.ebno_db,
        frames=frames,
        frame_errors=frame_errors,
        bit_errors=bit_errors,
        avg_iterations=iter_sum / frames,
        avg_ops_per_info_bit=ops_sum / (frames * k),
    )


# ---------------------------------------------------------------------------
# Performance-matched iteration search


@dataclass(frozen=True)
class MatchResult:
    n_iter: int
    ebno_db: float
    measured_bler: float
    point: BlerPoint | None = None


def _as_curve(points) -> list[tuple[float, float]]:
    curve = []
    for p in points:
        if isinstance(p, BlerPoint):
            bler = p.bler if p.frame_errors else 0.5 / p.frames
            curve.append((p.ebno_db, bler))
        else:
            e, bler = p
            curve.append((float(e), float(bler)))
    return sorted(curve)


def crossing_snr(points, target_bler: float) -> float:
    """Eb/N0 where the curve crosses target_bler, log-linearly in BLER."""
    curve = _as_curve(points)
    if len(curve) < 1:
        raise ValueError("empty reference curve")
    for (e1, b1), (e2, b2) in zip(curve, curve[1:]):
        if b1 >= target_bler >= b2 and b1 > 0 and b2 > 0 and b1 != b2:
            frac = (math.log(target_bler) - math.log(b1)) / (math.log(b2) - math.log(b1))
            return e1 + frac * (e2 - e1)
    for e, b in curve:
        if b == target_bler:
            return e
    raise ValueError(f"reference curve does not bracket BLER {target_bler}")


def match_iterations(scheme, polar_reference_curve, target_bler: float = 1e-3,
                     config: SimConfig | None = None,
                     max_candidate: int = 32) -> MatchResult:
    """Smallest iteration cap whose measured BLER at the reference curve's
    target crossing is at or below the target.

    Each candidate count is measured on its own seed lane (master_seed +
    candidate) so a borderline estimate is not replayed on identical
    noise by every later candidate; the whole search stays deterministic.
    Handing in a polar scheme degenerates to the n_iter = 1 convention
    (those decoders are single-pass).
    """
    snr = crossing_snr(polar_reference_curve, target_bler)
    if isinstance(scheme, PolarScheme):
        return MatchResult(n_iter=1, ebno_db=snr, measured_bler=float("nan"))
    if config is None:
        config = SimConfig()
    point = ChannelPoint.from_ebno(snr, scheme.rate)
    saved = scheme.max_iter
    try:
        for n in range(1, max_candidate + 1):
            scheme.max_iter = n
            cfg = dataclasses.replace(config, master_seed=config.master_seed + n)
            measured = run_bler_point("lms", scheme, point, cfg)
            if measured.bler <= target_bler:
                return MatchResult(n_iter=n, ebno_db=snr,
                                   measured_bler=measured.bler, point=measured)
    finally:
        scheme.max_iter = saved
    raise ValueError(f"no iteration count up to {max_candidate} reaches "
                     f"BLER {target_bler} at {snr:.3f} dB")


# ---------------------------------------------------------------------------
# CSV emission

CSV_HEADER = ("code_id,decoder,ebno_db,frames,frame_errors,bler,ber,"
              "avg_iters,ops_per_info_bit")


def csv_line(code_id: str, decoder: str, point: BlerPoint, k: int) -> str:
    ber = point.bit_errors / (point.frames * k) if point.frames else 0.0
    cells = [code_id, decoder, str(point.ebno_db), str(point.frames),
             str(point.frame_errors), str(point.bler), str(ber),
             str(point.avg_iterations), str(point.avg_ops_per_info_bit)]
    return ",".join(cells)


def format_csv(rows: Sequence[str]) -> str:
    return "\n".join([CSV_HEADER, *rows]) + "\n"
