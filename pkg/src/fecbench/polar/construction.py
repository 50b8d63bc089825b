"""Polar code construction: mean-LLR density evolution (Gaussian
approximation), shortening patterns, design-SNR search, construction files.

The synthetic-channel ranking tracks one Gaussian mean per channel through
the transform. Stage update for input means (a, b):

    check half     m- = phi_inv(phi(a) + phi(b) - phi(a)*phi(b))
    variable half  m+ = a + b          (capped at M_INF)

For uniform inputs this is the textbook m- = phi_inv(1-(1-phi(m))^2),
m+ = 2m; the pairwise form matters once shortening injects known positions
(mean M_INF) into the evolution.

phi is the usual two-segment transfer approximation: the exponential form
exp(0.0218 - 0.4527*x**0.86) below x=10 (clamped at 1 near zero), and the
minimum of that and the asymptotic form sqrt(pi/x)*exp(-x/4)*(1-10/(7x))
above. Its inverse is closed-form on the exponential segment and a
64-round bisection beyond.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import erfc

#: Stand-in for an infinite mean (perfectly known bit) in float mode.
M_INF = 1e30

_VARIANTS = ("full", "natural", "bit_reverse")


# ---------------------------------------------------------------------------
# phi and its inverse


def _exp_form(x: np.ndarray) -> np.ndarray:
    return np.exp(0.0218 - 0.4527 * np.power(x, 0.86))


def _asym_form(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, 1e-12)
    return np.sqrt(np.pi / x) * np.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x))


def _phi(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    lo = (x > 0) & (x < 10.0)
    hi = x >= 10.0
    out[lo] = np.minimum(1.0, _exp_form(x[lo]))
    out[hi] = np.minimum(_exp_form(x[hi]), _asym_form(x[hi]))
    return out


_PHI_AT_10 = float(_phi(np.array([10.0]))[0])


def _phi_inv(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    closed = (y < 1.0) & (y > _PHI_AT_10)
    out[closed] = np.power((0.0218 - np.log(y[closed])) / 0.4527, 1.0 / 0.86)
    deep = (y <= _PHI_AT_10) & (y > 0.0)
    if np.any(deep):
        yy = y[deep]
        lo = np.full(yy.shape, 10.0)
        hi = np.maximum(-4.0 * np.log(yy) + 20.0, 20.0)
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            pm = np.minimum(_exp_form(mid), _asym_form(mid))
            take_hi = pm > yy
            lo = np.where(take_hi, mid, lo)
            hi = np.where(take_hi, hi, mid)
        out[deep] = 0.5 * (lo + hi)
    out[y <= 0.0] = M_INF
    out[y >= 1.0] = 0.0
    return out


def ga_phi(m):
    """Transfer function phi(m): 1 at m=0, decreasing toward 0.

    Accepts a scalar or array of non-negative means.
    """
    arr = np.asarray(m, dtype=float)
    if np.any(arr < 0):
        raise ValueError("phi is defined for non-negative means only")
    out = _phi(arr)
    return float(out) if np.isscalar(m) or arr.ndim == 0 else out


def ga_phi_inv(y):
    """Inverse of :func:`ga_phi` (M_INF for y<=0, 0 for y>=1)."""
    arr = np.asarray(y, dtype=float)
    out = _phi_inv(arr)
    return float(out) if np.isscalar(y) or arr.ndim == 0 else out


def _check_mean(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    pa, pb = _phi(a), _phi(b)
    # pa + pb - pa*pb, not 1-(1-pa)(1-pb): avoids cancellation when both
    # phi values are ~1e-300 (excellent channels would otherwise collapse).
    return _phi_inv(pa + pb - pa * pb)


def _evolve(v: np.ndarray) -> np.ndarray:
    """Run the mean-LLR recursion over all log2(N) stages."""
    v = np.asarray(v, dtype=float).copy()
    n = int(np.log2(v.size))
    for s in range(n):
        blocks = v.reshape(2**s, -1)
        h = blocks.shape[1] // 2
        a, b = blocks[:, :h], blocks[:, h:]
        minus = _check_mean(a, b)
        plus = np.minimum(a + b, M_INF)
        v = np.concatenate([minus, plus], axis=1).reshape(-1)
    return v


# ---------------------------------------------------------------------------
# Shortening


def bit_reverse(i: int, n: int) -> int:
    """Reverse the n-bit representation of i. Involutive."""
    if not 0 <= i < (1 << n):
        raise ValueError(f"index {i} out of range for {n} bits")
    r = 0
    for _ in range(n):
        r = (r << 1) | (i & 1)
        i >>= 1
    return r


@dataclass(frozen=True)
class ShorteningPattern:
    """Which code-bit positions are forced to zero and never transmitted.

    ``shortened_set`` holds *physical* (transmitted-coordinate) positions.
    Internally — in the order the decoder tree sees wires — the known
    positions are always the contiguous tail {n_target..n_mother-1}: the
    natural variant drops exactly that tail, while the bit_reverse variant
    places codeword bits onto physical coordinates through the bit-reversal
    permutation, so its dropped physical set is the bit-reversed tail.
    Freezing the tail u-indices guarantees zeros on those wires in both
    cases.
    """

    variant: str
    n_mother: int
    n_target: int
    shortened_set: tuple[int, ...]

    @property
    def n_bits(self) -> int:
        return int(np.log2(self.n_mother))

    def internal_known_mask(self) -> np.ndarray:
        """Known-wire flags in decoder-internal order (the tail)."""
        mask = np.zeros(self.n_mother, dtype=bool)
        mask[self.n_target:] = True
        return mask

    def forced_frozen_u(self) -> np.ndarray:
        """u-indices that must be frozen to realize the pattern."""
        return np.arange(self.n_target, self.n_mother)

    def physical_order(self) -> np.ndarray:
        """physical_order[j] = physical coordinate of internal wire j."""
        n = self.n_bits
        if self.variant == "bit_reverse":
            return np.array([bit_reverse(j, n) for j in range(self.n_mother)])
        return np.arange(self.n_mother)


def make_shortening(n_mother: int, n_target: int, variant: str) -> ShorteningPattern:
    """Build a shortening pattern dropping n_mother - n_target positions."""
    if variant not in _VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    n = int(np.log2(n_mother))
    if 2**n != n_mother:
        raise ValueError(f"mother length {n_mother} is not a power of two")
    if variant == "full":
        if n_target != n_mother:
            raise ValueError("full variant requires n_target == n_mother")
        return ShorteningPattern("full", n_mother, n_mother, ())
    if not n_mother // 2 < n_target <= n_mother:
        raise ValueError(
            f"n_target {n_target} outside ({n_mother // 2}, {n_mother}]"
        )
    tail = range(n_target, n_mother)
    if variant == "natural":
        dropped = tuple(tail)
    else:
        dropped = tuple(sorted(bit_reverse(i, n) for i in tail))
    return ShorteningPattern(variant, n_mother, n_target, dropped)


# ---------------------------------------------------------------------------
# Construction


@dataclass
class CodeConstruction:
    """A designed polar code: info/frozen split plus design metadata."""

    n_mother: int
    k: int
    design_ebno_db: float
    info_set: np.ndarray
    shortening: ShorteningPattern
    reliabilities: np.ndarray | None = None
    predicted_bler: float | None = None

    @property
    def n_target(self) -> int:
        return self.shortening.n_target

    @property
    def frozen_set(self) -> np.ndarray:
        mask = np.ones(self.n_mother, dtype=bool)
        mask[self.info_set] = False
        return np.flatnonzero(mask)

    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.n_mother, dtype=bool)
        mask[self.info_set] = False
        return mask

    def info_mask(self) -> np.ndarray:
        return ~self.frozen_mask()


def _full_pattern(n_mother: int) -> ShorteningPattern:
    return ShorteningPattern("full", n_mother, n_mother, ())


def construct_ga(
    n_mother: int,
    k: int,
    design_ebno_db: float,
    rate_for_noise: float,
    shortening: ShorteningPattern | None = None,
) -> CodeConstruction:
    """Rank synthetic channels by evolved mean LLR and pick the best K.

    The channel mean is m0 = 2/sigma^2 with sigma^2 derived from
    ``rate_for_noise`` and the design Eb/N0. Positions known through
    shortening enter the evolution with mean M_INF and are excluded from
    the info selection (they are forced frozen). Returns the construction
    with per-channel reliabilities and the predicted block error rate
    prod-style over the chosen channels.
    """
    n = int(np.log2(n_mother))
    if 2**n != n_mother:
        raise ValueError(f"block length {n_mother} is not a power of two")
    if not 1 <= k <= n_mother:
        raise ValueError(f"k={k} outside [1, {n_mother}]")
    if shortening is None:
        shortening = _full_pattern(n_mother)
    if shortening.n_mother != n_mother:
        raise ValueError("shortening pattern is for a different mother length")
    forced = shortening.internal_known_mask()
    n_free = n_mother - int(forced.sum())
    if k > n_free:
        raise ValueError(f"k={k} exceeds {n_free} selectable positions")

    sigma2 = 1.0 / (2.0 * rate_for_noise * 10 ** (design_ebno_db / 10.0))
    v = np.full(n_mother, 2.0 / sigma2)
    v[forced] = M_INF
    means = _evolve(v)

    candidates = np.flatnonzero(~forced)
    order = candidates[np.argsort(-means[candidates], kind="stable")]
    info = np.sort(order[:k])

    pe = 0.5 * erfc(np.sqrt(np.maximum(means[info], 0.0) / 2.0) / np.sqrt(2.0))
    bler = -np.expm1(np.sum(np.log1p(-np.minimum(pe, 1.0 - 1e-17))))
    return CodeConstruction(
        n_mother=n_mother,
        k=k,
        design_ebno_db=design_ebno_db,
        info_set=info,
        shortening=shortening,
        reliabilities=means,
        predicted_bler=float(bler),
    )


def design_snr_search(
    n_mother: int,
    k: int,
    shortening: ShorteningPattern | None = None,
    target_bler: float = 1e-6,
) -> tuple[float, CodeConstruction]:
    """Bisect the design Eb/N0 until the predicted BLER meets the target.

    Bracket is [-2, 20] dB, resolved to 0.01 dB; the returned SNR is the
    upper (meeting) end. Raises if even 20 dB cannot reach the target.
    The noise rate is k / n_target.
    """
    if not 0.0 < target_bler < 1.0:
        raise ValueError("target_bler must be in (0, 1)")
    if shortening is None:
        shortening = _full_pattern(n_mother)
    rate = k / shortening.n_target

    def predicted(ebno: float) -> CodeConstruction:
        return construct_ga(n_mother, k, ebno, rate, shortening)

    lo, hi = -2.0, 20.0
    c_hi = predicted(hi)
    if c_hi.predicted_bler > target_bler:
        raise RuntimeError(
            f"target BLER {target_bler} unreachable within [-2, 20] dB "
            f"(predicted {c_hi.predicted_bler:.3e} at 20 dB)"
        )
    c_lo = predicted(lo)
    if c_lo.predicted_bler <= target_bler:
        return lo, c_lo
    while hi - lo > 0.01:
        mid = 0.5 * (lo + hi)
        if predicted(mid).predicted_bler <= target_bler:
            hi = mid
        else:
            lo = mid
    return hi, predicted(hi)


# ---------------------------------------------------------------------------
# Construction files: one header line
#   n_mother n_target k variant design_ebno_db
# then the sorted information set, one index per line.


def save_construction(path: str | Path, construction: CodeConstruction) -> None:
    c = construction
    lines = [
        f"{c.n_mother} {c.n_target} {c.k} {c.shortening.variant} "
        f"{c.design_ebno_db!r}"
    ]
    lines.extend(str(i) for i in np.sort(c.info_set))
    Path(path).write_text("\n".join(lines) + "\n")


def load_construction(path: str | Path) -> CodeConstruction:
    text = Path(path).read_text().split()
    if len(text) < 5:
        raise ValueError(f"{path}: truncated construction file")
    n_mother, n_target, k = int(text[0]), int(text[1]), int(text[2])
    variant = text[3]
    design = float(text[4])
    info = np.array([int(t) for t in text[5:]], dtype=int)
    if info.size != k:
        raise ValueError(f"{path}: header says k={k} but {info.size} indices follow")
    if info.size != np.unique(info).size:
        raise ValueError(f"{path}: duplicate information indices")
    if info.size and (info.min() < 0 or info.max() >= n_mother):
        raise ValueError(f"{path}: information index out of range")
    shortening = make_shortening(n_mother, n_target, variant)
    if np.any(np.isin(shortening.forced_frozen_u(), info)):
        raise ValueError(f"{path}: info set overlaps shortened (forced frozen) indices")
    return CodeConstruction(
        n_mother=n_mother,
        k=k,
        design_ebno_db=design,
        info_set=np.sort(info),
        shortening=shortening,
    )
