"""BPSK over AWGN and the LLR front end.

Unit-energy antipodal signalling: bit b maps to s = 1 - 2b, the channel
adds N(0, sigma2) per real dimension, and the matched LLR is 2y/sigma2.
Eb/N0 accounting uses the *transmitted* rate R = K / N_transmitted, so
shortened and punctured positions do not consume channel energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def ebno_to_sigma2(ebno_db: float, rate: float) -> float:
    """Noise variance per real dimension for a given Eb/N0 and code rate."""
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0, 1], got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))


@dataclass(frozen=True)
class ChannelPoint:
    """One operating point: Eb/N0 in dB, code rate, derived noise variance."""

    ebno_db: float
    rate: float
    sigma2: float

    def __post_init__(self):
        expected = ebno_to_sigma2(self.ebno_db, self.rate)
        if not np.isclose(self.sigma2, expected, rtol=1e-12, atol=0.0):
            raise ValueError(
                f"sigma2={self.sigma2} inconsistent with ebno_db={self.ebno_db}, "
                f"rate={self.rate} (expected {expected})")

    @classmethod
    def from_ebno(cls, ebno_db: float, rate: float) -> "ChannelPoint":
        return cls(ebno_db=ebno_db, rate=rate, sigma2=ebno_to_sigma2(ebno_db, rate))


def bpsk_awgn_llr(bits: np.ndarray, sigma2: float, noise_seed) -> np.ndarray:
    """Modulate, add noise, and return channel LLRs (2y/sigma2).

    ``noise_seed`` is anything ``numpy.random.default_rng`` accepts (an
    int, a SeedSequence, or an existing Generator), so results are
    deterministic for a fixed seed.
    """
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    rng = np.random.default_rng(noise_seed)
    bits = np.asarray(bits)
    s = 1.0 - 2.0 * bits.astype(float)
    y = s + rng.normal(0.0, np.sqrt(sigma2), size=s.shape)
    return 2.0 * y / sigma2
