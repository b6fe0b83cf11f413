"""BPSK over AWGN, demodulated to LLRs, with reproducible per-chunk noise streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ChannelParams:
    """Eb/N0 in dB together with the code rate the energy is spread over."""

    ebn0_db: float
    rate: float

    def __post_init__(self):
        if not 0 < self.rate <= 1:
            raise ValueError(f"rate must lie in (0, 1], got {self.rate}")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(1.0 / (2.0 * self.rate * 10 ** (self.ebn0_db / 10))))


def chunk_rng(master_seed: int, *index: int) -> np.random.Generator:
    """Philox stream keyed by the master seed and a chunk coordinate."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, *index])))


def modulate(x: np.ndarray) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(x, dtype=float)


def transmit(x: np.ndarray, params: ChannelParams, rng) -> np.ndarray:
    """LLRs 2y/sigma^2 of y = (1 - 2x) + noise. ``rng`` is a Generator or a seed."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.Generator(np.random.Philox(rng))
    return llr_from_noise(x, rng.standard_normal(np.shape(x)), params)


def llr_from_noise(x: np.ndarray, noise: np.ndarray, params: ChannelParams) -> np.ndarray:
    """LLRs for codewords ``x`` given unit-variance noise drawn beforehand.

    The noise sample is taken relative to the sent symbol, y = s(1 + sigma z).
    Since z is symmetric this is the same channel as y = s + sigma z, and it
    makes the error events of a symmetric decoder depend on z alone, so two
    systems fed the same z see the same channel realisation.
    """
    sigma = params.sigma
    s = modulate(x)
    y = s * (1.0 + sigma * np.asarray(noise))
    return 2.0 * y / sigma**2
