"""Polar transform x = u B_N F^{(x)n} and source-word assembly.

Bit arrays are uint8 and batched along the first axis: a source word batch
has shape (B, N).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .construction import CodeConfig, CodeLayout, construct
from .crc import CRC12, CrcSpec, crc_bits_batch


@lru_cache(maxsize=32)
def _bit_reversal(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    rev = np.zeros_like(idx)
    for k in range(n):
        rev |= ((idx >> k) & 1) << (n - 1 - k)
    rev.setflags(write=False)
    return rev


def bit_reversal_permutation(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _bit_reversal(n)


def polar_transform(v: np.ndarray, stats: dict | None = None) -> np.ndarray:
    """Multiply rows of ``v`` by F^{(x)n} over GF(2) with the butterfly network.

    If ``stats`` is given, ``stats["xor"]`` is incremented by the number of
    per-word XOR operations performed. A single word keeps its 1-D shape.
    """
    single = np.ndim(v) == 1
    v = np.atleast_2d(np.asarray(v, dtype=np.uint8)).copy()
    B, N = v.shape
    h = 1
    while h < N:
        w = v.reshape(B, N // (2 * h), 2, h)
        w[:, :, 0, :] ^= w[:, :, 1, :]
        if stats is not None:
            stats["xor"] = stats.get("xor", 0) + N // 2
        h *= 2
    return v[0] if single else v


def polar_encode(u: np.ndarray, stats: dict | None = None) -> np.ndarray:
    u = np.asarray(u, dtype=np.uint8)
    n = u.shape[-1].bit_length() - 1
    return polar_transform(u[..., bit_reversal_permutation(n)], stats)


def assemble_source_word(info_bits: np.ndarray, layout: CodeLayout,
                         spec: CrcSpec = CRC12) -> np.ndarray:
    """Place K_info information bits (mutual bits first) and their CRC.

    The first ``len(layout.mutual_set)`` bits go to the mutual positions, the
    rest fill the remaining information positions in ascending index order,
    and the CRC of the whole K_info-bit vector goes to the CRC positions.
    """
    info = np.atleast_2d(np.asarray(info_bits, dtype=np.uint8))
    mutual = np.asarray(layout.mutual_set, dtype=int)
    payload = layout.payload_positions
    crc_pos = np.asarray(layout.crc_positions, dtype=int)
    k_p = len(mutual)
    if info.shape[1] != k_p + len(payload):
        raise ValueError(
            f"expected {k_p + len(payload)} information bits, got {info.shape[1]}"
        )
    u = np.zeros((info.shape[0], layout.N), dtype=np.uint8)
    u[:, mutual] = info[:, :k_p]
    u[:, payload] = info[:, k_p:]
    if len(crc_pos):
        if len(crc_pos) != spec.width:
            raise ValueError(f"layout has {len(crc_pos)} CRC positions, CRC width is {spec.width}")
        u[:, crc_pos] = crc_bits_batch(info, spec)
    return u


def extract_info(u: np.ndarray, layout: CodeLayout) -> np.ndarray:
    u = np.atleast_2d(u)
    return np.concatenate([u[..., list(layout.mutual_set)], u[..., layout.payload_positions]], axis=-1)


@dataclass(frozen=True)
class FreezeMask:
    """Which source positions are pinned, and to what.

    ``values`` is either (N,) or (B, N); it is only read where ``frozen``.
    """

    frozen: np.ndarray
    values: np.ndarray

    @classmethod
    def from_layout(cls, layout: CodeLayout) -> "FreezeMask":
        return cls(layout.frozen_mask, np.zeros(layout.N, dtype=np.uint8))

    def pin(self, positions, values) -> "FreezeMask":
        """Additionally freeze ``positions`` to ``values`` (shape (B, len) or (len,))."""
        positions = np.asarray(positions, dtype=int)
        values = np.asarray(values, dtype=np.uint8)
        frozen = self.frozen.copy()
        frozen[positions] = True
        if values.ndim == 1:
            new = np.array(self.values, dtype=np.uint8, copy=True)
            if new.ndim == 2:
                new[:, positions] = values
            else:
                new[positions] = values
        else:
            base = np.asarray(self.values, dtype=np.uint8)
            new = np.broadcast_to(base, (values.shape[0], len(frozen))).copy()
            new[:, positions] = values
        return FreezeMask(frozen, new)

    def values_for(self, batch: int) -> np.ndarray:
        return np.broadcast_to(np.asarray(self.values, dtype=np.uint8), (batch, len(self.frozen)))


class PolarCode:
    """A constructed block code: layout, CRC and the bit bookkeeping around them."""

    def __init__(self, config: CodeConfig, layout: CodeLayout | None = None,
                 crc: CrcSpec = CRC12):
        self.config = config
        self.crc = crc
        if layout is None:
            self.profile, layout = construct(config)
        else:
            self.profile = None
        self.layout = layout

    @property
    def N(self) -> int:
        return self.config.N

    @cached_property
    def base_mask(self) -> FreezeMask:
        return FreezeMask.from_layout(self.layout)

    @cached_property
    def mutual_positions(self) -> np.ndarray:
        return np.asarray(self.layout.mutual_set, dtype=int)

    @cached_property
    def _word_positions(self) -> np.ndarray:
        # CRC input order followed by the CRC itself
        return np.concatenate([self.mutual_positions, self.layout.payload_positions,
                               np.asarray(self.layout.crc_positions, dtype=int)])

    def source(self, info_bits) -> np.ndarray:
        return assemble_source_word(info_bits, self.layout, self.crc)

    def encode(self, info_bits) -> np.ndarray:
        return polar_encode(self.source(info_bits))

    def info(self, u) -> np.ndarray:
        return extract_info(u, self.layout)

    def check(self, u) -> np.ndarray:
        """CRC verdict for each decoded source word in ``u`` (..., N)."""
        u = np.asarray(u)
        lead = u.shape[:-1]
        flat = u.reshape(-1, u.shape[-1])
        if self.config.K_crc == 0:
            return np.ones(lead, dtype=bool)
        word = flat[:, self._word_positions]
        k = word.shape[1] - self.crc.width
        ok = np.all(crc_bits_batch(word[:, :k], self.crc) == word[:, k:], axis=1)
        return ok.reshape(lead)
