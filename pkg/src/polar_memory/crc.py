"""CRC-12 with g(x) = x^12 + x^11 + x^10 + x^9 + x^8 + x^4 + x + 1.

Zero initial register, no reflection, no output XOR, first bit of the message
is the highest-order coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np


@dataclass(frozen=True)
class CrcSpec:
    width: int = 12
    polynomial: int = 0x1F13  # includes the x^width term

    def __post_init__(self):
        if self.polynomial >> self.width != 1:
            raise ValueError("polynomial degree must equal width")
        if not self.polynomial & 1:
            raise ValueError("polynomial must have a nonzero constant term")

    @property
    def mask(self) -> int:
        return (1 << self.width) - 1


CRC12 = CrcSpec()


def crc_compute(message, spec: CrcSpec = CRC12) -> int:
    """Remainder of message(x) * x^width mod g(x), as an integer."""
    bits = np.asarray(message, dtype=np.uint8).ravel()
    if bits.size == 0:
        raise ValueError("cannot compute the CRC of an empty message")
    top = spec.width - 1
    low = spec.polynomial & spec.mask
    reg = 0
    for b in bits.tolist():
        feedback = ((reg >> top) & 1) ^ (b & 1)
        reg = (reg << 1) & spec.mask
        if feedback:
            reg ^= low
    return reg


def int_to_bits(value: int, width: int) -> np.ndarray:
    return np.array([(value >> (width - 1 - k)) & 1 for k in range(width)], dtype=np.uint8)


def bits_to_int(bits) -> int:
    out = 0
    for b in np.asarray(bits, dtype=np.uint8).ravel().tolist():
        out = (out << 1) | (b & 1)
    return out


def crc_bits(message, spec: CrcSpec = CRC12) -> np.ndarray:
    return int_to_bits(crc_compute(message, spec), spec.width)


def crc_check(message_with_crc, spec: CrcSpec = CRC12) -> bool:
    bits = np.asarray(message_with_crc, dtype=np.uint8).ravel()
    if bits.size <= spec.width:
        raise ValueError(f"word must be longer than the {spec.width} CRC bits")
    return crc_compute(bits[: -spec.width], spec) == bits_to_int(bits[-spec.width:])


@lru_cache(maxsize=64)
def _parity_matrix(length: int, spec: CrcSpec) -> np.ndarray:
    # CRC is linear over GF(2): row j is the CRC of the j-th unit message.
    rows = np.zeros((length, spec.width), dtype=np.uint8)
    for j in range(length):
        e = np.zeros(length, dtype=np.uint8)
        e[j] = 1
        rows[j] = crc_bits(e, spec)
    rows.setflags(write=False)
    return rows


def crc_bits_batch(messages: np.ndarray, spec: CrcSpec = CRC12) -> np.ndarray:
    """CRC bits for each row of a (B, k) bit array; returns (B, width)."""
    messages = np.atleast_2d(np.asarray(messages, dtype=np.uint8))
    if messages.shape[1] == 0:
        raise ValueError("cannot compute the CRC of an empty message")
    P = _parity_matrix(messages.shape[1], spec)
    return (messages.astype(np.int32) @ P.astype(np.int32) & 1).astype(np.uint8)


def crc_check_batch(words: np.ndarray, spec: CrcSpec = CRC12) -> np.ndarray:
    words = np.atleast_2d(np.asarray(words, dtype=np.uint8))
    if words.shape[1] <= spec.width:
        raise ValueError(f"words must be longer than the {spec.width} CRC bits")
    expected = crc_bits_batch(words[:, : -spec.width], spec)
    return np.all(expected == words[:, -spec.width:], axis=1)
