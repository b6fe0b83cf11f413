"""Polar codes with memory: blocks of a chunk sharing mutual information bits.

Pairwise chunks (m = 2) carry ``[mutual | odd rest | even rest]``; Block Odd
encodes the first K_info bits and Block Even encodes the same mutual bits
followed by its own K_i bits. General chunks of m blocks carry the K_info bits
of blocks 1..m-1 followed by the K_i own bits of block m, whose mutual
positions hold the XOR of the other blocks' mutual bits.

Every block's information vector lists its mutual bits first, which is also
the order the CRC is computed in.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .bp_decoder import bp_decode
from .codec import FreezeMask, PolarCode
from .construction import CodeConfig, DecoderKind
from .sc_decoder import sc_decode
from .scl_decoder import scl_decode


class Scheme(str, enum.Enum):
    PAIRWISE = "pairwise"
    GENERAL = "general"


@dataclass(frozen=True)
class ChunkPlan:
    m: int
    payload_len: int
    scheme: Scheme

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.payload_len <= 0:
            raise ValueError("payload length must be positive")
        if self.scheme is Scheme.PAIRWISE and self.m != 2:
            raise ValueError("the pairwise scheme has exactly two blocks per chunk")

    @classmethod
    def for_config(cls, config: CodeConfig, scheme: Scheme | str = Scheme.PAIRWISE) -> "ChunkPlan":
        scheme = Scheme(scheme)
        m = 2 if scheme is Scheme.PAIRWISE else config.m
        return cls(m=m, payload_len=m * config.K_info - config.K_p, scheme=scheme)


def segment_stream(bits, plan: ChunkPlan) -> tuple[np.ndarray, int]:
    """Split a bit stream into chunk payloads, zero-padding the last one.

    Returns ``(chunks, pad)`` with ``chunks`` of shape (C, payload_len).
    """
    bits = np.asarray(bits, dtype=np.uint8).ravel()
    size = plan.payload_len
    pad = (-len(bits)) % size
    padded = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return padded.reshape(-1, size), pad


def _payload_2d(payload, expected):
    arr = np.asarray(payload, dtype=np.uint8)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != expected:
        raise ValueError(f"chunk payload must have {expected} bits, got {arr.shape[1]}")
    return arr, single


def block_info_pairwise(payload, config: CodeConfig) -> np.ndarray:
    """Per-block information vectors (C, 2, K_info) of pairwise payloads."""
    arr, _ = _payload_2d(payload, 2 * config.K_i + config.K_p)
    kp, ki = config.K_p, config.K_i
    odd = arr[:, : kp + ki]
    even = np.concatenate([arr[:, :kp], arr[:, kp + ki:]], axis=1)
    return np.stack([odd, even], axis=1)


def block_info_general(payload, config: CodeConfig, m: int | None = None) -> np.ndarray:
    """Per-block information vectors (C, m, K_info) of general payloads."""
    m = config.m if m is None else m
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    k, kp = config.K_info, config.K_p
    arr, _ = _payload_2d(payload, m * k - kp)
    own = arr[:, : (m - 1) * k].reshape(-1, m - 1, k)
    last_mutual = np.bitwise_xor.reduce(own[:, :, :kp], axis=1)
    last = np.concatenate([last_mutual, arr[:, (m - 1) * k:]], axis=1)
    return np.concatenate([own, last[:, None, :]], axis=1)


def payload_from_blocks(info: np.ndarray, config: CodeConfig, scheme: Scheme) -> np.ndarray:
    """Inverse of the block_info_* functions, from (C, m, K_info) vectors."""
    scheme = Scheme(scheme)
    kp = config.K_p
    if scheme is Scheme.PAIRWISE:
        return np.concatenate([info[:, 0], info[:, 1, kp:]], axis=1)
    m = info.shape[1]
    head = info[:, : m - 1].reshape(info.shape[0], -1)
    return np.concatenate([head, info[:, m - 1, kp:]], axis=1)


def _encode_blocks(info, code: PolarCode, single):
    C, m, k = info.shape
    x = code.encode(info.reshape(C * m, k)).reshape(C, m, code.N)
    return x[0] if single else x


def encode_chunk_pairwise(payload, code: PolarCode) -> np.ndarray:
    """Codewords of Block Odd and Block Even, shape (2, N) or (C, 2, N)."""
    cfg = code.config
    _, single = _payload_2d(payload, 2 * cfg.K_i + cfg.K_p)
    return _encode_blocks(block_info_pairwise(payload, cfg), code, single)


def encode_chunk_general(payload, code: PolarCode, m: int | None = None) -> np.ndarray:
    """Codewords of the m blocks of a general chunk, shape (m, N) or (C, m, N)."""
    cfg = code.config
    m = cfg.m if m is None else m
    _, single = _payload_2d(payload, m * cfg.K_info - cfg.K_p)
    return _encode_blocks(block_info_general(payload, cfg, m), code, single)


def recover_mutual_bits(decoded_mutual, m: int) -> np.ndarray:
    """XOR of the mutual bits of the m-1 blocks that decoded successfully."""
    vectors = [np.asarray(v, dtype=np.uint8) for v in decoded_mutual]
    if len(vectors) != m - 1:
        raise ValueError(f"need the mutual bits of {m - 1} blocks, got {len(vectors)}")
    return np.bitwise_xor.reduce(np.stack(vectors), axis=0)


class BlockDecoder:
    """Decodes batches of blocks of one code and reports CRC verdicts."""

    def __init__(self, code: PolarCode, kind: DecoderKind | str | None = None,
                 list_size: int | None = None, bp_iters: int = 60,
                 min_sum: bool | None = None):
        self.code = code
        self.kind = DecoderKind(kind or code.config.decoder_kind)
        self.list_size = list_size or code.config.L
        self.bp_iters = bp_iters
        # exact kernels for SC/SCL, scaled min-sum for BP
        self.min_sum = (self.kind is DecoderKind.BP) if min_sum is None else min_sum

    def __call__(self, llr, mask: FreezeMask | None = None):
        mask = self.code.base_mask if mask is None else mask
        if self.kind is DecoderKind.SC:
            u = sc_decode(llr, mask, min_sum=self.min_sum)
            return u, self.code.check(u)
        if self.kind is DecoderKind.SCL:
            return scl_decode(llr, mask, self.list_size, self.code.check, min_sum=self.min_sum)
        u, ok, _ = bp_decode(llr, mask, self.bp_iters, self.code.check, min_sum=self.min_sum)
        return u, ok


@dataclass
class ChunkBatch:
    """Decode record of C chunks of m blocks, 0-based block indices.

    ``redecoded_block`` is -1 where no second round ran. ``breakpoint`` is the
    1-based index of the first mutual position where the round-1 decisions of
    blocks 0 and 1 differ, 0 if they agree everywhere.
    """

    scheme: Scheme
    round1_u: np.ndarray
    round1_ok: np.ndarray
    final_u: np.ndarray
    final_ok: np.ndarray
    redecoded_block: np.ndarray
    round2_ok: np.ndarray
    breakpoint: np.ndarray
    payload: np.ndarray

    def __len__(self):
        return len(self.round1_ok)

    @property
    def m(self) -> int:
        return self.round1_ok.shape[1]

    @property
    def failed_counts(self) -> np.ndarray:
        return (~self.round1_ok).sum(axis=1)

    @property
    def rounds(self) -> np.ndarray:
        return np.where(self.redecoded_block >= 0, 2, 1)

    @property
    def case_labels(self) -> np.ndarray:
        """Case 1-4 of a two-block chunk: (odd ok, even ok) = TT, TF, FT, FF."""
        if self.m != 2:
            raise ValueError("case labels are defined for two-block chunks")
        odd, even = self.round1_ok[:, 0], self.round1_ok[:, 1]
        return np.where(odd, np.where(even, 1, 2), np.where(even, 3, 4))

    @property
    def payload_ok(self) -> np.ndarray:
        return self.final_ok.all(axis=1)

    def result(self, i: int) -> "ChunkResult":
        per_round = [tuple(bool(v) for v in self.round1_ok[i])]
        if self.redecoded_block[i] >= 0:
            per_round.append(tuple(bool(v) for v in self.final_ok[i]))
        return ChunkResult(
            case_label=int(self.case_labels[i]) if self.m == 2 else None,
            failed_block_count=int(self.failed_counts[i]),
            rounds=int(self.rounds[i]),
            per_block_crc=per_round,
            payload=self.payload[i].copy() if self.payload_ok[i] else None,
            breakpoint=int(self.breakpoint[i]) or None,
        )


@dataclass
class ChunkResult:
    case_label: int | None
    failed_block_count: int
    rounds: int
    per_block_crc: list
    payload: np.ndarray | None
    breakpoint: int | None = None


def first_mutual_difference(u_a: np.ndarray, u_b: np.ndarray, mutual: np.ndarray) -> np.ndarray:
    """1-based source index of the first mutual position where two words differ, else 0."""
    diff = u_a[:, mutual] != u_b[:, mutual]
    first = np.argmax(diff, axis=1)
    return np.where(diff.any(axis=1), mutual[first] + 1, 0)


def decode_chunks(llrs: np.ndarray, code: PolarCode, decoder: BlockDecoder,
                  scheme: Scheme | str = Scheme.PAIRWISE) -> ChunkBatch:
    """Two-round decode of a batch of chunks, ``llrs`` of shape (C, m, N)."""
    scheme = Scheme(scheme)
    llrs = np.asarray(llrs, dtype=float)
    C, m, N = llrs.shape
    if scheme is Scheme.PAIRWISE and m != 2:
        raise ValueError("pairwise chunks have two blocks")
    mutual = code.mutual_positions

    u1, ok1 = decoder(llrs.reshape(C * m, N))
    u1 = u1.reshape(C, m, N)
    ok1 = np.asarray(ok1).reshape(C, m)

    final_u = u1.copy()
    final_ok = ok1.copy()
    redecoded = np.full(C, -1, dtype=int)
    round2_ok = np.zeros(C, dtype=bool)

    redo = np.flatnonzero((~ok1).sum(axis=1) == 1) if len(mutual) else np.array([], dtype=int)
    if redo.size:
        failed = np.argmin(ok1[redo], axis=1)
        # XOR over the m-1 good blocks; at m = 2 this is the sibling's copy
        all_mutual = np.bitwise_xor.reduce(u1[redo][:, :, mutual], axis=1)
        pinned_values = all_mutual ^ u1[redo, failed][:, mutual]
        mask = code.base_mask.pin(mutual, pinned_values)
        u2, ok2 = decoder(llrs[redo, failed], mask)
        final_u[redo, failed] = u2
        final_ok[redo, failed] = ok2
        redecoded[redo] = failed
        round2_ok[redo] = ok2

    breakpoint = first_mutual_difference(u1[:, 0], u1[:, 1], mutual) if len(mutual) else np.zeros(C, dtype=int)
    info = code.info(final_u.reshape(C * m, N)).reshape(C, m, -1)
    payload = payload_from_blocks(info, code.config, scheme)
    return ChunkBatch(scheme, u1, ok1, final_u, final_ok, redecoded, round2_ok,
                      breakpoint, payload)


def decode_chunk(llr_blocks: np.ndarray, code: PolarCode, decoder: BlockDecoder,
                 scheme: Scheme | str = Scheme.PAIRWISE) -> ChunkResult:
    llr_blocks = np.asarray(llr_blocks, dtype=float)
    return decode_chunks(llr_blocks[None], code, decoder, scheme).result(0)


def encode_chunks(payload, code: PolarCode, scheme: Scheme | str, m: int | None = None) -> np.ndarray:
    scheme = Scheme(scheme)
    if scheme is Scheme.PAIRWISE:
        return encode_chunk_pairwise(payload, code)
    return encode_chunk_general(payload, code, m)


def block_info(payload, config: CodeConfig, scheme: Scheme | str, m: int | None = None) -> np.ndarray:
    scheme = Scheme(scheme)
    if scheme is Scheme.PAIRWISE:
        return block_info_pairwise(payload, config)
    return block_info_general(payload, config, m)
