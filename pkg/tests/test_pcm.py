import numpy as np
import pytest
from hypothesis import given, strategies as st

from polar_memory.codec import PolarCode, polar_encode
from polar_memory.construction import CodeConfig
from polar_memory.pcm import (BlockDecoder, ChunkPlan, Scheme, block_info_general, block_info_pairwise,
                              decode_chunk, decode_chunks, encode_chunk_general,
                              encode_chunk_pairwise, first_mutual_difference, payload_from_blocks,
                              recover_mutual_bits, segment_stream)


@pytest.fixture(scope="module")
def code():
    return PolarCode(CodeConfig())


def _clean(x, amp=6.0):
    return amp * (1 - 2.0 * x)


def test_plan_sizes():
    cfg = CodeConfig()
    assert ChunkPlan.for_config(cfg).payload_len == 2 * 128 - 24
    assert ChunkPlan.for_config(cfg.with_(m=3), "general").payload_len == 3 * 128 - 24
    with pytest.raises(ValueError):
        ChunkPlan(m=3, payload_len=10, scheme="pairwise")


@given(st.integers(0, 2000))
def test_segment_stream_pads_with_zeros(length):
    plan = ChunkPlan(m=2, payload_len=232, scheme="pairwise")
    bits = np.random.default_rng(length).integers(0, 2, size=length, dtype=np.uint8)
    chunks, pad = segment_stream(bits, plan)
    assert chunks.shape[1] == 232 and (length + pad) % 232 == 0 and pad < 232
    assert np.array_equal(chunks.ravel()[:length], bits)
    assert not chunks.ravel()[length:].any()


def test_pairwise_blocks_share_mutual_bits(code):
    cfg = code.config
    payload = np.random.default_rng(0).integers(0, 2, size=(10, 232), dtype=np.uint8)
    info = block_info_pairwise(payload, cfg)
    assert np.array_equal(info[:, 0, :24], info[:, 1, :24])
    assert np.array_equal(info[:, 0], payload[:, :128])
    assert np.array_equal(info[:, 1, 24:], payload[:, 128:])
    assert np.array_equal(payload_from_blocks(info, cfg, "pairwise"), payload)
    x = encode_chunk_pairwise(payload, code)
    assert x.shape == (10, 2, 256)
    assert encode_chunk_pairwise(payload[0], code).shape == (2, 256)


@pytest.mark.parametrize("m", [3, 4])
def test_general_last_block_carries_xor(code, m):
    cfg = code.config
    payload = np.random.default_rng(m).integers(0, 2, size=(20, m * 128 - 24), dtype=np.uint8)
    info = block_info_general(payload, cfg, m)
    assert np.array_equal(info[:, -1, :24], np.bitwise_xor.reduce(info[:, :-1, :24], axis=1))
    # XOR over all m blocks of the mutual bits vanishes
    assert not np.bitwise_xor.reduce(info[:, :, :24], axis=1).any()
    assert np.array_equal(payload_from_blocks(info, cfg, "general"), payload)
    assert encode_chunk_general(payload, code, m).shape == (20, m, 256)


@pytest.mark.parametrize("m", [3, 4])
def test_recover_any_erased_block(code, m):
    cfg = code.config
    rng = np.random.default_rng(10 + m)
    payload = rng.integers(0, 2, size=(1000, m * 128 - 24), dtype=np.uint8)
    mutual = block_info_general(payload, cfg, m)[:, :, :24]
    for erased in range(m):
        others = [mutual[:, j] for j in range(m) if j != erased]
        assert np.array_equal(recover_mutual_bits(others, m), mutual[:, erased])
    with pytest.raises(ValueError):
        recover_mutual_bits([mutual[:, 0]], m)


@pytest.mark.parametrize("scheme,m", [("pairwise", 2), ("general", 3), ("general", 4)])
def test_noiseless_chunks_decode_in_one_round(code, scheme, m):
    rng = np.random.default_rng(1)
    plan = ChunkPlan.for_config(code.config.with_(m=m), scheme)
    payload = rng.integers(0, 2, size=(8, plan.payload_len), dtype=np.uint8)
    x = encode_chunk_pairwise(payload, code) if m == 2 else encode_chunk_general(payload, code, m)
    batch = decode_chunks(_clean(x), code, BlockDecoder(code, "sc"), scheme)
    assert batch.payload_ok.all() and np.all(batch.rounds == 1)
    assert np.array_equal(batch.payload, payload)
    if m == 2:
        assert np.all(batch.case_labels == 1)
        assert np.all(batch.breakpoint == 0)


class ScriptedDecoder:
    """Fails the blocks listed in ``fail`` in round one and records calls."""

    def __init__(self, code, fail):
        self.code, self.fail, self.calls = code, fail, []

    def __call__(self, llr, mask=None):
        u = (np.asarray(llr) < 0).astype(np.uint8)
        # hard decisions give the codeword, and the encoding map is an involution
        u = polar_encode(u)
        if mask is None:
            ok = np.ones(len(llr), dtype=bool)
            ok[list(self.fail)] = False
            self.calls.append(("round1", len(llr)))
        else:
            ok = np.ones(len(llr), dtype=bool)
            self.calls.append(("round2", len(llr), mask))
        return u, ok


def test_state_machine_cases(code):
    rng = np.random.default_rng(2)
    payload = rng.integers(0, 2, size=(4, 232), dtype=np.uint8)
    x = encode_chunk_pairwise(payload, code)
    # chunk 0: both pass, 1: odd fails, 2: even fails, 3: both fail
    dec = ScriptedDecoder(code, fail={2, 5, 6, 7})
    batch = decode_chunks(_clean(x), code, dec, "pairwise")
    assert batch.case_labels.tolist() == [1, 3, 2, 4]
    assert batch.redecoded_block.tolist() == [-1, 0, 1, -1]
    assert batch.rounds.tolist() == [1, 2, 2, 1]
    assert [c[0] for c in dec.calls] == ["round1", "round2"]
    _, n, mask = dec.calls[1]
    assert n == 2
    pos = code.mutual_positions
    # the re-decoded block gets its sibling's mutual decisions pinned
    assert mask.frozen[pos].all()
    assert np.array_equal(mask.values_for(2)[:, pos], payload[[1, 2], :24])
    res = decode_chunk(_clean(x[3]), code, ScriptedDecoder(code, fail={0, 1}))
    assert res.case_label == 4 and res.rounds == 1 and res.payload is None


@pytest.mark.parametrize("m", [3, 4])
def test_multiple_failures_never_redecode(code, m):
    rng = np.random.default_rng(3)
    payload = rng.integers(0, 2, size=(50, m * 128 - 24), dtype=np.uint8)
    x = encode_chunk_general(payload, code, m)
    llr = _clean(x)
    # wreck two blocks of every chunk
    for c in range(50):
        bad = rng.choice(m, size=2, replace=False)
        llr[c, bad] = rng.normal(0, 1, size=(2, 256))
    batch = decode_chunks(llr, code, BlockDecoder(code, "sc"), "general")
    multi = batch.failed_counts >= 2
    assert multi.any()
    assert np.all(batch.redecoded_block[multi] == -1)
    assert np.all(batch.redecoded_block[batch.failed_counts == 1] >= 0)


def test_redecode_repairs_a_block_from_its_sibling(code):
    # block odd sees a clean channel, block even an AWGN channel at 2 dB
    rng = np.random.default_rng(4)
    payload = rng.integers(0, 2, size=(200, 232), dtype=np.uint8)
    x = encode_chunk_pairwise(payload, code)
    sigma = np.sqrt(1 / (2 * 0.453125 * 10 ** 0.2))
    llr = _clean(x)
    llr[:, 1] = 2 * ((1 - 2.0 * x[:, 1]) + sigma * rng.standard_normal((200, 256))) / sigma**2
    batch = decode_chunks(llr, code, BlockDecoder(code, "sc"), "pairwise")
    redone = batch.redecoded_block == 1
    assert redone.any()
    assert batch.round2_ok[redone].mean() > 0.3
    fixed = redone & batch.round2_ok
    assert np.array_equal(batch.payload[fixed], payload[fixed])


def test_first_mutual_difference():
    mutual = np.array([3, 7, 9])
    a = np.zeros((3, 12), dtype=np.uint8)
    b = a.copy()
    b[1, 9] = 1
    b[2, 7] = b[2, 9] = 1
    b[0, 5] = 1  # not a mutual position
    assert first_mutual_difference(a, b, mutual).tolist() == [0, 10, 8]


def test_block_decoder_defaults(code):
    assert BlockDecoder(code, "bp").min_sum is True
    assert BlockDecoder(code, "sc").min_sum is False
    assert BlockDecoder(code.__class__(code.config.with_(L=4)), "scl").list_size == 4


def test_pairwise_needs_two_blocks(code):
    with pytest.raises(ValueError):
        decode_chunks(np.zeros((1, 3, 256)), code, BlockDecoder(code, "sc"), "pairwise")
