import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import crc_long_division
from polar_memory.crc import (CRC12, CrcSpec, bits_to_int, crc_bits, crc_bits_batch, crc_check,
                              crc_check_batch, crc_compute, int_to_bits)

messages = st.integers(1, 300).flatmap(
    lambda k: arrays(np.uint8, (k,), elements=st.integers(0, 1)))


@given(messages)
def test_register_matches_long_division(msg):
    assert crc_compute(msg) == crc_long_division(msg)


@given(messages)
def test_appended_crc_verifies(msg):
    word = np.concatenate([msg, crc_bits(msg)])
    assert crc_check(word)
    # the whole word is divisible by g(x)
    assert crc_long_division(word, width=0) == 0


@given(messages, st.data())
def test_single_and_double_flips_detected(msg, data):
    word = np.concatenate([msg, crc_bits(msg)])
    i = data.draw(st.integers(0, len(word) - 1))
    j = data.draw(st.integers(0, len(word) - 1))
    word[i] ^= 1
    assert not crc_check(word)
    if j != i and abs(j - i) < 2047:
        word[j] ^= 1
        # x^d + 1 is not a multiple of g(x) below the order of x
        assert not crc_check(word)


def test_order_of_x_modulo_g():
    poly, a, order = CRC12.polynomial, 2, 1
    while a != 1:
        a <<= 1
        if a >> 12:
            a ^= poly
        order += 1
    assert order == 2047


def test_polynomial_factor_of_x_plus_one():
    # g(1) = 0 over GF(2): an even number of terms, so every odd-weight error is caught
    assert bin(CRC12.polynomial).count("1") % 2 == 0


def test_batch_matches_bitwise():
    rng = np.random.default_rng(0)
    msgs = rng.integers(0, 2, size=(300, 128), dtype=np.uint8)
    batch = crc_bits_batch(msgs)
    for row, crc in zip(msgs, batch):
        assert bits_to_int(crc) == crc_long_division(row)
    words = np.concatenate([msgs, batch], axis=1)
    assert crc_check_batch(words).all()
    words[::2, 5] ^= 1
    assert np.array_equal(crc_check_batch(words), np.arange(300) % 2 == 1)


@given(st.integers(0, 2**12 - 1))
def test_int_bits_roundtrip(v):
    bits = int_to_bits(v, 12)
    assert bits_to_int(bits) == v
    assert bits[0] == v >> 11


def test_all_zero_message_has_zero_crc():
    assert crc_compute(np.zeros(40, dtype=np.uint8)) == 0


def test_spec_validation():
    with pytest.raises(ValueError):
        CrcSpec(width=12, polynomial=0x0F13)
    with pytest.raises(ValueError):
        CrcSpec(width=4, polynomial=0b10010)
    with pytest.raises(ValueError):
        crc_compute(np.zeros(0, dtype=np.uint8))
    with pytest.raises(ValueError):
        crc_check(np.zeros(12, dtype=np.uint8))


def test_other_width():
    spec = CrcSpec(width=3, polynomial=0b1011)
    msg = np.array([1, 1, 0, 1], dtype=np.uint8)
    assert crc_compute(msg, spec) == crc_long_division(msg, poly=0b1011, width=3)
