"""Successive cancellation decoding in the LLR domain.

LLRs are log(W(y|0)/W(y|1)); a decision is 0 iff its LLR is >= 0. Known
bits, frozen or pinned mutual bits alike, are passed in through a
:class:`~polar_memory.codec.FreezeMask`.
"""

from __future__ import annotations

import numpy as np

from .codec import FreezeMask, bit_reversal_permutation

SATURATION = 40.0


def f_combine(a, b, min_sum: bool = False):
    """Check-node combination 2 atanh(tanh(a/2) tanh(b/2)).

    The exact form is evaluated as the equivalent
    sign(a)sign(b)min(|a|,|b|) + log1p(e^-|a+b|) - log1p(e^-|a-b|),
    which does not lose precision when tanh saturates.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if not min_sum:
        out = out + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))
    return np.clip(out, -SATURATION, SATURATION)


def g_combine(a, b, partial):
    """Variable-node combination b + (1 - 2 partial) a."""
    a = np.asarray(a, dtype=float)
    sign = 1.0 - 2.0 * np.asarray(partial, dtype=float)
    return np.clip(np.asarray(b, dtype=float) + sign * a, -SATURATION, SATURATION)


def natural_order_llrs(llr: np.ndarray) -> np.ndarray:
    """Undo the bit-reversal of the channel so the butterfly is in natural order."""
    llr = np.atleast_2d(np.asarray(llr, dtype=float))
    n = llr.shape[1].bit_length() - 1
    return np.clip(llr[:, bit_reversal_permutation(n)], -SATURATION, SATURATION)


def sc_decode(llr: np.ndarray, mask: FreezeMask, min_sum: bool = False,
              return_llrs: bool = False):
    """Decode a batch of blocks, ``llr`` of shape (B, N) or (N,).

    Returns the decided source words u_hat (B, N); with ``return_llrs`` also
    the decision LLR of every position (B, N).
    """
    alpha = natural_order_llrs(llr)
    B, N = alpha.shape
    frozen = np.asarray(mask.frozen, dtype=bool)
    values = mask.values_for(B)
    u = np.zeros((B, N), dtype=np.uint8)
    leaf = np.zeros((B, N)) if return_llrs else None

    def descend(alpha, lo):
        n = alpha.shape[1]
        if n == 1:
            a = alpha[:, 0]
            if leaf is not None:
                leaf[:, lo] = a
            bit = values[:, lo] if frozen[lo] else (a < 0).astype(np.uint8)
            u[:, lo] = bit
            return bit[:, None]
        h = n // 2
        a, b = alpha[:, :h], alpha[:, h:]
        left = descend(f_combine(a, b, min_sum), lo)
        right = descend(g_combine(a, b, left), lo + h)
        return np.concatenate([left ^ right, right], axis=1)

    descend(alpha, 0)
    if return_llrs:
        return u, leaf
    return u
