"""Belief propagation over the polar factor graph.

Stage 0 is the source side, stage n the channel side; the butterflies between
stages s and s+1 pair positions ``i`` and ``i + 2**s``. Known bits enter as
saturated priors on stage 0.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .codec import FreezeMask
from .sc_decoder import SATURATION, f_combine, natural_order_llrs

MIN_SUM_SCALE = 0.9375


def _box(a, b, min_sum, scale):
    if min_sum:
        out = scale * np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
        return np.clip(out, -SATURATION, SATURATION)
    return f_combine(a, b)


def _halves(arr, h):
    B, N = arr.shape
    w = arr.reshape(B, N // (2 * h), 2, h)
    return w[:, :, 0, :], w[:, :, 1, :]


def bp_decode(llr: np.ndarray, mask: FreezeMask, max_iters: int = 60,
              check: Callable[[np.ndarray], np.ndarray] | None = None,
              min_sum: bool = True, scale: float = MIN_SUM_SCALE,
              priors: np.ndarray | None = None):
    """Flooding BP with per-block early stopping on ``check``.

    ``priors``, if given, is a (B, N) or (N,) array of source-side LLRs that
    replaces the saturated frozen priors built from ``mask``; hard decisions
    at frozen positions still follow ``mask``.

    Returns ``(u_hat, crc_pass, iters_used)``.
    """
    if max_iters < 1:
        raise ValueError(f"max_iters must be >= 1, got {max_iters}")
    channel = natural_order_llrs(llr)
    B, N = channel.shape
    n = N.bit_length() - 1
    frozen = np.asarray(mask.frozen, dtype=bool)
    values = mask.values_for(B)

    if priors is None:
        prior = np.where(frozen, SATURATION * (1.0 - 2.0 * values), 0.0)
    else:
        prior = np.broadcast_to(np.asarray(priors, dtype=float), (B, N))
    prior = np.clip(prior, -SATURATION, SATURATION).astype(float)

    u_hat = np.zeros((B, N), dtype=np.uint8)
    crc_pass = np.zeros(B, dtype=bool)
    iters_used = np.full(B, max_iters, dtype=int)

    active = np.arange(B)
    Lm = np.zeros((n + 1, B, N))
    Rm = np.zeros((n + 1, B, N))
    Lm[n] = channel
    Rm[0] = prior
    vals = np.array(values, dtype=np.uint8)

    for it in range(1, max_iters + 1):
        for s in range(n - 1, -1, -1):
            h = 1 << s
            l_top, l_bot = _halves(Lm[s + 1], h)
            r_top, r_bot = _halves(Rm[s], h)
            out_top, out_bot = _halves(Lm[s], h)
            out_top[...] = _box(l_top, l_bot + r_bot, min_sum, scale)
            out_bot[...] = np.clip(_box(l_top, r_top, min_sum, scale) + l_bot,
                                   -SATURATION, SATURATION)
        for s in range(n):
            h = 1 << s
            l_top, l_bot = _halves(Lm[s + 1], h)
            r_top, r_bot = _halves(Rm[s], h)
            out_top, out_bot = _halves(Rm[s + 1], h)
            out_top[...] = _box(r_top, l_bot + r_bot, min_sum, scale)
            out_bot[...] = np.clip(_box(r_top, l_top, min_sum, scale) + r_bot,
                                   -SATURATION, SATURATION)

        decided = ((Lm[0] + Rm[0]) < 0).astype(np.uint8)
        decided = np.where(frozen, vals, decided).astype(np.uint8)
        ok = np.ones(len(active), dtype=bool) if check is None else np.asarray(check(decided))
        u_hat[active] = decided
        crc_pass[active] = ok
        if check is None:
            continue
        done = ok
        if done.any():
            iters_used[active[done]] = it
            keep = ~done
            active = active[keep]
            if active.size == 0:
                break
            Lm, Rm, vals = Lm[:, keep], Rm[:, keep], vals[keep]
    return u_hat, crc_pass, iters_used
