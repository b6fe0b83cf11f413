"""CRC-aided successive cancellation list decoding.

Paths are held as a list axis of size L next to the batch axis. Each
recursion frame reports which input path every output path descends from,
so a frame only regathers its own buffers once per child instead of copying
the whole decoder state at every decision.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .codec import FreezeMask
from .sc_decoder import f_combine, g_combine, natural_order_llrs


def _gather(arr, parent):
    return np.take_along_axis(arr, parent[:, :, None], axis=1)


def scl_decode(llr: np.ndarray, mask: FreezeMask, list_size: int,
               check: Callable[[np.ndarray], np.ndarray] | None = None,
               min_sum: bool = False, return_metrics: bool = False):
    """Decode (B, N) channel LLRs keeping ``list_size`` paths.

    The path metric adds |LLR| whenever a decision, free or frozen, disagrees
    with the sign of its LLR. Among the final paths, in metric order, the
    first one accepted by ``check`` is returned; if none is, the best path is
    returned with ``crc_pass`` False. Without ``check`` the best path is
    returned and ``crc_pass`` is all True.

    Returns ``(u_hat, crc_pass)`` and, with ``return_metrics``, the sorted
    (B, L) final metrics and the (B, L, N) candidate words as well.
    """
    if list_size < 1:
        raise ValueError(f"list size must be >= 1, got {list_size}")
    alpha0 = natural_order_llrs(llr)
    B, N = alpha0.shape
    L = list_size
    frozen = np.asarray(mask.frozen, dtype=bool)
    values = mask.values_for(B)

    metric = np.full((B, L), np.inf)
    metric[:, 0] = 0.0
    cand_idx = np.broadcast_to(np.arange(2 * L), (B, 2 * L))
    identity = np.broadcast_to(np.arange(L), (B, L))

    def leaf(a, i):
        nonlocal metric
        pen0 = np.where(a < 0, -a, 0.0)
        pen1 = np.where(a >= 0, a, 0.0)
        if frozen[i]:
            bit = np.broadcast_to(values[:, i:i + 1], (B, L)).astype(np.uint8)
            metric = metric + np.where(bit == 1, pen1, pen0)
            return bit, identity
        cand = np.stack([metric + pen0, metric + pen1], axis=2).reshape(B, 2 * L)
        pen = np.stack([pen0, pen1], axis=2).reshape(B, 2 * L)
        # metric, then the sign-consistent branch, then lower index
        order = np.lexsort((cand_idx, pen, cand), axis=1)[:, :L]
        metric = np.take_along_axis(cand, order, axis=1)
        return (order % 2).astype(np.uint8), order // 2

    def descend(alpha, lo):
        n = alpha.shape[2]
        if n == 1:
            bit, parent = leaf(alpha[:, :, 0], lo)
            return bit[:, :, None], bit[:, :, None], parent
        h = n // 2
        a, b = alpha[:, :, :h], alpha[:, :, h:]
        beta_l, u_l, p1 = descend(f_combine(a, b, min_sum), lo)
        a, b = _gather(a, p1), _gather(b, p1)
        beta_r, u_r, p2 = descend(g_combine(a, b, beta_l), lo + h)
        beta_l, u_l = _gather(beta_l, p2), _gather(u_l, p2)
        return (np.concatenate([beta_l ^ beta_r, beta_r], axis=2),
                np.concatenate([u_l, u_r], axis=2),
                np.take_along_axis(p1, p2, axis=1))

    start = np.broadcast_to(alpha0[:, None, :], (B, L, N))
    _, words, _ = descend(start, 0)

    order = np.argsort(metric, axis=1, kind="stable")
    metric = np.take_along_axis(metric, order, axis=1)
    words = np.take_along_axis(words, order[:, :, None], axis=1)
    if check is None:
        chosen = np.zeros(B, dtype=int)
        crc_pass = np.ones(B, dtype=bool)
    else:
        ok = check(words) & np.isfinite(metric)
        crc_pass = ok.any(axis=1)
        chosen = np.where(crc_pass, ok.argmax(axis=1), 0)
    u_hat = words[np.arange(B), chosen].astype(np.uint8)
    if return_metrics:
        return u_hat, crc_pass, metric, words
    return u_hat, crc_pass
