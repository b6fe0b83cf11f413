"""Closed-form PER models of polar codes with memory, and alpha estimation.

The PER functions use only ``+ - * /`` and integer binomials, so they accept
floats, numpy arrays or :class:`fractions.Fraction` alike.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .construction import CodeLayout, ReliabilityProfile


def union_bound(layout: CodeLayout | None, profile: ReliabilityProfile, exclude=(),
                positions=None) -> float:
    """Sum of P_e over the information set (or ``positions``) minus ``exclude``."""
    idx = layout.info_set if positions is None else positions
    skip = set(int(i) for i in exclude)
    pe = profile.error_prob
    return float(sum(pe[i] for i in idx if int(i) not in skip))


def pcm_per(p_b, p_b_redecode):
    """Two-block PER from the stand-alone and re-decode error rates."""
    return p_b * p_b + p_b * (1 - p_b) * p_b_redecode


def pcm2_per(p_b, alpha):
    return (1 + alpha) * p_b**2 - alpha * p_b**3


def direct_extension_part(p_b, p_redecode, m: int, k: int):
    """Contribution of chunks with exactly k round-1 failures, direct extension."""
    if k == m:
        return p_b**m
    inner = 0
    for j in range(1, k + 1):
        inner = inner + (j * comb(k, j)) * p_redecode**j * (1 - p_redecode) ** (k - j) / k
    return (k * comb(m, k)) * p_b**k * (1 - p_b) ** (m - k) * inner / m


def direct_extension_per(p_b, alpha, m: int):
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    p_re = alpha * p_b
    total = 0
    for k in range(1, m + 1):
        total = total + direct_extension_part(p_b, p_re, m, k)
    return total


def general_per(p_b, alpha, m: int):
    if m < 2:
        raise ValueError(f"m must be >= 2, got {m}")
    total = alpha * p_b**2 * (1 - p_b) ** (m - 1)
    for k in range(2, m + 1):
        total = total + (k * comb(m, k)) * p_b**k * (1 - p_b) ** (m - k) / m
    return total


def additional_rate(p_b):
    """Fraction of block decodes that trigger a second round."""
    return p_b * (1 - p_b)


@dataclass
class AlphaRecord:
    """Per-Eb/N0 second-round statistics."""

    ebn0_db: float
    redecode_attempts: int
    redecode_failures: int
    p_b: float


@dataclass
class AlphaEstimate:
    alpha_min: float
    alpha_max: float
    alpha_mean: float
    per_point: dict = field(default_factory=dict)
    ebn0_range: tuple | None = None


def alpha_at(record: AlphaRecord) -> float | None:
    if record.p_b <= 0 or record.redecode_attempts <= 0:
        return None
    return (record.redecode_failures / record.redecode_attempts) / record.p_b


def estimate_alpha(records, min_failures: int = 0) -> AlphaEstimate:
    """alpha = P'_B / P_B per point, with extrema and mean over the sweep.

    Points without a stand-alone error estimate or without second rounds are
    skipped. Points with fewer than ``min_failures`` failed second rounds are
    reported in ``per_point`` but left out of the summary.
    """
    per_point = {}
    used = []
    for rec in records:
        a = alpha_at(rec)
        if a is None:
            continue
        per_point[rec.ebn0_db] = a
        if rec.redecode_failures >= min_failures:
            used.append((rec.ebn0_db, a))
    if not used:
        nan = float("nan")
        return AlphaEstimate(nan, nan, nan, per_point, None)
    values = np.array([a for _, a in used])
    snrs = [s for s, _ in used]
    return AlphaEstimate(float(values.min()), float(values.max()), float(values.mean()),
                         per_point, (min(snrs), max(snrs)))
