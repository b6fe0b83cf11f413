"""Cycle-count models of the in-serial (IS) and low-latency interleaved (LLI)
two-block decoders.

Only ratios are meaningful: one conventional SC pass costs ``base_sc_cycles``
and every decision is charged the same share of it.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np


class Architecture(str, enum.Enum):
    IS = "IS"
    LLI = "LLI"


def sc_cycles_before(index, N: int) -> np.ndarray:
    """Cycles a 2N-2 SC schedule spends before the LLR of bit ``index`` (1-based) is ready.

    Every zero in the n-bit binary form of ``index - 1`` costs one f update on
    the way down and every one costs 2 * (subtree size) for the finished left
    half and its g update, which sums to 2 (index - 1) + zeros.
    """
    i = np.asarray(index, dtype=np.int64) - 1
    if np.any(i < 0) or np.any(i > N):
        raise ValueError(f"index must lie in [1, {N + 1}]")
    n = int(N).bit_length() - 1
    ones = np.zeros_like(i)
    for k in range(n):
        ones = ones + ((i >> k) & 1)
    cycles = 2 * i + (n - ones)
    return np.where(i == N, 2 * N - 2, cycles).astype(float)


@dataclass(frozen=True)
class LatencyParams:
    N: int = 256
    base_sc_cycles: int | None = None
    stage_n_dwell: int = 2
    interleave_overhead: int | None = None
    first_mutual_index: int = 1
    last_mutual_index: int | None = None

    def __post_init__(self):
        if self.base_sc_cycles is None:
            object.__setattr__(self, "base_sc_cycles", 2 * self.N - 2)
        if self.interleave_overhead is None:
            object.__setattr__(self, "interleave_overhead", self.stage_n_dwell)
        if self.last_mutual_index is None:
            object.__setattr__(self, "last_mutual_index", self.N)
        if self.base_sc_cycles < self.N:
            raise ValueError("base_sc_cycles must be at least N")
        if not 1 <= self.first_mutual_index <= self.last_mutual_index <= self.N:
            raise ValueError("mutual index bounds must satisfy 1 <= first <= last <= N")

    @classmethod
    def for_code(cls, code, **kw) -> "LatencyParams":
        mutual = np.asarray(code.layout.mutual_set) + 1
        return cls(N=code.N, first_mutual_index=int(mutual.min()),
                   last_mutual_index=int(mutual.max()), **kw)

    def cycles_from(self, index) -> np.ndarray:
        """Cycles of one SC pass left once the LLR of bit ``index`` (1-based) is ready.

        This is the round-2 cost of a restart that reads that LLR from the
        breakpoint memory. The pass follows the classic 2N-2 schedule, one cycle per f or g node
        update, and is scaled to ``base_sc_cycles``. ``index = N + 1`` gives 0.
        """
        full = 2 * self.N - 2
        return self.base_sc_cycles * (full - sc_cycles_before(index, self.N)) / full


@dataclass(frozen=True)
class LatencyTrace:
    round1_cycles: float
    round2_cycles: float
    breakpoint_index: int | None
    architecture: Architecture

    @property
    def total(self) -> float:
        return self.round1_cycles + self.round2_cycles


def _check_case(case):
    if case not in (1, 2, 3, 4):
        raise ValueError(f"case must be 1, 2, 3 or 4, got {case}")


def is_latency(case: int, params: LatencyParams) -> LatencyTrace:
    _check_case(case)
    base = params.base_sc_cycles
    r2 = base if case in (2, 3) else 0
    return LatencyTrace(2 * base, r2, None, Architecture.IS)


def lli_round1_cycles(params: LatencyParams) -> float:
    # Even trails Odd by one stage; the extra stage-n PE absorbs the conflicts.
    return params.base_sc_cycles + params.interleave_overhead


def lli_latency(case: int, breakpoint_index: int | None, params: LatencyParams,
                mutual_positions=None) -> LatencyTrace:
    """LLI cycles for one chunk.

    A second round restarts at ``breakpoint_index``. When the two blocks agree
    on every mutual bit, there is no breakpoint and the round-1 LLRs are valid
    up to the last mutual index, so the restart happens right after it.
    """
    _check_case(case)
    r1 = lli_round1_cycles(params)
    if case in (1, 4):
        if breakpoint_index is not None and case == 1:
            # Case 1 chunks may still have differing mutual bits only through
            # undetected errors; the breakpoint is recorded but unused.
            pass
        return LatencyTrace(r1, 0.0, None, Architecture.LLI)
    if breakpoint_index is None:
        return LatencyTrace(r1, float(params.cycles_from(params.last_mutual_index + 1)),
                            None, Architecture.LLI)
    valid = (params.first_mutual_index <= breakpoint_index <= params.last_mutual_index)
    if mutual_positions is not None:
        valid = valid and breakpoint_index in set(int(i) for i in mutual_positions)
    if not valid:
        raise ValueError(f"breakpoint {breakpoint_index} is not a mutual position")
    return LatencyTrace(r1, float(params.cycles_from(breakpoint_index)), breakpoint_index,
                        Architecture.LLI)


@dataclass
class LatencySummary:
    chunks: int
    round2_chunks: int
    is_average: float
    lli_average: float
    is_round2_average: float | None
    lli_round2_average: float | None

    @property
    def round2_reduction(self) -> float | None:
        """1 - LLI/IS second-round cycles, None when no chunk had a second round."""
        if not self.round2_chunks:
            return None
        return 1.0 - self.lli_round2_average / self.is_round2_average

    @property
    def lli_to_is_ratio(self) -> float:
        return self.lli_average / self.is_average


def chunk_cycles(cases: np.ndarray, breakpoints: np.ndarray, params: LatencyParams):
    """Vectorised per-chunk (IS round 2, LLI round 2) cycles; breakpoint 0 = none."""
    cases = np.asarray(cases)
    bps = np.asarray(breakpoints)
    second = (cases == 2) | (cases == 3)
    is_r2 = np.where(second, float(params.base_sc_cycles), 0.0)
    restart = np.where(bps > 0, bps, params.last_mutual_index + 1)
    lli_r2 = np.where(second, params.cycles_from(restart), 0.0)
    return is_r2, lli_r2


def latency_report(cases, breakpoints, params: LatencyParams) -> LatencySummary:
    """Average latency of both architectures over simulated chunks."""
    cases = np.asarray(cases)
    is_r2, lli_r2 = chunk_cycles(cases, breakpoints, params)
    n = len(cases)
    second = is_r2 > 0
    k = int(second.sum())
    is_total = 2 * params.base_sc_cycles + is_r2
    lli_total = lli_round1_cycles(params) + lli_r2
    return LatencySummary(
        chunks=n,
        round2_chunks=k,
        is_average=float(is_total.mean()) if n else float("nan"),
        lli_average=float(lli_total.mean()) if n else float("nan"),
        is_round2_average=float(is_r2[second].mean()) if k else None,
        lli_round2_average=float(lli_r2[second].mean()) if k else None,
    )
