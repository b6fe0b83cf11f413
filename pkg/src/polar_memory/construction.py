"""Bit-channel reliabilities, information/mutual set selection and code rates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy.special import log_ndtr


class DecoderKind(str, enum.Enum):
    SC = "sc"
    SCL = "scl"
    BP = "bp"


class RateScheme(str, enum.Enum):
    DIRECT_EXTENSION = "direct"
    GENERAL = "general"


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class CodeConfig:
    """Parameters of one underlying polar code and of the chunk around it.

    ``K`` counts every non-frozen position, CRC included. ``K_p`` is the
    number of mutual bits shared inside a chunk of ``m`` blocks; ``K_p = 0``
    describes a plain stand-alone code.
    """

    N: int = 256
    K: int = 140
    K_crc: int = 12
    K_p: int = 24
    m: int = 2
    L: int = 1
    design_snr_db: float = 0.0
    decoder_kind: DecoderKind = DecoderKind.SC

    def __post_init__(self):
        if not is_power_of_two(self.N):
            raise ValueError(f"N must be a power of two >= 2, got {self.N}")
        if not 0 <= self.K <= self.N:
            raise ValueError(f"K must lie in [0, N], got K={self.K}, N={self.N}")
        if self.K_crc < 0 or self.K_crc > self.K:
            raise ValueError(f"K_crc must lie in [0, K], got {self.K_crc}")
        if self.K_p < 0 or self.K_p > self.K - self.K_crc:
            raise ValueError(
                f"K_p must lie in [0, K - K_crc] = [0, {self.K - self.K_crc}], got {self.K_p}"
            )
        if self.m < 2:
            raise ValueError(f"m must be >= 2, got {self.m}")
        if self.L < 1:
            raise ValueError(f"list size L must be >= 1, got {self.L}")
        object.__setattr__(self, "decoder_kind", DecoderKind(self.decoder_kind))

    @property
    def n(self) -> int:
        return self.N.bit_length() - 1

    @property
    def K_info(self) -> int:
        return self.K - self.K_crc

    @property
    def K_i(self) -> int:
        return self.K - self.K_crc - self.K_p

    @property
    def rate(self) -> float:
        return self.K / self.N

    def with_(self, **changes) -> "CodeConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class ReliabilityProfile:
    """Per-bit-channel error probability estimates P_e(W_N^(i)), 0-based.

    ``log_error_prob`` carries the same information without underflow and is
    what orderings are computed from.
    """

    error_prob: np.ndarray
    log_error_prob: np.ndarray = field(default=None)

    def __post_init__(self):
        pe = np.asarray(self.error_prob, dtype=float)
        if pe.ndim != 1 or not np.all(np.isfinite(pe)) or np.any((pe < 0) | (pe > 1)):
            raise ValueError("error probabilities must be a finite vector in [0, 1]")
        object.__setattr__(self, "error_prob", pe)
        if self.log_error_prob is None:
            with np.errstate(divide="ignore"):
                object.__setattr__(self, "log_error_prob", np.log(pe))
        else:
            object.__setattr__(self, "log_error_prob", np.asarray(self.log_error_prob, dtype=float))

    def __len__(self):
        return len(self.error_prob)

    def ascending_reliability(self) -> np.ndarray:
        """All indices, least reliable first; ties keep ascending index order."""
        idx = np.arange(len(self))
        return np.lexsort((idx, -self.log_error_prob))


# Chung's approximation of phi(x) = 1 - E[tanh(u/2)], u ~ N(x, 2x), kept in log form.
def _log_phi(x):
    x = np.maximum(np.asarray(x, dtype=float), 1e-300)
    small = -0.4527 * np.power(x, 0.86) + 0.0218
    xb = np.maximum(x, 10.0)
    big = 0.5 * np.log(np.pi / xb) - xb / 4 + np.log1p(-10.0 / (7.0 * xb))
    return np.where(x < 10, small, big)


def _inverse_log_phi(target, iters=200):
    lo = np.zeros_like(target)
    hi = np.full_like(target, 1e7)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        right = _log_phi(mid) > target
        lo = np.where(right, mid, lo)
        hi = np.where(right, hi, mid)
    return 0.5 * (lo + hi)


def mean_llr_density_evolution(N: int, sigma2: float) -> np.ndarray:
    """Gaussian-approximation mean LLRs of all N bit channels, natural SC order."""
    if not is_power_of_two(N):
        raise ValueError(f"N must be a power of two >= 2, got {N}")
    m = np.array([2.0 / sigma2])
    while len(m) < N:
        lp = _log_phi(m)
        # check node: phi(m-) = 1 - (1 - phi(m))^2
        minus = _inverse_log_phi(lp + np.log(2.0 - np.exp(lp)))
        nxt = np.empty(2 * len(m))
        nxt[0::2] = minus
        nxt[1::2] = 2.0 * m
        m = nxt
    return m


def design_sigma2(config: CodeConfig) -> float:
    """Noise variance at the design point; design_snr_db is Eb/N0 at rate K/N."""
    rate = max(config.K, 1) / config.N
    return 1.0 / (2.0 * rate * 10 ** (config.design_snr_db / 10))


def compute_reliability(config: CodeConfig) -> ReliabilityProfile:
    m = mean_llr_density_evolution(config.N, design_sigma2(config))
    # bit error of a consistent Gaussian LLR N(m, 2m): Q(sqrt(m/2))
    log_pe = log_ndtr(-np.sqrt(m / 2))
    return ReliabilityProfile(np.exp(log_pe), log_pe)


@dataclass(frozen=True)
class CodeLayout:
    """Index sets of one polar block, all 0-based.

    ``info_set`` is ordered least reliable first. ``mutual_set`` and
    ``crc_positions`` are stored in ascending index (decoding) order.
    """

    N: int
    info_set: tuple
    frozen_set: tuple
    mutual_set: tuple
    crc_positions: tuple

    def __post_init__(self):
        info, frozen = set(self.info_set), set(self.frozen_set)
        if info & frozen or info | frozen != set(range(self.N)):
            raise ValueError("info and frozen sets must partition range(N)")
        if not set(self.mutual_set) <= info or not set(self.crc_positions) <= info:
            raise ValueError("mutual and CRC positions must be information positions")
        if set(self.mutual_set) & set(self.crc_positions):
            raise ValueError("mutual and CRC positions must be disjoint")

    @property
    def K(self) -> int:
        return len(self.info_set)

    @property
    def payload_positions(self) -> np.ndarray:
        """Information positions that are neither mutual nor CRC, ascending."""
        taken = set(self.mutual_set) | set(self.crc_positions)
        return np.array(sorted(i for i in self.info_set if i not in taken), dtype=int)

    @property
    def frozen_mask(self) -> np.ndarray:
        mask = np.ones(self.N, dtype=bool)
        mask[list(self.info_set)] = False
        return mask

    def to_text(self) -> str:
        def line(name, idx):
            return f"{name}: " + " ".join(str(i + 1) for i in idx)

        return "\n".join(
            [
                f"N: {self.N}",
                line("info_set", sorted(self.info_set)),
                line("frozen_set", sorted(self.frozen_set)),
                line("mutual_set", sorted(self.mutual_set)),
                line("crc_positions", sorted(self.crc_positions)),
                line("reliability_order", self.info_set),
            ]
        ) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CodeLayout":
        fields = {}
        for raw in text.splitlines():
            if not raw.strip():
                continue
            key, _, rest = raw.partition(":")
            fields[key.strip()] = [int(tok) for tok in rest.split()]
        N = fields["N"][0]
        order = fields.get("reliability_order", fields["info_set"])
        if sorted(order) != fields["info_set"]:
            raise ValueError("reliability_order does not match info_set")
        return cls(
            N=N,
            info_set=tuple(i - 1 for i in order),
            frozen_set=tuple(i - 1 for i in fields["frozen_set"]),
            mutual_set=tuple(i - 1 for i in fields["mutual_set"]),
            crc_positions=tuple(i - 1 for i in fields["crc_positions"]),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "CodeLayout":
        return cls.from_text(Path(path).read_text())


def build_layout(profile: ReliabilityProfile, config: CodeConfig) -> CodeLayout:
    """Pick the K most reliable positions, then put the K_p least reliable of
    them on the mutual set and the K_crc most reliable on the CRC."""
    N, K = len(profile), config.K
    if K > N:
        raise ValueError(f"K={K} exceeds N={N}")
    if N != config.N:
        raise ValueError(f"profile has length {N}, config.N = {config.N}")
    order = profile.ascending_reliability()
    info = order[N - K:]
    mutual = np.sort(info[: config.K_p])
    crc = np.sort(info[K - config.K_crc:]) if config.K_crc else np.array([], dtype=int)
    frozen = np.sort(order[: N - K])
    return CodeLayout(
        N=N,
        info_set=tuple(int(i) for i in info),
        frozen_set=tuple(int(i) for i in frozen),
        mutual_set=tuple(int(i) for i in mutual),
        crc_positions=tuple(int(i) for i in crc),
    )


def construct(config: CodeConfig) -> tuple[ReliabilityProfile, CodeLayout]:
    profile = compute_reliability(config)
    return profile, build_layout(profile, config)


def effective_rate(config: CodeConfig, scheme: RateScheme | str = RateScheme.GENERAL) -> float:
    """Payload bits per channel bit of a chunk of ``config.m`` blocks."""
    scheme = RateScheme(scheme)
    N, m = config.N, config.m
    shared = (m - 1) * config.K_p if scheme is RateScheme.DIRECT_EXTENSION else config.K_p
    return (m * (config.K - config.K_crc) - shared) / (m * N)


def rate_matched_config(config: CodeConfig, rate: float) -> CodeConfig:
    """Stand-alone code (no mutual bits, same CRC) whose payload rate is ``rate``."""
    K = int(round(rate * config.N)) + config.K_crc
    return config.with_(K=K, K_p=0)
