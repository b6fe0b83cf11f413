"""Monte Carlo sweeps of stand-alone and PCM systems over BPSK/AWGN.

Every Eb/N0 point is simulated in fixed-size batches of chunks. Batch ``b``
of a point draws its noise and data from its own Philox substream, so the
outcome of a sweep depends on the master seed and the batch size only, never
on how many worker processes evaluated the batches.
"""

from __future__ import annotations

import csv
import enum
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from functools import lru_cache
from pathlib import Path

import numpy as np

from .analysis import AlphaRecord, estimate_alpha, pcm2_per
from .channel import ChannelParams, chunk_rng, llr_from_noise
from .codec import PolarCode
from .construction import CodeConfig, DecoderKind, effective_rate, rate_matched_config
from .latency_model import LatencyParams, chunk_cycles, lli_round1_cycles
from .pcm import BlockDecoder, ChunkPlan, Scheme, block_info, decode_chunks, encode_chunks

Z95 = 1.959963984540054


class SpecError(ValueError):
    """An experiment description that cannot be simulated."""


class System(str, enum.Enum):
    STANDALONE_SC = "StandaloneSC"
    STANDALONE_BP = "StandaloneBP"
    STANDALONE_SCL = "StandaloneSCL"
    PCM_SC = "PCM_SC"
    PCM_BP = "PCM_BP"
    PCM_SCL = "PCM_SCL"

    @property
    def is_pcm(self) -> bool:
        return self.value.startswith("PCM")

    @property
    def decoder_kind(self) -> DecoderKind:
        return DecoderKind(self.value.rsplit("_", 1)[-1].replace("Standalone", "").lower())

    @classmethod
    def from_parts(cls, pcm: bool, decoder: DecoderKind | str) -> "System":
        tag = DecoderKind(decoder).value.upper()
        return cls(f"PCM_{tag}" if pcm else f"Standalone{tag}")


@dataclass(frozen=True)
class ExperimentSpec:
    """One system swept over Eb/N0.

    ``rate`` rate-matches a stand-alone system: its code keeps ``config.N``
    and ``config.K_crc`` and carries ``rate * N`` payload bits. Without it a
    stand-alone system uses the underlying code of ``config``.
    ``channel_rate`` fixes the rate Eb is computed against (by default the
    payload rate of the system). ``blocks_per_chunk`` groups stand-alone
    blocks so that their noise lines up with a PCM run on the same seed.
    ``chunks_per_point`` replaces the stopping rule by fixed chunk counts.
    """

    system: System = System.PCM_SC
    config: CodeConfig = field(default_factory=CodeConfig)
    scheme: Scheme = Scheme.PAIRWISE
    ebn0_points: tuple = (1.0, 2.0, 3.0)
    min_chunk_errors: int = 100
    max_chunks: int = 10**6
    master_seed: int = 0
    batch_chunks: int = 500
    workers: int = 1
    rate: float | None = None
    channel_rate: float | None = None
    blocks_per_chunk: int | None = None
    bp_iters: int = 60
    chunks_per_point: tuple | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "system", System(self.system))
            object.__setattr__(self, "scheme", Scheme(self.scheme))
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        object.__setattr__(self, "ebn0_points", tuple(float(e) for e in self.ebn0_points))
        if self.chunks_per_point is not None:
            object.__setattr__(self, "chunks_per_point", tuple(int(c) for c in self.chunks_per_point))
        self.validate()

    def validate(self) -> None:
        if not self.ebn0_points:
            raise SpecError("ebn0_points must not be empty")
        if self.min_chunk_errors < 1:
            raise SpecError(f"min_chunk_errors must be >= 1, got {self.min_chunk_errors}")
        if self.max_chunks < 1:
            raise SpecError(f"max_chunks must be >= 1, got {self.max_chunks}")
        if self.batch_chunks < 1 or self.workers < 1 or self.bp_iters < 1:
            raise SpecError("batch_chunks, workers and bp_iters must be positive")
        if self.master_seed < 0:
            raise SpecError("master_seed must be non-negative")
        if self.system.is_pcm:
            if self.config.K_p < 1:
                raise SpecError("a PCM system needs K_p >= 1 mutual bits")
            if self.config.K_crc < 1:
                raise SpecError("a PCM system needs a CRC to classify blocks")
            if self.rate is not None:
                raise SpecError("rate matching applies to stand-alone systems only")
        if self.rate is not None and not 0 < self.rate < 1:
            raise SpecError(f"rate must lie in (0, 1), got {self.rate}")
        if self.channel_rate is not None and not 0 < self.channel_rate <= 1:
            raise SpecError(f"channel_rate must lie in (0, 1], got {self.channel_rate}")
        if self.blocks_per_chunk is not None and self.blocks_per_chunk < 1:
            raise SpecError("blocks_per_chunk must be positive")
        if self.chunks_per_point is not None and (
                len(self.chunks_per_point) != len(self.ebn0_points)
                or min(self.chunks_per_point) < 1):
            raise SpecError("chunks_per_point needs one positive count per Eb/N0 point")
        try:
            cfg = self.code_config()
            ChannelParams(0.0, self.effective_channel_rate())
        except ValueError as exc:
            raise SpecError(str(exc)) from None
        if cfg.K_info < 1:
            raise SpecError("the code carries no payload bits")

    # derived quantities

    @property
    def m(self) -> int:
        if self.system.is_pcm:
            return 2 if self.scheme is Scheme.PAIRWISE else self.config.m
        return self.blocks_per_chunk or 1

    def code_config(self) -> CodeConfig:
        cfg = self.config.with_(decoder_kind=self.system.decoder_kind)
        if self.system.is_pcm:
            return cfg.with_(m=self.m)
        if self.rate is not None:
            return rate_matched_config(cfg, self.rate)
        return cfg.with_(K_p=0)

    def payload_rate(self) -> float:
        cfg = self.code_config()
        if self.system.is_pcm:
            return effective_rate(cfg)
        return cfg.K_info / cfg.N

    def effective_channel_rate(self) -> float:
        return self.channel_rate if self.channel_rate is not None else self.payload_rate()

    def payload_len(self) -> int:
        cfg = self.code_config()
        if self.system.is_pcm:
            return ChunkPlan.for_config(cfg, self.scheme).payload_len
        return self.m * cfg.K_info

    def with_(self, **changes) -> "ExperimentSpec":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        return ExperimentSpec(**data)

    def to_dict(self) -> dict:
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data["system"] = self.system.value
        data["scheme"] = self.scheme.value
        data["config"] = {k: (v.value if isinstance(v, enum.Enum) else v)
                          for k, v in asdict(self.config).items()}
        data["ebn0_points"] = list(self.ebn0_points)
        if self.chunks_per_point is not None:
            data["chunks_per_point"] = list(self.chunks_per_point)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        data = dict(data)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SpecError(f"unknown experiment fields: {sorted(unknown)}")
        if "config" in data and not isinstance(data["config"], CodeConfig):
            cfg = dict(data["config"])
            bad = set(cfg) - {f.name for f in fields(CodeConfig)}
            if bad:
                raise SpecError(f"unknown code config fields: {sorted(bad)}")
            try:
                data["config"] = CodeConfig(**cfg)
            except (TypeError, ValueError) as exc:
                raise SpecError(str(exc)) from None
        try:
            return cls(**data)
        except TypeError as exc:
            raise SpecError(str(exc)) from None


@dataclass
class BatchStats:
    """Additive counters of a run of chunks at one Eb/N0."""

    chunks: int = 0
    blocks: int = 0
    bits: int = 0
    bit_errors: int = 0
    block_errors: int = 0
    round1_block_errors: int = 0
    second_rounds: int = 0
    second_round_successes: int = 0
    redecode_failures: int = 0
    multi_failure_chunks: int = 0
    case_counts: tuple = (0, 0, 0, 0)
    is_cycles: float = 0.0
    lli_cycles: float = 0.0
    is_round2_cycles: float = 0.0
    lli_round2_cycles: float = 0.0

    def __add__(self, other: "BatchStats") -> "BatchStats":
        out = {}
        for f in fields(self):
            a, b = getattr(self, f.name), getattr(other, f.name)
            out[f.name] = tuple(x + y for x, y in zip(a, b)) if isinstance(a, tuple) else a + b
        return BatchStats(**out)


def _seed_key(ebn0_db: float) -> int:
    # milli-dB keys, offset to stay non-negative
    return int(round(ebn0_db * 1000)) + 1_000_000


@lru_cache(maxsize=16)
def _code_and_decoder(cfg: CodeConfig, bp_iters: int):
    code = PolarCode(cfg)
    return code, BlockDecoder(code, cfg.decoder_kind, cfg.L, bp_iters=bp_iters)


def simulate_batch(spec: ExperimentSpec, ebn0_db: float, batch_index: int, size: int) -> BatchStats:
    """Simulate ``size`` chunks of batch ``batch_index`` at ``ebn0_db``."""
    cfg = spec.code_config()
    code, decoder = _code_and_decoder(cfg, spec.bp_iters)
    m, N = spec.m, cfg.N
    rng = chunk_rng(spec.master_seed, _seed_key(ebn0_db), batch_index)
    noise = rng.standard_normal((size, m, N))
    payload = rng.integers(0, 2, size=(size, spec.payload_len()), dtype=np.uint8)
    params = ChannelParams(ebn0_db, spec.effective_channel_rate())

    if spec.system.is_pcm:
        info = block_info(payload, cfg, spec.scheme, m)
        x = encode_chunks(payload, code, spec.scheme, m)
    else:
        info = payload.reshape(size, m, cfg.K_info)
        x = code.encode(info.reshape(size * m, -1)).reshape(size, m, N)
    llr = llr_from_noise(x, noise, params)

    stats = BatchStats(chunks=size, blocks=size * m, bits=payload.size)
    if not spec.system.is_pcm:
        u, _ = decoder(llr.reshape(size * m, N))
        wrong = np.any(code.info(u).reshape(size, m, -1) != info, axis=2)
        stats.bit_errors = int((code.info(u).reshape(size, -1) != payload).sum())
        stats.block_errors = stats.round1_block_errors = int(wrong.sum())
        stats.multi_failure_chunks = int((wrong.sum(axis=1) >= 2).sum())
        return stats

    batch = decode_chunks(llr, code, decoder, spec.scheme)
    round1_wrong = np.any(code.info(batch.round1_u).reshape(size, m, -1) != info, axis=2)
    final_wrong = np.any(code.info(batch.final_u).reshape(size, m, -1) != info, axis=2)
    redo = batch.redecoded_block >= 0
    rows = np.flatnonzero(redo)
    redo_wrong = final_wrong[rows, batch.redecoded_block[rows]]

    stats.bit_errors = int((batch.payload != payload).sum())
    stats.block_errors = int(final_wrong.sum())
    stats.round1_block_errors = int(round1_wrong.sum())
    stats.second_rounds = int(redo.sum())
    stats.second_round_successes = int((~redo_wrong).sum())
    stats.redecode_failures = int(redo_wrong.sum())
    stats.multi_failure_chunks = int((batch.failed_counts >= 2).sum())
    if m == 2:
        cases = batch.case_labels
        stats.case_counts = tuple(int((cases == c).sum()) for c in (1, 2, 3, 4))
        lat = LatencyParams.for_code(code)
        is_r2, lli_r2 = chunk_cycles(cases, batch.breakpoint, lat)
        stats.is_round2_cycles = float(is_r2.sum())
        stats.lli_round2_cycles = float(lli_r2.sum())
        stats.is_cycles = float(2 * lat.base_sc_cycles * size + is_r2.sum())
        stats.lli_cycles = float(lli_round1_cycles(lat) * size + lli_r2.sum())
    return stats


def _simulate_task(task):
    return simulate_batch(*task)


def bernoulli_radius(p: float, n: int) -> float:
    """Half-width of the normal-approximation 95% interval."""
    if n <= 0:
        return float("nan")
    return Z95 * math.sqrt(max(p * (1 - p), 0.0) / n)


@dataclass
class SweepPoint:
    ebn0_db: float
    stats: BatchStats
    stopped_by: str

    @property
    def chunks(self) -> int:
        return self.stats.chunks

    @property
    def blocks(self) -> int:
        return self.stats.blocks

    @property
    def ber(self) -> float:
        return self.stats.bit_errors / self.stats.bits

    @property
    def per(self) -> float:
        return self.stats.block_errors / self.stats.blocks

    @property
    def ber_radius(self) -> float:
        return bernoulli_radius(self.ber, self.stats.bits)

    @property
    def per_radius(self) -> float:
        return bernoulli_radius(self.per, self.stats.blocks)

    @property
    def round1_per(self) -> float:
        """Block error rate before any second round, an estimate of P_B."""
        return self.stats.round1_block_errors / self.stats.blocks

    @property
    def second_round_rate(self) -> float:
        return self.stats.second_rounds / self.stats.blocks

    @property
    def additional_success_rate(self) -> float:
        return self.stats.second_round_successes / self.stats.blocks

    @property
    def second_round_success_rate(self) -> float | None:
        s = self.stats
        return s.second_round_successes / s.second_rounds if s.second_rounds else None

    @property
    def alpha(self) -> float | None:
        s = self.stats
        if not s.second_rounds or not s.round1_block_errors:
            return None
        return (s.redecode_failures / s.second_rounds) / self.round1_per

    def alpha_record(self) -> AlphaRecord:
        s = self.stats
        return AlphaRecord(self.ebn0_db, s.second_rounds, s.redecode_failures, self.round1_per)

    @property
    def is_latency(self) -> float | None:
        return self.stats.is_cycles / self.chunks if self.stats.is_cycles else None

    @property
    def lli_latency(self) -> float | None:
        return self.stats.lli_cycles / self.chunks if self.stats.lli_cycles else None

    @property
    def round2_reduction(self) -> float | None:
        s = self.stats
        if not s.is_round2_cycles:
            return None
        return 1.0 - s.lli_round2_cycles / s.is_round2_cycles

    def row(self) -> dict:
        return {
            "ebn0_db": self.ebn0_db, "chunks": self.chunks, "blocks": self.blocks,
            "bit_errors": self.stats.bit_errors, "block_errors": self.stats.block_errors,
            "ber": self.ber, "ber_radius": self.ber_radius,
            "per": self.per, "per_radius": self.per_radius,
            "round1_per": self.round1_per, "second_round_rate": self.second_round_rate,
            "additional_success_rate": self.additional_success_rate,
            "alpha": self.alpha, "is_latency": self.is_latency,
            "lli_latency": self.lli_latency, "round2_reduction": self.round2_reduction,
            "stopped_by": self.stopped_by,
        }


@dataclass
class SweepResult:
    spec: ExperimentSpec
    points: list

    def point(self, ebn0_db: float) -> SweepPoint:
        for p in self.points:
            if abs(p.ebn0_db - ebn0_db) < 1e-9:
                return p
        raise KeyError(ebn0_db)

    def alpha_estimate(self, min_failures: int = 0):
        return estimate_alpha([p.alpha_record() for p in self.points], min_failures)

    def rows(self) -> list:
        return [p.row() for p in self.points]


def _run_point(spec: ExperimentSpec, ebn0_db: float, pool, target: int | None) -> SweepPoint:
    cap = spec.max_chunks if target is None else target
    min_errors = spec.min_chunk_errors if target is None else math.inf
    total = BatchStats()
    next_batch = 0
    while True:
        wave = []
        for _ in range(spec.workers):
            start = next_batch * spec.batch_chunks
            if start >= cap:
                break
            wave.append((spec, ebn0_db, next_batch, min(spec.batch_chunks, cap - start)))
            next_batch += 1
        results = pool.map(_simulate_task, wave) if pool else map(_simulate_task, wave)
        for stats in results:
            total = total + stats
            if total.block_errors >= min_errors:
                return SweepPoint(ebn0_db, total, "errors")
            if total.chunks >= cap:
                return SweepPoint(ebn0_db, total, "cap" if target is None else "fixed")


def run_sweep(spec: ExperimentSpec, progress=None) -> SweepResult:
    """Simulate every Eb/N0 point of ``spec`` until its stopping rule fires.

    A point stops at the first batch after which ``min_chunk_errors`` block
    errors have accumulated, or at exactly ``max_chunks`` chunks.
    """
    spec.validate()
    targets = spec.chunks_per_point or (None,) * len(spec.ebn0_points)
    points = []
    pool = ProcessPoolExecutor(spec.workers) if spec.workers > 1 else None
    try:
        for ebn0, target in zip(spec.ebn0_points, targets):
            point = _run_point(spec, ebn0, pool, target)
            points.append(point)
            if progress is not None:
                progress(point)
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepResult(spec, points)


def paired_standalone(result: SweepResult) -> SweepResult:
    """Stand-alone decoding of the underlying code on the noise of a PCM run.

    Same seed, batch size, chunk counts and channel rate, so block ``j`` of
    every chunk sees exactly the noise it saw in ``result``.
    """
    spec = result.spec
    if not spec.system.is_pcm:
        raise SpecError("pairing needs a PCM sweep")
    tag = spec.system.decoder_kind
    paired = spec.with_(system=System.from_parts(False, tag), scheme=Scheme.PAIRWISE,
                        channel_rate=spec.effective_channel_rate(), blocks_per_chunk=spec.m,
                        chunks_per_point=tuple(p.chunks for p in result.points))
    return run_sweep(paired)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return f"{value:.10g}"
    return str(value)


def write_csv(path, rows: list, columns: list | None = None) -> Path:
    """Header row, one row per point, empty cells for undefined values."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = columns or (list(rows[0]) if rows else [])
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    return path


def parse_ebn0_range(text: str) -> tuple:
    """``start:step:stop`` (inclusive), or a comma-separated list of values."""
    text = text.strip()
    if ":" not in text:
        return tuple(float(v) for v in text.split(",") if v.strip())
    parts = text.split(":")
    if len(parts) != 3:
        raise SpecError(f"expected start:step:stop, got {text!r}")
    start, step, stop = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise SpecError(f"empty Eb/N0 range {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def save_metadata(path, data: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, default=str) + "\n")
    return path


# figures

class FigureId(str, enum.Enum):
    F4 = "F4"
    F5 = "F5"
    F6 = "F6"
    F7 = "F7"
    F8 = "F8"
    F9 = "F9"
    F10 = "F10"
    F11 = "F11"


# alpha values of the published bound overlay
ALPHA_LOWER = 0.38
ALPHA_UPPER = 6.9
LATENCY_SAMPLES = 100_000

_FIGURE_DEFAULTS = {
    "ebn0_points": tuple(np.round(np.arange(1.0, 4.01, 0.5), 2)),
    "min_chunk_errors": 100,
    "max_chunks": 5_000,
    "master_seed": 2024,
    "batch_chunks": 500,
    "workers": 1,
}


def _figure_specs(fig: FigureId, base: dict, config: CodeConfig) -> dict:
    """Named experiment specs behind one figure."""
    r2 = effective_rate(config.with_(m=2))
    r3 = effective_rate(config.with_(m=3))
    pcm = dict(base, config=config)

    def standalone(kind, rate, L=1):
        return ExperimentSpec(system=System.from_parts(False, kind),
                              config=config.with_(L=L), rate=rate, **base)

    if fig in (FigureId.F4, FigureId.F6):
        return {
            "pcm_sc2": ExperimentSpec(system=System.PCM_SC, **pcm),
            "pcm_bp2": ExperimentSpec(system=System.PCM_BP, **pcm),
            "sc": standalone("sc", r2),
            "bp": standalone("bp", r2),
            "scl2": standalone("scl", r2, 2),
            "scl4": standalone("scl", r2, 4),
        }
    if fig in (FigureId.F5, FigureId.F7):
        return {"pcm_sc2": ExperimentSpec(system=System.PCM_SC, **pcm)}
    if fig is FigureId.F8:
        return {
            "pcm_sc3": ExperimentSpec(system=System.PCM_SC, scheme=Scheme.GENERAL,
                                      **dict(pcm, config=config.with_(m=3))),
            "sc": standalone("sc", r3),
            "bp": standalone("bp", r3),
            "scl2": standalone("scl", r3, 2),
        }
    if fig is FigureId.F9:
        specs = {}
        for L in (2, 4, 8):
            specs[f"pcm_scl2_l{L}"] = ExperimentSpec(system=System.PCM_SCL,
                                                     **dict(pcm, config=config.with_(L=L)))
        for L in (4, 8, 16):
            specs[f"scl_l{L}"] = standalone("scl", r2, L)
        return specs
    # latency figures run a fixed number of chunks per point
    base = dict(base)
    n = base.pop("max_chunks")
    base.pop("min_chunk_errors")
    return {"pcm_sc2": ExperimentSpec(system=System.PCM_SC, config=config, max_chunks=n,
                                      min_chunk_errors=n, **base)}


def _figure_rows(fig: FigureId, results: dict, overrides: dict) -> tuple[list, list]:
    names = list(results)
    first = results[names[0]]
    rows = []
    for i, ebn0 in enumerate(first.spec.ebn0_points):
        pts = {k: r.points[i] for k, r in results.items()}
        row = {"ebn0_db": ebn0}
        if fig is FigureId.F4:
            row.update({f"ber_{k}": p.ber for k, p in pts.items()})
        elif fig in (FigureId.F6, FigureId.F8, FigureId.F9):
            row.update({f"per_{k}": p.per for k, p in pts.items()})
        elif fig is FigureId.F5:
            p = pts["pcm_sc2"]
            row.update(per_pcm_sc2=p.per,
                       per_model_lower=pcm2_per(p.round1_per, overrides.get("alpha_lower", ALPHA_LOWER)),
                       per_model_upper=pcm2_per(p.round1_per, overrides.get("alpha_upper", ALPHA_UPPER)))
        elif fig is FigureId.F7:
            p = pts["pcm_sc2"]
            row.update(additional_rate=p.second_round_rate,
                       additional_success_rate=p.additional_success_rate,
                       standalone_per=p.round1_per)
        elif fig is FigureId.F10:
            row["round2_reduction_rate"] = pts["pcm_sc2"].round2_reduction
        else:
            p = pts["pcm_sc2"]
            row.update(is_average_latency=p.is_latency, lli_average_latency=p.lli_latency,
                       lli_to_is_ratio=(p.lli_latency / p.is_latency) if p.is_latency else None)
        rows.append(row)
    return rows, list(rows[0]) if rows else ["ebn0_db"]


def run_figure(figure_id: FigureId | str, overrides: dict | None = None,
               out_dir="results", progress=None) -> list[Path]:
    """Simulate the systems of one figure and write ``<id>.csv`` plus metadata.

    ``overrides`` may set any of ebn0_points, min_chunk_errors, max_chunks,
    master_seed, batch_chunks, workers, ``config`` (a CodeConfig or a dict
    of its fields) and, for F5, alpha_lower / alpha_upper.
    """
    if isinstance(figure_id, FigureId):
        figure_id = figure_id.value
    try:
        fig = FigureId(str(figure_id).upper())
    except ValueError:
        raise SpecError(f"unknown figure id {figure_id!r}; expected one of "
                        f"{[f.value for f in FigureId]}") from None
    overrides = dict(overrides or {})
    base = dict(_FIGURE_DEFAULTS)
    if fig in (FigureId.F10, FigureId.F11):
        base["max_chunks"] = LATENCY_SAMPLES
    for key in _FIGURE_DEFAULTS:
        if key in overrides and overrides[key] is not None:
            base[key] = overrides[key]
    config = overrides.get("config") or CodeConfig()
    if isinstance(config, dict):
        config = CodeConfig(**config)
    unknown = set(overrides) - set(_FIGURE_DEFAULTS) - {"config", "alpha_lower", "alpha_upper"}
    if unknown:
        raise SpecError(f"unknown figure overrides: {sorted(unknown)}")

    specs = _figure_specs(fig, base, config)
    results = {name: run_sweep(spec, progress) for name, spec in specs.items()}
    rows, columns = _figure_rows(fig, results, overrides)

    out = Path(out_dir)
    paths = [write_csv(out / f"{fig.value}.csv", rows, columns)]
    meta = {"figure": fig.value, "systems": {}}
    for name, res in results.items():
        entry = {"spec": res.spec.to_dict(), "points": res.rows()}
        if res.spec.system.is_pcm:
            est = res.alpha_estimate(min_failures=10)
            entry["alpha"] = {"min": est.alpha_min, "max": est.alpha_max, "mean": est.alpha_mean,
                              "ebn0_range": est.ebn0_range, "min_failures": 10,
                              "per_point": est.per_point}
        meta["systems"][name] = entry
    if fig is FigureId.F5:
        meta["alpha_overlay"] = {"lower": overrides.get("alpha_lower", ALPHA_LOWER),
                                 "upper": overrides.get("alpha_upper", ALPHA_UPPER)}
    paths.append(save_metadata(out / f"{fig.value}.meta.json", meta))
    return paths
