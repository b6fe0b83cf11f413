import csv
import json

import numpy as np
import pytest

from polar_memory.construction import CodeConfig
from polar_memory.harness import (BatchStats, ExperimentSpec, FigureId, SpecError, System,
                                  bernoulli_radius, paired_standalone, parse_ebn0_range,
                                  run_figure, run_sweep, simulate_batch, write_csv)

SMALL = CodeConfig(N=64, K=40, K_crc=12, K_p=8)


def test_system_parts():
    assert System.PCM_SCL.decoder_kind.value == "scl" and System.PCM_SCL.is_pcm
    assert System.STANDALONE_BP.decoder_kind.value == "bp" and not System.STANDALONE_BP.is_pcm
    assert System.from_parts(False, "sc") is System.STANDALONE_SC


@pytest.mark.parametrize("kwargs", [
    dict(ebn0_points=()), dict(min_chunk_errors=0), dict(max_chunks=0), dict(system="nope"),
    dict(config=CodeConfig(K_p=0)), dict(rate=0.4), dict(batch_chunks=0),
    dict(system="StandaloneSC", rate=1.5), dict(chunks_per_point=(5,)),
])
def test_invalid_specs_rejected_before_simulating(kwargs):
    with pytest.raises(SpecError):
        ExperimentSpec(**kwargs)


def test_spec_dict_roundtrip():
    spec = ExperimentSpec(system="PCM_BP", config=SMALL, ebn0_points=(1, 2), master_seed=3)
    again = ExperimentSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert again == spec
    with pytest.raises(SpecError):
        ExperimentSpec.from_dict({"bogus": 1})
    with pytest.raises(SpecError):
        ExperimentSpec.from_dict({"config": {"N": 100}})


def test_rates_of_systems():
    cfg = CodeConfig()
    assert ExperimentSpec(system="PCM_SC").payload_rate() == 0.453125
    sc = ExperimentSpec(system="StandaloneSC", rate=0.453125)
    assert sc.code_config().K == 128 and sc.payload_rate() == 0.453125
    pcm3 = ExperimentSpec(system="PCM_SC", scheme="general", config=cfg.with_(m=3))
    assert pcm3.m == 3 and pcm3.payload_rate() == 0.46875


def test_noiseless_point():
    spec = ExperimentSpec(system="PCM_SC", ebn0_points=(20.0,), max_chunks=100, batch_chunks=40)
    p = run_sweep(spec).points[0]
    assert p.chunks == 100 and p.stopped_by == "cap"
    assert p.per == 0 and p.ber == 0 and p.second_round_rate == 0
    assert p.round2_reduction is None and p.alpha is None


def test_deterministic_across_worker_counts():
    spec = ExperimentSpec(system="PCM_SC", config=SMALL, ebn0_points=(1.0, 3.0),
                          min_chunk_errors=30, max_chunks=2000, batch_chunks=50, master_seed=9)
    one = run_sweep(spec)
    two = run_sweep(spec.with_(workers=2))
    assert [p.stats for p in one.points] == [p.stats for p in two.points]
    other = run_sweep(spec.with_(master_seed=10))
    assert [p.stats for p in one.points] != [p.stats for p in other.points]


def test_stopping_rule():
    spec = ExperimentSpec(system="StandaloneSC", config=SMALL, ebn0_points=(0.0, 2.0, 8.0),
                          min_chunk_errors=25, max_chunks=600, batch_chunks=100)
    for p in run_sweep(spec).points:
        assert p.stats.block_errors >= 25 or p.chunks == 600
        # the rule is checked once per batch
        assert p.chunks % 100 == 0 or p.chunks == 600
        if p.stopped_by == "errors":
            assert p.stats.block_errors - 25 < 100 * 1


def test_batch_truncated_at_cap():
    spec = ExperimentSpec(system="StandaloneSC", config=SMALL, ebn0_points=(30.0,),
                          max_chunks=130, batch_chunks=50)
    assert run_sweep(spec).points[0].chunks == 130


def test_point_accounting():
    spec = ExperimentSpec(system="PCM_SC", config=SMALL, ebn0_points=(2.0,),
                          min_chunk_errors=50, max_chunks=3000, batch_chunks=100)
    p = run_sweep(spec).points[0]
    s = p.stats
    assert s.blocks == 2 * s.chunks and s.bits == s.chunks * (2 * 28 - 8)
    assert 0 <= p.ber <= 1 and 0 <= p.per <= 1
    assert s.second_rounds == s.case_counts[1] + s.case_counts[2]
    assert sum(s.case_counts) == s.chunks
    assert s.second_round_successes + s.redecode_failures == s.second_rounds
    # a block error needs at least one wrong payload bit, each at most K_info
    assert s.bit_errors >= s.block_errors - s.case_counts[3]
    assert p.per <= p.round1_per
    assert p.lli_latency < p.is_latency


def test_paired_standalone_sees_the_same_channel():
    spec = ExperimentSpec(system="PCM_SC", config=SMALL, ebn0_points=(1.5, 2.5),
                          min_chunk_errors=40, max_chunks=2000, batch_chunks=100, master_seed=4)
    pcm = run_sweep(spec)
    alone = paired_standalone(pcm)
    for a, b in zip(pcm.points, alone.points):
        assert a.chunks == b.chunks and b.stopped_by == "fixed"
        assert a.stats.round1_block_errors == b.stats.block_errors


def test_radius():
    assert bernoulli_radius(0.5, 100) == pytest.approx(1.96 * 0.05, rel=1e-3)
    assert bernoulli_radius(0.0, 10) == 0
    assert np.isnan(bernoulli_radius(0.1, 0))


def test_batch_stats_add():
    a = BatchStats(chunks=1, case_counts=(1, 0, 0, 0), is_cycles=2.0)
    b = BatchStats(chunks=2, case_counts=(0, 1, 1, 0), is_cycles=1.0)
    assert a + b == BatchStats(chunks=3, case_counts=(1, 1, 1, 0), is_cycles=3.0)


def test_simulate_batch_general_scheme():
    spec = ExperimentSpec(system="PCM_SC", scheme="general", config=SMALL.with_(m=3))
    s = simulate_batch(spec, 2.0, 0, 30)
    assert s.blocks == 90 and s.case_counts == (0, 0, 0, 0)


def test_parse_ebn0_range():
    assert parse_ebn0_range("1:0.5:3") == (1.0, 1.5, 2.0, 2.5, 3.0)
    assert parse_ebn0_range("2") == (2.0,)
    assert parse_ebn0_range("1,4") == (1.0, 4.0)
    for bad in ("1:0:3", "3:1:1", "1:2"):
        with pytest.raises(SpecError):
            parse_ebn0_range(bad)


def test_csv_format(tmp_path):
    path = write_csv(tmp_path / "x.csv", [{"a": 1.5e-7, "b": None, "c": 12345678}])
    lines = path.read_text().splitlines()
    assert lines[0] == "a,b,c"
    assert lines[1] == "1.5e-07,,12345678"


def test_figure_outputs(tmp_path):
    overrides = dict(ebn0_points=(2.0, 3.0), max_chunks=200, batch_chunks=100,
                     config=SMALL, min_chunk_errors=20)
    for fig, cols in [("F5", ["ebn0_db", "per_pcm_sc2", "per_model_lower", "per_model_upper"]),
                      ("F7", ["ebn0_db", "additional_rate", "additional_success_rate",
                              "standalone_per"]),
                      ("F10", ["ebn0_db", "round2_reduction_rate"])]:
        csv_path, meta_path = run_figure(fig, overrides, tmp_path)
        with open(csv_path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == cols and len(rows) == 3
        meta = json.loads(meta_path.read_text())
        assert meta["figure"] == fig and "alpha" in meta["systems"]["pcm_sc2"]
    with pytest.raises(SpecError):
        run_figure("F12", overrides, tmp_path)
    with pytest.raises(SpecError):
        run_figure("F5", {"nonsense": 1}, tmp_path)


def test_figure_system_lists(tmp_path):
    overrides = dict(ebn0_points=(3.0,), max_chunks=4, batch_chunks=4, config=SMALL)
    csv_path, _ = run_figure(FigureId.F8, overrides, tmp_path)
    header = csv_path.read_text().splitlines()[0].split(",")
    assert header == ["ebn0_db", "per_pcm_sc3", "per_sc", "per_bp", "per_scl2"]
    csv_path, _ = run_figure("f4", overrides, tmp_path)
    assert csv_path.read_text().splitlines()[0].startswith("ebn0_db,ber_pcm_sc2,ber_pcm_bp2")
