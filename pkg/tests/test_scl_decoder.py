import numpy as np
import pytest

from oracles import dense_encode, ml_decode
from polar_memory.codec import FreezeMask, PolarCode
from polar_memory.construction import CodeConfig
from polar_memory.sc_decoder import sc_decode
from polar_memory.scl_decoder import scl_decode


@pytest.fixture(scope="module")
def small():
    # N = 8, K = 4: a list of 16 holds every codeword, so nothing is pruned
    return PolarCode(CodeConfig(N=8, K=4, K_crc=0, K_p=0, design_snr_db=2.0))


def test_full_list_is_maximum_likelihood(small):
    rng = np.random.default_rng(0)
    mask = small.base_mask
    for _ in range(300):
        info = rng.integers(0, 2, size=4, dtype=np.uint8)
        x = small.encode(info)[0]
        llr = 2 * ((1 - 2.0 * x) + 1.0 * rng.standard_normal(8))
        u, _, metric, words = scl_decode(llr, mask, 16, min_sum=True, return_metrics=True)
        ml_u, cost = ml_decode(llr, mask.frozen)
        best = np.sort(cost)
        # the empty tail of the list keeps infinite metrics
        assert np.allclose(metric[0][: len(cost)], best)
        if best[0] < best[1] - 1e-9:
            assert np.array_equal(u[0], ml_u)


def test_list_of_one_is_sc():
    code = PolarCode(CodeConfig())
    rng = np.random.default_rng(1)
    llr = rng.normal(1.5, 2.0, size=(200, code.N))
    for min_sum in (False, True):
        u_sc = sc_decode(llr, code.base_mask, min_sum=min_sum)
        u_l, ok = scl_decode(llr, code.base_mask, 1, min_sum=min_sum)
        assert np.array_equal(u_sc, u_l)
        assert ok.all()


def test_metrics_sorted_and_words_consistent():
    code = PolarCode(CodeConfig(N=64, K=32, K_crc=0, K_p=0))
    rng = np.random.default_rng(2)
    llr = rng.normal(1.0, 2.0, size=(100, 64))
    for L in (1, 2, 4, 8):
        u, _, metric, words = scl_decode(llr, code.base_mask, L, min_sum=True,
                                         return_metrics=True)
        assert np.all(np.diff(metric, axis=1) >= 0)
        assert np.all(words[:, :, code.base_mask.frozen] == 0)
        assert np.array_equal(u, words[:, 0])
        # with min-sum kernels a path metric is the correlation discrepancy of its codeword
        x = dense_encode(words[:, 0])
        hard = (llr < 0).astype(int)
        assert np.allclose(metric[:, 0], (np.abs(llr) * (x != hard)).sum(axis=1))


def test_crc_selects_passing_path():
    code = PolarCode(CodeConfig(N=128, K=76, K_crc=12, K_p=0))
    rng = np.random.default_rng(3)
    info = rng.integers(0, 2, size=(400, code.config.K_info), dtype=np.uint8)
    x = code.encode(info)
    sigma = 0.9
    llr = 2 * ((1 - 2.0 * x) + sigma * rng.standard_normal(x.shape)) / sigma**2
    u1, ok1 = scl_decode(llr, code.base_mask, 8)
    u2, ok2, metric, words = scl_decode(llr, code.base_mask, 8, code.check, return_metrics=True)
    assert np.array_equal(code.check(u2), ok2)
    for b in np.flatnonzero(ok2):
        passing = [j for j in range(8) if np.isfinite(metric[b, j]) and code.check(words[b, j])]
        assert np.array_equal(u2[b], words[b, passing[0]])
    # CRC-aided selection is at least as good as best-metric selection
    err_plain = np.any(code.info(u1) != info, axis=1).sum()
    err_crc = np.any(code.info(u2) != info, axis=1).sum()
    assert err_crc <= err_plain


def test_pinned_values_are_followed():
    code = PolarCode(CodeConfig(N=32, K=16, K_crc=0, K_p=4))
    pos = code.mutual_positions
    mask = code.base_mask.pin(pos, np.ones(len(pos), dtype=np.uint8))
    u, _ = scl_decode(np.random.default_rng(4).normal(size=(5, 32)), mask, 4)
    assert np.all(u[:, pos] == 1)


def test_rejects_empty_list():
    code = PolarCode(CodeConfig(N=8, K=4, K_crc=0, K_p=0))
    with pytest.raises(ValueError):
        scl_decode(np.zeros(8), code.base_mask, 0)


@pytest.mark.slow
def test_list_of_two_never_worse_than_sc():
    from polar_memory.harness import ExperimentSpec, run_sweep

    blocks = 100_000
    cfg = CodeConfig(K_p=0, L=2)
    runs = {}
    for system in ("StandaloneSC", "StandaloneSCL"):
        spec = ExperimentSpec(system=system, config=cfg, ebn0_points=(2.0, 3.0),
                              chunks_per_point=(blocks, blocks), master_seed=11,
                              batch_chunks=2000)
        runs[system] = run_sweep(spec).points
    for sc, scl in zip(runs["StandaloneSC"], runs["StandaloneSCL"]):
        slack = 2 * np.sqrt(sc.per * (1 - sc.per) / blocks + scl.per * (1 - scl.per) / blocks)
        assert scl.per <= sc.per + slack, (sc.ebn0_db, sc.per, scl.per)
