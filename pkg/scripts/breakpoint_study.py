"""Where do the two blocks of a chunk first disagree on a mutual bit?

The LLI decoder saves the round-2 cycles spent before that breakpoint, so its
distribution sets the average round-2 reduction. This script prints, per
Eb/N0, the reduction, the breakpoint histogram over mutual positions and
the share of second rounds with no differing mutual bit at all.

    python3 scripts/breakpoint_study.py --ebn0 1:1:4 --chunks 20000
"""

import argparse

import numpy as np

from polar_memory.channel import ChannelParams, chunk_rng, llr_from_noise
from polar_memory.codec import PolarCode
from polar_memory.construction import CodeConfig
from polar_memory.harness import ExperimentSpec, System, parse_ebn0_range
from polar_memory.latency_model import LatencyParams, latency_report
from polar_memory.pcm import BlockDecoder, decode_chunks, encode_chunk_pairwise


def study(code, ebn0, chunks, seed, batch=2000):
    spec = ExperimentSpec(System.PCM_SC, code.config, "pairwise", (ebn0,))
    params = ChannelParams(ebn0, spec.effective_channel_rate())
    dec = BlockDecoder(code, "sc")
    cases, bps = [], []
    for start in range(0, chunks, batch):
        n = min(batch, chunks - start)
        rng = chunk_rng(seed, int(round(ebn0 * 1000)) + 1_000_000, start // batch)
        noise = rng.standard_normal((n, 2, code.N))
        payload = rng.integers(0, 2, size=(n, spec.payload_len()), dtype=np.uint8)
        x = encode_chunk_pairwise(payload, code)
        res = decode_chunks(llr_from_noise(x, noise, params), code, dec)
        cases.append(res.case_labels)
        bps.append(res.breakpoint)
    return np.concatenate(cases), np.concatenate(bps)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ebn0", default="1:1:4")
    ap.add_argument("--chunks", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--design-snr", type=float, default=0.0)
    args = ap.parse_args()

    code = PolarCode(CodeConfig(design_snr_db=args.design_snr))
    lat = LatencyParams.for_code(code)
    mutual = np.sort(code.mutual_positions) + 1
    print("mutual positions:", " ".join(map(str, mutual)))
    for ebn0 in parse_ebn0_range(args.ebn0):
        cases, bps = study(code, ebn0, args.chunks, args.seed)
        second = (cases == 2) | (cases == 3)
        rep = latency_report(cases, bps, lat)
        hist = {int(i): int((bps[second] == i).sum()) for i in mutual}
        none = int((bps[second] == 0).sum())
        red = rep.round2_reduction
        print(f"\n{ebn0:.2f} dB: {second.sum()} second rounds, reduction "
              f"{'-' if red is None else f'{red:.3f}'}, LLI/IS {rep.lli_to_is_ratio:.3f}, "
              f"no breakpoint {none}")
        print("  " + " ".join(f"{k}:{v}" for k, v in hist.items() if v))


if __name__ == "__main__":
    main()
