"""Regenerate the CSV data behind the simulation and latency figures.

    python3 scripts/reproduce_figures.py --figures F5 F7 F10 --max-chunks 20000

Each figure writes ``<out>/<id>.csv`` and ``<out>/<id>.meta.json``. The
defaults are desk scale; raise --max-chunks and --min-errors for smoother
curves at high Eb/N0.
"""

import argparse
import logging
import time

from polar_memory.harness import FigureId, parse_ebn0_range, run_figure


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--figures", nargs="+", default=[f.value for f in FigureId])
    ap.add_argument("--ebn0", help="start:step:stop in dB")
    ap.add_argument("--max-chunks", type=int)
    ap.add_argument("--min-errors", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--workers", type=int)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    overrides = {"max_chunks": args.max_chunks, "min_chunk_errors": args.min_errors,
                 "master_seed": args.seed, "workers": args.workers}
    if args.ebn0:
        overrides["ebn0_points"] = parse_ebn0_range(args.ebn0)
    overrides = {k: v for k, v in overrides.items() if v is not None}

    def progress(p):
        logging.info("  %.2f dB  chunks=%d  block errors=%d", p.ebn0_db, p.chunks,
                     p.stats.block_errors)

    for fig in args.figures:
        t0 = time.time()
        logging.info("figure %s", fig)
        for path in run_figure(fig, overrides, args.out, progress):
            logging.info("wrote %s", path)
        logging.info("figure %s done in %.1f s", fig, time.time() - t0)


if __name__ == "__main__":
    main()
