"""Command line entry point: ``python3 -m polar_memory {sweep,figure,construct}``.

Exit status is 0 on success, 1 for an invalid configuration and 2 when the
simulation itself fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path

from .construction import CodeConfig, construct
from .harness import (ExperimentSpec, FigureId, SpecError, System, parse_ebn0_range,
                      run_figure, run_sweep, save_metadata, write_csv)

log = logging.getLogger("polar_memory")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

# CLI flag -> CodeConfig field
_CODE_FLAGS = {"n": "N", "k": "K", "kcrc": "K_crc", "kp": "K_p", "m": "m",
               "list_size": "L", "design_snr": "design_snr_db"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_code_flags(p):
    g = p.add_argument_group("code")
    g.add_argument("--n", type=int, help="block length N")
    g.add_argument("--k", type=int, help="non-frozen positions K, CRC included")
    g.add_argument("--kcrc", type=int, help="CRC length")
    g.add_argument("--kp", type=int, help="mutual bits per chunk")
    g.add_argument("--m", type=int, help="blocks per chunk of the general scheme")
    g.add_argument("--list-size", type=int, help="SCL list size")
    g.add_argument("--design-snr", type=float, help="construction Eb/N0 in dB")
    g.add_argument("--config", type=Path, help="JSON file of experiment fields")


def _add_run_flags(p):
    g = p.add_argument_group("simulation")
    g.add_argument("--ebn0", help="start:step:stop in dB, or a comma list")
    g.add_argument("--seed", type=int, help="master seed")
    g.add_argument("--min-errors", type=int, help="block errors per point before stopping")
    g.add_argument("--max-chunks", type=int, help="chunk cap per point")
    g.add_argument("--workers", type=int, help="worker processes")
    g.add_argument("--batch-chunks", type=int, help="chunks per work item")
    g.add_argument("--out", type=Path, default=Path("results"), help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polar_memory", description="Polar codes with memory simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="simulate one system over Eb/N0")
    sw.add_argument("--system", choices=["pcm", "standalone"], help="PCM chunks or plain blocks")
    sw.add_argument("--decoder", choices=["sc", "scl", "bp"])
    sw.add_argument("--scheme", choices=["pairwise", "general"])
    sw.add_argument("--rate", type=float, help="rate-match a stand-alone code to this rate")
    sw.add_argument("--bp-iters", type=int)
    _add_code_flags(sw)
    _add_run_flags(sw)

    fig = sub.add_parser("figure", help="reproduce one figure's curves")
    fig.add_argument("figure_id", help="one of " + ", ".join(f.value for f in FigureId))
    _add_code_flags(fig)
    _add_run_flags(fig)

    con = sub.add_parser("construct", help="print or save a code layout")
    con.add_argument("--out", type=Path, help="write the layout to this file")
    _add_code_flags(con)
    return parser


def _load_config_file(path: Path | None) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read config file {path}: {exc}") from None
    if not isinstance(data, dict):
        raise SpecError("config file must hold a JSON object")
    return data


def _code_config(args, file_data: dict) -> CodeConfig:
    cfg = dict(file_data.get("config", {}))
    for flag, name in _CODE_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            cfg[name] = value
    bad = set(cfg) - {f.name for f in fields(CodeConfig)}
    if bad:
        raise SpecError(f"unknown code config fields: {sorted(bad)}")
    try:
        return CodeConfig(**cfg)
    except (TypeError, ValueError) as exc:
        raise SpecError(str(exc)) from None


def _run_fields(args) -> dict:
    out = {}
    if args.ebn0 is not None:
        try:
            out["ebn0_points"] = parse_ebn0_range(args.ebn0)
        except ValueError as exc:
            raise SpecError(str(exc)) from None
    for flag, name in (("seed", "master_seed"), ("min_errors", "min_chunk_errors"),
                       ("max_chunks", "max_chunks"), ("workers", "workers"),
                       ("batch_chunks", "batch_chunks")):
        value = getattr(args, flag, None)
        if value is not None:
            out[name] = value
    return out


def _sweep_spec(args) -> ExperimentSpec:
    data = _load_config_file(args.config)
    data["config"] = _code_config(args, data)
    data.update(_run_fields(args))
    if args.system or args.decoder:
        current = System(data.get("system", System.PCM_SC))
        pcm = current.is_pcm if args.system is None else args.system == "pcm"
        decoder = args.decoder or current.decoder_kind
        data["system"] = System.from_parts(pcm, decoder)
    if args.scheme:
        data["scheme"] = args.scheme
    if args.rate is not None:
        data["rate"] = args.rate
    if args.bp_iters is not None:
        data["bp_iters"] = args.bp_iters
    return ExperimentSpec.from_dict(data)


def _print_points(result):
    cols = ("ebn0_db", "chunks", "block_errors", "ber", "per", "second_round_rate", "alpha")
    print("  ".join(f"{c:>17}" for c in cols))
    for row in result.rows():
        cells = []
        for c in cols:
            v = row[c]
            cells.append(f"{'-':>17}" if v is None else
                         f"{v:>17.6g}" if isinstance(v, float) else f"{v:>17}")
        print("  ".join(cells))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        if args.command == "construct":
            cfg = _code_config(args, _load_config_file(args.config))
            _, layout = construct(cfg)
            if args.out:
                layout.save(args.out)
                print(f"wrote {args.out}")
            else:
                print(layout.to_text(), end="")
            return EXIT_OK

        if args.command == "sweep":
            spec = _sweep_spec(args)
        else:
            data = _load_config_file(args.config)
            overrides = dict(data)
            overrides.update(_run_fields(args))
            overrides["config"] = _code_config(args, data)
            try:
                FigureId(args.figure_id.upper())
            except ValueError:
                raise SpecError(f"unknown figure id {args.figure_id!r}") from None
    except SpecError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    progress = (lambda p: log.info("%.2f dB: %d chunks, %d block errors",
                                   p.ebn0_db, p.chunks, p.stats.block_errors))
    try:
        if args.command == "sweep":
            result = run_sweep(spec, progress)
            csv_path = write_csv(args.out / "sweep.csv", result.rows())
            est = result.alpha_estimate(min_failures=10)
            save_metadata(args.out / "sweep.meta.json", {
                "spec": spec.to_dict(),
                "alpha": {"min": est.alpha_min, "max": est.alpha_max,
                          "ebn0_range": est.ebn0_range, "min_failures": 10},
            })
            _print_points(result)
            print(f"wrote {csv_path}")
        else:
            paths = run_figure(args.figure_id, overrides, args.out, progress)
            for p in paths:
                print(f"wrote {p}")
    except SpecError as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - reported through the exit status
        log.exception("simulation failed")
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
