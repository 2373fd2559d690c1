"""Command line entry point: ``crossqam <subcommand> [options]``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from .exceptions import ConfigurationError
from .harness import (
    CONSTELLATIONS,
    LABELINGS,
    ExperimentConfig,
    format_summary,
    load_config,
    run,
    summarize_constellations,
)


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value config file")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")
    p.add_argument("--constellation", choices=CONSTELLATIONS)
    p.add_argument("--m", type=int, help="cross-QAM size parameter (3*4**m points)")
    p.add_argument("--order", type=int, help="square-QAM order")
    p.add_argument("--labeling", choices=LABELINGS)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crossqam", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-gray", help="check the Gray property of a labeling")
    _common(p)

    p = sub.add_parser("export-labeling", help="write a labeling as CSV")
    _common(p)

    p = sub.add_parser("papr", help="DFT-s-OFDM PAPR CCDF campaign")
    _common(p)
    p.add_argument("--m-used", type=int)
    p.add_argument("--n-total", type=int)
    p.add_argument("--oversample", type=int)
    p.add_argument("--n-symbols", type=int)

    p = sub.add_parser("ber", help="uncoded or LDPC-coded BER sweep over AWGN")
    _common(p)
    p.add_argument("--coded", action="store_true", help="use the rate-1/2 (3,6) LDPC code")
    p.add_argument("--ebn0", type=_floats, help="comma-separated Eb/N0 grid in dB")
    p.add_argument("--min-errors", type=int)
    p.add_argument("--max-bits", type=int)
    p.add_argument("--max-frames", type=int)
    p.add_argument("--llr-mode", choices=("exact", "maxlog"))
    p.add_argument("--ldpc-seed", type=int)
    p.add_argument("--normalization", choices=("average", "peak"))

    p = sub.add_parser("summarize", help="constellation PAPR, distance and neighbour table")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a text table")

    sub.add_parser("defaults", help="print the default configuration")
    return parser


_KIND = {
    "verify-gray": "verify-gray",
    "export-labeling": "export-labeling",
    "papr": "papr",
}

_OVERRIDES = (
    "seed", "out", "constellation", "m", "order", "labeling", "m_used", "n_total",
    "oversample", "n_symbols", "min_errors", "max_bits", "max_frames", "llr_mode",
    "ldpc_seed", "normalization",
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.command == "defaults":
        sys.stdout.write(ExperimentConfig().to_text())
        return 0
    if args.command == "summarize":
        rows = summarize_constellations()
        print(json.dumps(rows, indent=2) if args.json else format_summary(rows))
        return 0

    overrides = {k: getattr(args, k, None) for k in _OVERRIDES}
    if args.command == "ber":
        overrides["kind"] = "ber-coded" if args.coded else "ber-uncoded"
        if args.ebn0 is not None:
            overrides["ebn0_db"] = args.ebn0
    else:
        overrides["kind"] = _KIND[args.command]
    try:
        cfg = load_config(args.config, **overrides)
        record = run(cfg)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    if cfg.kind == "verify-gray":
        print(record.summary["text"])
    else:
        print(json.dumps(record.summary, indent=2, default=float))
    for name in record.files:
        print(f"wrote {cfg.out}/{name}", file=sys.stderr)
    return 0 if record.ok else 1


if __name__ == "__main__":
    sys.exit(main())
