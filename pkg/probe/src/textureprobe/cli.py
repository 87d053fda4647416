"""Command line entry point: probe --model --data --kind --registry --out."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .dataset import DatasetError
from .formats import FormatError
from .models import MODEL_NAMES, ModelError, WEIGHT_MODES
from .runner import KINDS, ProbeError, ProbeJob, run_probe

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MISSING_INPUT = 2
EXIT_INTERNAL = 3


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="probe",
        description="Run a pretrained classifier over a class-folder dataset "
                    "and export probe records.")
    p.add_argument("--model", required=True, choices=MODEL_NAMES)
    p.add_argument("--data", required=True, help="dataset root folder")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--registry", required=True, help="class registry JSON")
    p.add_argument("--out", required=True, help="output records path (.jsonl)")
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--device", default="cpu")
    p.add_argument("--weights", choices=WEIGHT_MODES, default="default",
                   help="default uses pretrained weights; none builds a "
                        "seeded random-weight head sized to the registry")
    return p


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)

    for flag, path in (("--data", args.data), ("--registry", args.registry)):
        if not Path(path).exists():
            print(f"error: {flag} not found: {path}", file=sys.stderr)
            return EXIT_MISSING_INPUT

    job = ProbeJob(model=args.model, data=Path(args.data), kind=args.kind,
                   registry=Path(args.registry), out=Path(args.out),
                   batch=args.batch, device=args.device, weights=args.weights)
    try:
        result = run_probe(job)
    except (DatasetError, FormatError, ModelError, ProbeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL

    print(f"wrote {result.records_path} ({result.record_count} records, "
          f"{result.skipped_count} skipped)")
    print(f"wrote {result.manifest_path}")
    return EXIT_OK


def entrypoint() -> None:
    sys.exit(main())
