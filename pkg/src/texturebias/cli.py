"""Command-line pipeline: validate, tav, analyze, humaneval pack/score.

One subcommand per stage; intermediate CSVs (tav.csv, assignments.csv) are
first-class inputs so stages rerun independently. Outputs are byte-identical
for identical inputs and seed, regardless of worker count.

Exit codes: 0 success, 1 validation failure, 2 missing input, 3 internal
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import analysis, humaneval, schema, synth, tid
from .schema import SchemaError
from .tav import (ENTROPY_MODES, TavMatrix, confidence_histogram,
                  parallel_count_matrix, read_tav_csv, top_pairs,
                  write_histogram_csv, write_tav_csv, write_top_pairs_csv)
from .tav import tav as build_tav
from .util import sigfig

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_MISSING_INPUT = 2
EXIT_INTERNAL = 3


class MissingInputError(Exception):
    """A required input file or flag is absent."""


@dataclass(frozen=True)
class RunConfig:
    """Resolved inputs and knobs for one pipeline run."""

    registry: Path
    out: Path
    texture_records: Path | None = None
    val_records: Path | None = None
    adv_records: Path | None = None
    tav_csv: Path | None = None
    entropy: str = "normalized"
    bins: int = 20
    top_k: int = 50
    seed: int = 0
    workers: int = 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="texturebias",
        description="Texture-association analysis over probe record files.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="stream all inputs through validation")
    _add_common(p, need_out=False)
    _add_inputs(p)

    p = sub.add_parser("tav", help="build the association matrix and charts")
    _add_common(p)
    _add_inputs(p)

    p = sub.add_parser("analyze", help="assign textures and run bias analyses")
    _add_common(p)
    _add_inputs(p)
    p.add_argument("--tav", type=Path, default=None,
                   help="reuse an existing tav.csv instead of rebuilding")

    p = sub.add_parser("synth", help="generate a planted synthetic dataset")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--textures", type=int, default=8)
    p.add_argument("--objects", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--samples-per-texture", type=int, default=200)
    p.add_argument("--images-per-object", type=int, default=25)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("humaneval", help="package records or score responses")
    he = p.add_subparsers(dest="subcommand", required=True)

    pp = he.add_parser("pack", help="sample records into a labeling package")
    _add_common(pp)
    pp.add_argument("--assignments", type=Path, required=True)
    pp.add_argument("--count", type=int, required=True)
    pp.add_argument("--image-refs", type=Path, default=None,
                    help="JSON object mapping record_id to an image reference")
    pp.add_argument("--package-id", default=None)

    ps = he.add_parser("score", help="score a response CSV against its package")
    ps.add_argument("--package", type=Path, required=True)
    ps.add_argument("--responses", type=Path, required=True)
    ps.add_argument("--out", type=Path, required=True)
    return parser


def _add_common(p: argparse.ArgumentParser, need_out: bool = True) -> None:
    p.add_argument("--registry", type=Path, required=True)
    if need_out:
        p.add_argument("--out", type=Path, required=True)
    p.add_argument("--entropy", choices=ENTROPY_MODES, default="normalized")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--top-k", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--texture-records", type=Path, default=None)
    p.add_argument("--val-records", type=Path, default=None)
    p.add_argument("--adv-records", type=Path, default=None)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        if args.command == "tav":
            return cmd_tav(args)
        if args.command == "analyze":
            return cmd_analyze(args)
        if args.command == "synth":
            return cmd_synth(args)
        if args.command == "humaneval":
            if args.subcommand == "pack":
                return cmd_pack(args)
            return cmd_score(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except MissingInputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISSING_INPUT
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as e:
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def entrypoint() -> None:
    sys.exit(main())


def _require(path: Path | None, what: str) -> Path:
    if path is None:
        raise MissingInputError(f"{what} is required for this command")
    if not path.exists():
        raise MissingInputError(f"{what} not found: {path}")
    return path


def _load_registry(args) -> schema.ClassRegistry:
    return schema.load_registry(_require(args.registry, "--registry"))


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(args) -> int:
    """Stream every provided input through validation; exit 0 iff clean."""
    reg = _load_registry(args)
    print(f"OK {args.registry} ({reg.n} textures, {reg.m} objects)")
    checked = 0
    for flag, path, reader in (
            ("--texture-records", args.texture_records, schema.read_texture_records),
            ("--val-records", args.val_records, schema.read_image_records),
            ("--adv-records", args.adv_records, schema.read_image_records)):
        if path is None:
            continue
        _require(path, flag)
        count = sum(1 for _ in reader(path, reg))
        _check_manifest(path, reg, count)
        print(f"OK {path} ({count} records)")
        checked += 1
    if checked == 0:
        print("no record files given; registry only")
    return EXIT_OK


def _check_manifest(records_path: Path, reg: schema.ClassRegistry,
                    count: int) -> None:
    if not schema.manifest_path(records_path).exists():
        return
    manifest = schema.read_manifest(records_path)
    if manifest.record_count != count:
        raise SchemaError(f"manifest record_count {manifest.record_count} "
                          f"does not match {count} records",
                          path=schema.manifest_path(records_path))
    if manifest.registry_hash != schema.registry_hash(reg):
        raise SchemaError("manifest registry_hash does not match --registry",
                          path=schema.manifest_path(records_path))


def _build_tav(args, reg) -> TavMatrix:
    path = _require(args.texture_records, "--texture-records")
    records = schema.read_texture_records(path, reg)
    counts = parallel_count_matrix(records, reg, workers=args.workers)
    return build_tav(counts, entropy=args.entropy)


def cmd_tav(args) -> int:
    """Write tav.csv, top_pairs.csv, and confidence_hist.csv."""
    reg = _load_registry(args)
    out = _out_dir(args)
    tavm = _build_tav(args, reg)
    write_tav_csv(tavm, reg, out / "tav.csv")

    k = min(args.top_k, reg.n * reg.m)
    pairs = top_pairs(tavm, k, reg)
    write_top_pairs_csv(pairs, out / "top_pairs.csv")

    records = schema.read_texture_records(args.texture_records, reg)
    hist = confidence_histogram(records, bins=args.bins)
    write_histogram_csv(hist, out / "confidence_hist.csv")
    for name in ("tav.csv", "top_pairs.csv", "confidence_hist.csv"):
        print(f"wrote {out / name}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    """Assign textures to image records and write the analysis CSV suite."""
    reg = _load_registry(args)
    out = _out_dir(args)
    if args.tav is not None:
        tavm = read_tav_csv(_require(args.tav, "--tav"), reg)
    else:
        tavm = _build_tav(args, reg)

    val_path = _require(args.val_records, "--val-records")
    val = list(tid.batch_assign(schema.read_image_records(val_path, reg),
                                tavm, workers=args.workers))
    tid.write_assignments_csv(val, reg, out / "assignments.csv")
    print(f"wrote {out / 'assignments.csv'} ({len(val)} records)")

    adv = None
    if args.adv_records is not None:
        adv_path = _require(args.adv_records, "--adv-records")
        adv = list(tid.batch_assign(schema.read_image_records(adv_path, reg),
                                    tavm, workers=args.workers))
        tid.write_assignments_csv(adv, reg, out / "adv_assignments.csv")
        print(f"wrote {out / 'adv_assignments.csv'} ({len(adv)} records)")

    label_groups = analysis.group_by_label(val)
    pred_groups = analysis.group_by_prediction(val)
    analysis.write_groups_csv({"label": label_groups, "prediction": pred_groups},
                              reg, out / "groups.csv")

    label_dom = analysis.dominant_textures(label_groups)
    pred_dom = analysis.dominant_textures(pred_groups)
    analysis.write_dominance_csv({"label": label_dom, "prediction": pred_dom},
                                 reg, out / "dominance.csv")

    splits = {"label": analysis.dominance_split(val, label_dom, "label"),
              "prediction": analysis.dominance_split(val, pred_dom, "prediction")}
    analysis.write_dominance_split_csv(splits, out / "dominance_split.csv")

    stats = {}
    for mode, groups in (("label", label_groups), ("prediction", pred_groups)):
        stats[mode] = {
            "group_count": len(groups),
            "pearson_r": analysis.ratio_metric_correlation(groups),
            "avg_textures": analysis.avg_textures_per_class(groups),
        }
    analysis.write_correlations_csv(
        [(mode, s["group_count"], s["pearson_r"], s["avg_textures"])
         for mode, s in stats.items()],
        out / "correlations.csv")
    for name in ("groups.csv", "dominance.csv", "dominance_split.csv",
                 "correlations.csv"):
        print(f"wrote {out / name}")

    alignment = None
    agreement = None
    magnitudes = None
    if adv is not None:
        alignment = analysis.alignment_categories(adv, label_dom, pred_dom)
        analysis.write_alignment_csv(alignment, out / "alignment.csv")
        agreement = analysis.per_label_agreement(adv, label_dom, pred_dom)
        analysis.write_per_label_agreement_csv(agreement, reg,
                                               out / "per_label_agreement.csv")
        magnitudes = analysis.magnitude_comparison(val, adv)
        analysis.write_magnitude_csv(
            [("validation", magnitudes[0], len(val)),
             ("adversarial", magnitudes[1], len(adv))],
            out / "magnitude.csv")
        for name in ("alignment.csv", "per_label_agreement.csv", "magnitude.csv"):
            print(f"wrote {out / name}")
    else:
        print("no adversarial records; skipping alignment, per-label "
              "agreement, and magnitude outputs")

    _write_summary(out / "summary.json", args, val, adv, stats, splits,
                   alignment, magnitudes)
    print(f"wrote {out / 'summary.json'}")
    return EXIT_OK


def _write_summary(path: Path, args, val, adv, stats, splits, alignment,
                   magnitudes) -> None:
    """Headline numbers at 6 significant digits."""
    def opt(x):
        return None if x is None else sigfig(x)

    doc: dict[str, object] = {
        "entropy_mode": args.entropy,
        "val_record_count": len(val),
        "adv_record_count": None if adv is None else len(adv),
    }
    for mode in ("label", "prediction"):
        s = splits[mode]
        doc[mode] = {
            "group_count": stats[mode]["group_count"],
            "pearson_r": opt(stats[mode]["pearson_r"]),
            "avg_textures": sigfig(stats[mode]["avg_textures"]),
            "dominance_split": {
                "dominant_count": s.dominant_count,
                "nondominant_count": s.nondominant_count,
                "dominant_mean": opt(s.dominant_mean),
                "nondominant_mean": opt(s.nondominant_mean),
                "overall_mean": opt(s.overall_mean),
            },
        }
    doc["alignment"] = None if alignment is None else {
        "both_ratio": sigfig(alignment.both_ratio),
        "pred_only_ratio": sigfig(alignment.pred_only_ratio),
        "label_only_ratio": sigfig(alignment.label_only_ratio),
        "neither_ratio": sigfig(alignment.neither_ratio),
        "sample_count": alignment.sample_count,
        "uncovered_count": alignment.uncovered_count,
    }
    doc["magnitude"] = None if magnitudes is None else {
        "validation_mean_similarity": sigfig(magnitudes[0]),
        "adversarial_mean_similarity": sigfig(magnitudes[1]),
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def cmd_synth(args) -> int:
    """Generate a planted world and write its dataset files."""
    mapping = {i: i % args.objects for i in range(args.textures)}
    if args.textures > args.objects:
        raise ValueError("need at least as many objects as textures "
                         "for an injective mapping")
    world = synth.PlantedWorld(mapping=mapping, noise=args.noise,
                               samples_per_texture=args.samples_per_texture,
                               images_per_object=args.images_per_object,
                               seed=args.seed, num_objects=args.objects)
    paths = synth.write_world(world, args.out)
    for p in paths.values():
        print(f"wrote {p}")
    return EXIT_OK


def cmd_pack(args) -> int:
    """Sample assignments into a labeling package JSON."""
    reg = _load_registry(args)
    out = _out_dir(args)
    assignments = tid.read_assignments_csv(
        _require(args.assignments, "--assignments"), reg)
    image_refs = None
    if args.image_refs is not None:
        raw = json.loads(_require(args.image_refs, "--image-refs")
                         .read_text(encoding="utf-8"))
        if not isinstance(raw, dict):
            raise SchemaError("image refs must be a JSON object",
                              path=args.image_refs)
        image_refs = {str(k): str(v) for k, v in raw.items()}
    package = humaneval.pack(assignments, image_refs, count=args.count,
                             seed=args.seed, reg=reg,
                             package_id=args.package_id)
    humaneval.write_package(package, out / "package.json")
    print(f"wrote {out / 'package.json'} ({len(package.items)} items)")
    return EXIT_OK


def cmd_score(args) -> int:
    """Score a response CSV and write agreement.csv."""
    package = humaneval.read_package(_require(args.package, "--package"))
    response = humaneval.read_responses_csv(
        _require(args.responses, "--responses"))
    report = humaneval.score(package, response)
    out = _out_dir(args)
    humaneval.write_agreement_csv(report, package, out / "agreement.csv")
    print(f"wrote {out / 'agreement.csv'} "
          f"(overall {report.agreeing}/{report.answered})")
    return EXIT_OK
