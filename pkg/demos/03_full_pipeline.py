"""
The command-line pipeline end to end
====================================

Generates a synthetic dataset, then drives every pipeline stage the way a
shell user would: validate, build the association matrix, run the bias
analyses, and read the headline numbers back from summary.json. Outputs
land in a temporary directory and are byte-stable across worker counts.
"""

import json
import tempfile
from pathlib import Path

from texturebias import cli

base = Path(tempfile.mkdtemp(prefix="texturebias-demo-"))
data = base / "data"
out = base / "run"
print(f"working under {base}\n")


def run(*argv):
    argv = [str(a) for a in argv]
    print("$ texturebias " + " ".join(argv))
    code = cli.main(argv)
    print(f"(exit {code})\n")
    assert code == 0


# Stage 0: a planted dataset to stand in for real probe exports.
run("synth", "--out", data, "--textures", 8, "--objects", 8,
    "--noise", 0.08, "--samples-per-texture", 250,
    "--images-per-object", 30, "--seed", 42)

# Stage 1: schema validation, including the manifest sidecars.
run("validate", "--registry", data / "registry.json",
    "--texture-records", data / "texture_records.jsonl",
    "--val-records", data / "image_records.jsonl")

# Stage 2: association matrix, top pairs, confidence histogram.
run("tav", "--registry", data / "registry.json",
    "--texture-records", data / "texture_records.jsonl",
    "--out", out, "--bins", 12, "--top-k", 10, "--workers", 4)

# Stage 3: texture assignment plus the grouped analyses. Reuses the
# tav.csv from stage 2 instead of rebuilding it, and treats the same
# records as both validation and adversarial input so every output
# appears.
run("analyze", "--registry", data / "registry.json",
    "--tav", out / "tav.csv",
    "--val-records", data / "image_records.jsonl",
    "--adv-records", data / "image_records.jsonl",
    "--out", out, "--workers", 4)

print("produced files:")
for path in sorted(out.iterdir()):
    print(f"  {path.name}")

summary = json.loads((out / "summary.json").read_text())
print("\nheadline numbers:")
print(f"  validation records: {summary['val_record_count']}")
print(f"  label-mode groups:  {summary['label']['group_count']}")
print(f"  avg textures/class: {summary['label']['avg_textures']}")
split = summary["label"]["dominance_split"]
print(f"  dominant accuracy:  {split['dominant_mean']} "
      f"over {split['dominant_count']} records")
print(f"  alignment both-ratio: {summary['alignment']['both_ratio']}")
