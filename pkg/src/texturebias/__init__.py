"""Texture-bias analysis over class-probe records.

Build texture-object association matrices from texture-probe predictions,
identify the dominating texture of image-probe records, and aggregate the
bias analyses and human-agreement scoring on top.
"""

from .schema import (ClassRegistry, DatasetManifest, ImageProbeRecord,
                     SchemaError, TextureProbeRecord, load_registry,
                     read_image_records, read_manifest, read_texture_records,
                     registry_hash, save_registry, write_image_records,
                     write_manifest, write_texture_records)
# The tav() op itself stays at texturebias.tav.tav so the submodule name is
# not shadowed by a package attribute.
from .tav import (ConfidenceHistogram, CountMatrix, TavComponents, TavMatrix,
                  confidence_histogram, count_matrix, parallel_count_matrix,
                  read_tav_csv, tav_components, top_pairs, write_tav_csv)
from .tid import (TidAssignment, TidError, batch_assign, read_assignments_csv,
                  tid_assign, tid_magnitude, write_assignments_csv)
from .analysis import (AlignmentReport, AnalysisGroup, DominanceSplit,
                       DominantEntry, LabelAgreement, alignment_categories,
                       avg_textures_per_class, dominance_split,
                       dominant_textures, group_by_label, group_by_prediction,
                       magnitude_comparison, per_label_agreement,
                       ratio_metric_correlation)
from .humaneval import (EvalItem, EvalPackage, EvalResponse, ScoreReport,
                        pack, read_package, read_responses_csv, score,
                        write_package, write_responses_csv)
from .synth import (PlantedWorld, gen_image_records, gen_texture_records,
                    registry_for, write_world)

__version__ = "0.1.0"

__all__ = [
    "AlignmentReport", "AnalysisGroup", "ClassRegistry", "ConfidenceHistogram",
    "CountMatrix", "DatasetManifest", "DominanceSplit", "DominantEntry",
    "EvalItem", "EvalPackage", "EvalResponse", "ImageProbeRecord",
    "LabelAgreement", "PlantedWorld", "SchemaError", "ScoreReport",
    "TavComponents", "TavMatrix", "TextureProbeRecord", "TidAssignment",
    "TidError", "alignment_categories", "avg_textures_per_class",
    "batch_assign", "confidence_histogram", "count_matrix", "dominance_split",
    "dominant_textures", "gen_image_records", "gen_texture_records",
    "group_by_label", "group_by_prediction", "load_registry",
    "magnitude_comparison", "pack", "parallel_count_matrix",
    "per_label_agreement", "ratio_metric_correlation", "read_assignments_csv",
    "read_image_records", "read_manifest", "read_package",
    "read_responses_csv", "read_tav_csv", "read_texture_records",
    "registry_for", "registry_hash", "save_registry", "score",
    "tav_components", "tid_assign", "tid_magnitude", "top_pairs",
    "write_assignments_csv", "write_image_records", "write_manifest",
    "write_package", "write_responses_csv", "write_tav_csv",
    "write_texture_records", "write_world",
]
