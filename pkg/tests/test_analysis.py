import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from texturebias import analysis
from texturebias.analysis import (AnalysisGroup, DominantEntry,
                                  alignment_categories,
                                  avg_textures_per_class, dominance_split,
                                  dominant_textures, group_by_label,
                                  group_by_prediction, magnitude_comparison,
                                  per_label_agreement,
                                  ratio_metric_correlation)
from texturebias.schema import ClassRegistry
from texturebias.tid import TidAssignment

# Pearson r of the points (0.2, 0.1), (0.5, 0.6), (0.9, 0.8), by hand.
PEARSON_3PT = 0.9476966276867815


def asg(record_id, texture, pred, conf=0.9, label=None, sim=0.5):
    return TidAssignment(record_id=record_id, texture_id=texture,
                         similarity=sim, predicted_object_id=pred,
                         confidence=conf, true_label_id=label)


@pytest.fixture
def labeled():
    # class 0: 3 samples, textures {0: 2 correct, 1: 1 wrong}
    # class 1: 2 samples, texture 1, one correct
    return [
        asg("a", 0, 0, 0.9, label=0),
        asg("b", 0, 0, 0.8, label=0),
        asg("c", 1, 1, 0.7, label=0),
        asg("d", 1, 1, 0.6, label=1),
        asg("e", 1, 0, 0.5, label=1),
    ]


def test_group_by_label_counts_and_accuracy(labeled):
    groups = group_by_label(labeled)
    assert [(g.class_id, g.texture_id, g.sample_count) for g in groups] == [
        (0, 0, 2), (0, 1, 1), (1, 1, 2)]
    by_key = {(g.class_id, g.texture_id): g for g in groups}
    assert by_key[(0, 0)].count_ratio == pytest.approx(2 / 3)
    assert by_key[(0, 0)].mean_metric == 1.0
    assert by_key[(0, 1)].mean_metric == 0.0
    assert by_key[(1, 1)].mean_metric == 0.5


def test_group_by_label_requires_labels():
    with pytest.raises(ValueError, match="no true label"):
        group_by_label([asg("x", 0, 0)])


def test_group_by_prediction_uses_confidence(labeled):
    groups = group_by_prediction(labeled)
    by_key = {(g.class_id, g.texture_id): g for g in groups}
    # predicted class 0 gathers a, b (texture 0) and e (texture 1)
    assert by_key[(0, 0)].mean_metric == pytest.approx((0.9 + 0.8) / 2)
    assert by_key[(0, 1)].mean_metric == pytest.approx(0.5)
    assert by_key[(0, 0)].count_ratio == pytest.approx(2 / 3)


def test_groups_come_out_sorted(labeled):
    groups = group_by_label(list(reversed(labeled)))
    keys = [(g.class_id, g.texture_id) for g in groups]
    assert keys == sorted(keys)


def test_dominant_textures_picks_max_count():
    groups = [AnalysisGroup(0, 2, 5, 0.5, 1.0), AnalysisGroup(0, 1, 3, 0.3, 1.0),
              AnalysisGroup(1, 0, 2, 1.0, 1.0)]
    dom = dominant_textures(groups)
    assert dom[0] == DominantEntry(2, 5, False)
    assert dom[1] == DominantEntry(0, 2, False)


def test_dominant_textures_flags_ties_at_lowest_id():
    groups = [AnalysisGroup(0, 3, 4, 0.5, 1.0), AnalysisGroup(0, 1, 4, 0.5, 1.0)]
    assert dominant_textures(groups)[0] == DominantEntry(1, 4, True)


def test_dominance_split_label_mode(labeled):
    dom = dominant_textures(group_by_label(labeled))
    split = dominance_split(labeled, dom, "label")
    # dominant: a, b (class 0 / texture 0) and d, e (class 1 / texture 1)
    assert split.dominant_count == 4
    assert split.nondominant_count == 1
    assert split.dominant_mean == pytest.approx(3 / 4)
    assert split.nondominant_mean == 0.0
    assert split.overall_mean == pytest.approx(3 / 5)


def test_dominance_split_weighted_mean_identity(labeled):
    dom = dominant_textures(group_by_label(labeled))
    s = dominance_split(labeled, dom, "label")
    total = s.dominant_count + s.nondominant_count
    recombined = (s.dominant_mean * s.dominant_count
                  + s.nondominant_mean * s.nondominant_count) / total
    assert abs(recombined - s.overall_mean) <= 1e-12


def test_dominance_split_empty_side_is_none(labeled):
    dom = {0: DominantEntry(0, 2, False), 1: DominantEntry(1, 2, False)}
    only_dominant = [a for a in labeled if a.record_id in "abd"]
    split = dominance_split(only_dominant, dom, "label")
    assert split.nondominant_count == 0
    assert split.nondominant_mean is None


def test_dominance_split_requires_covered_classes(labeled):
    with pytest.raises(ValueError, match="missing from dominant"):
        dominance_split(labeled, {0: DominantEntry(0, 1, False)}, "label")


def test_dominance_split_rejects_bad_mode(labeled):
    with pytest.raises(ValueError, match="mode"):
        dominance_split(labeled, {}, "bogus")


def test_pearson_matches_frozen_oracle():
    groups = [AnalysisGroup(0, 0, 1, 0.2, 0.1),
              AnalysisGroup(0, 1, 1, 0.5, 0.6),
              AnalysisGroup(0, 2, 1, 0.9, 0.8)]
    r = ratio_metric_correlation(groups)
    assert r == pytest.approx(PEARSON_3PT, abs=1e-12)


def test_pearson_needs_two_groups():
    with pytest.raises(ValueError, match="at least 2"):
        ratio_metric_correlation([AnalysisGroup(0, 0, 1, 1.0, 1.0)])


def test_pearson_zero_variance_is_none():
    groups = [AnalysisGroup(0, 0, 1, 0.5, 0.1),
              AnalysisGroup(0, 1, 1, 0.5, 0.9)]
    assert ratio_metric_correlation(groups) is None


def test_avg_textures_per_class():
    groups = [AnalysisGroup(0, 0, 1, 0.5, 1.0), AnalysisGroup(0, 1, 1, 0.5, 1.0),
              AnalysisGroup(0, 2, 1, 0.5, 1.0), AnalysisGroup(1, 1, 1, 1.0, 1.0),
              AnalysisGroup(2, 0, 1, 0.5, 1.0), AnalysisGroup(2, 2, 1, 0.5, 1.0)]
    assert avg_textures_per_class(groups) == pytest.approx(2.0)
    with pytest.raises(ValueError, match="no groups"):
        avg_textures_per_class([])


@pytest.fixture
def dominance_maps():
    label_dom = {0: DominantEntry(0, 5, False), 1: DominantEntry(1, 5, False)}
    pred_dom = {0: DominantEntry(2, 5, False), 1: DominantEntry(1, 5, False)}
    return label_dom, pred_dom


def test_alignment_covers_all_categories(dominance_maps):
    label_dom, pred_dom = dominance_maps
    adv = [
        asg("both", 1, 1, label=1),      # texture 1 = both dominants
        asg("pred", 2, 0, label=0),      # matches pred dominant only
        asg("label", 0, 0, label=0),     # matches label dominant only
        asg("neither", 3, 0, label=0),
    ]
    report = alignment_categories(adv, label_dom, pred_dom)
    assert report.both_ratio == 0.25
    assert report.pred_only_ratio == 0.25
    assert report.label_only_ratio == 0.25
    assert report.neither_ratio == 0.25
    assert report.sample_count == 4
    assert report.uncovered_count == 0


def test_alignment_skips_uncovered_classes(dominance_maps):
    label_dom, pred_dom = dominance_maps
    adv = [asg("in", 0, 0, label=0), asg("out", 0, 7, label=0)]
    report = alignment_categories(adv, label_dom, pred_dom)
    assert report.sample_count == 1
    assert report.uncovered_count == 1


def test_alignment_requires_some_coverage(dominance_maps):
    label_dom, pred_dom = dominance_maps
    with pytest.raises(ValueError, match="no categorizable"):
        alignment_categories([asg("out", 0, 7, label=7)], label_dom, pred_dom)


def test_alignment_requires_labels(dominance_maps):
    label_dom, pred_dom = dominance_maps
    with pytest.raises(ValueError, match="no true label"):
        alignment_categories([asg("x", 0, 0)], label_dom, pred_dom)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_alignment_ratios_partition(data):
    n_classes, n_textures = 3, 4
    label_dom = {c: DominantEntry(data.draw(st.integers(0, n_textures - 1)), 1,
                                  False) for c in range(n_classes)}
    pred_dom = {c: DominantEntry(data.draw(st.integers(0, n_textures - 1)), 1,
                                 False) for c in range(n_classes)}
    adv = [asg(f"r{k}", data.draw(st.integers(0, n_textures - 1)),
               data.draw(st.integers(0, n_classes - 1)),
               label=data.draw(st.integers(0, n_classes - 1)))
           for k in range(data.draw(st.integers(1, 30)))]
    report = alignment_categories(adv, label_dom, pred_dom)
    total = (report.both_ratio + report.pred_only_ratio
             + report.label_only_ratio + report.neither_ratio)
    assert abs(total - 1.0) <= 1e-9


def test_per_label_agreement_rates(dominance_maps):
    label_dom, pred_dom = dominance_maps
    adv = [
        asg("p1", 2, 0, label=0),   # pred-only for label 0
        asg("p2", 2, 0, label=0),
        asg("l1", 0, 0, label=0),   # label-only for label 0
        asg("b", 1, 1, label=1),    # both: excluded
    ]
    rates = per_label_agreement(adv, label_dom, pred_dom)
    assert set(rates) == {0}
    assert rates[0].pred_agree_rate == pytest.approx(2 / 3)
    assert rates[0].label_agree_rate == pytest.approx(1 / 3)
    assert rates[0].sample_count == 3


def test_magnitude_comparison():
    a = [asg("a", 0, 0, sim=0.4), asg("b", 0, 0, sim=0.6)]
    b = [asg("c", 0, 0, sim=0.9)]
    assert magnitude_comparison(a, b) == (pytest.approx(0.5), 0.9)
    with pytest.raises(ValueError, match="nonempty"):
        magnitude_comparison(a, [])


@pytest.fixture
def reg():
    return ClassRegistry(("stripes", "dots", "mesh", "grid"),
                         ("zebra", "dice"))


def test_groups_csv_layout(tmp_path, reg, labeled):
    path = tmp_path / "groups.csv"
    analysis.write_groups_csv({"label": group_by_label(labeled)}, reg, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "mode,class_id,class_name,texture_id,texture_name,count,ratio,metric"
    assert lines[1] == "label,0,zebra,0,stripes,2,0.66666666666666663,1"
    rows = analysis.read_table(path, analysis.GROUPS_HEADER)
    assert len(rows) == 3


def test_dominance_csv_layout(tmp_path, reg):
    path = tmp_path / "dominance.csv"
    analysis.write_dominance_csv(
        {"label": {0: DominantEntry(1, 4, True)}}, reg, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "label,0,zebra,1,dots,4,1"


def test_dominance_split_csv_blank_for_missing(tmp_path):
    path = tmp_path / "split.csv"
    analysis.write_dominance_split_csv(
        {"label": analysis.DominanceSplit(0.9, None, 0.9, 3, 0)}, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "label,3,0,0.90000000000000002,,0.90000000000000002"


def test_correlations_csv_blank_r(tmp_path):
    path = tmp_path / "correlations.csv"
    analysis.write_correlations_csv([("label", 4, None, 2.5)], path)
    assert path.read_text().splitlines()[1] == "label,4,,2.5"


def test_read_table_checks_header(tmp_path):
    path = tmp_path / "t.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(Exception, match="header"):
        analysis.read_table(path, ["a", "b"])
