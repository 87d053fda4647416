import json

import numpy as np
import pytest

from texturebias import humaneval
from texturebias.humaneval import (EvalItem, EvalPackage, EvalResponse,
                                   pack, score, simulate_uniform_responses)
from texturebias.schema import ClassRegistry, SchemaError
from texturebias.tid import TidAssignment


def reg_with(n):
    return ClassRegistry(tuple(f"t{i}" for i in range(n)), ("a", "b"))


def assignments_cycling(count, n):
    return [TidAssignment(f"r{k}", k % n, 0.9, 0, 0.9) for k in range(count)]


def test_item_validation():
    with pytest.raises(ValueError, match="distinct"):
        EvalItem("r", "img", (1, 1, 2, 3), 0)
    with pytest.raises(ValueError, match="4 options"):
        EvalItem("r", "img", (1, 2, 3), 0)
    with pytest.raises(ValueError, match="out of range"):
        EvalItem("r", "img", (1, 2, 3, 4), 4)
    assert EvalItem("r", "img", (5, 2, 9, 4), 2).tid_texture_id == 9


def test_package_validation():
    item = EvalItem("r", "img", (0, 1, 2, 3), 0)
    names = {i: f"t{i}" for i in range(4)}
    with pytest.raises(ValueError, match="duplicate record"):
        EvalPackage("p", (item, item), 0, names)
    with pytest.raises(ValueError, match="missing from texture_names"):
        EvalPackage("p", (item,), 0, {0: "t0"})


def test_response_validation():
    with pytest.raises(ValueError, match="no selections"):
        EvalResponse("p", {"r": ()})
    with pytest.raises(ValueError, match="out of range"):
        EvalResponse("p", {"r": (4,)})


def test_pack_with_four_textures_forces_option_set():
    package = pack(assignments_cycling(6, 4), None, count=6, seed=1,
                   reg=reg_with(4))
    for item in package.items:
        assert sorted(item.options) == [0, 1, 2, 3]


def test_pack_options_contain_assigned_texture():
    assignments = assignments_cycling(50, 9)
    by_id = {a.record_id: a for a in assignments}
    package = pack(assignments, None, count=30, seed=3, reg=reg_with(9))
    assert len(package.items) == 30
    for item in package.items:
        assigned = by_id[item.record_id].texture_id
        assert item.options[item.tid_option_index] == assigned
        assert len(set(item.options)) == 4


def test_pack_rejects_small_worlds():
    with pytest.raises(ValueError, match="at least 4 textures"):
        pack(assignments_cycling(5, 3), None, count=5, seed=0, reg=reg_with(3))
    with pytest.raises(ValueError, match="exceeds"):
        pack(assignments_cycling(5, 4), None, count=6, seed=0, reg=reg_with(4))


def test_pack_uses_image_refs():
    refs = {f"r{k}": f"images/{k}.png" for k in range(8)}
    package = pack(assignments_cycling(8, 4), refs, count=8, seed=0,
                   reg=reg_with(4))
    for item in package.items:
        assert item.image_ref == f"images/{item.record_id[1:]}.png"
    with pytest.raises(ValueError, match="no image ref"):
        pack(assignments_cycling(8, 4), {}, count=1, seed=0, reg=reg_with(4))


def test_pack_same_seed_is_byte_identical(tmp_path):
    assignments = assignments_cycling(40, 6)
    paths = []
    for name in ("one.json", "two.json"):
        package = pack(assignments, None, count=20, seed=9, reg=reg_with(6))
        path = tmp_path / name
        humaneval.write_package(package, path)
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_pack_default_package_id():
    package = pack(assignments_cycling(4, 4), None, count=2, seed=77,
                   reg=reg_with(4))
    assert package.package_id == "eval-77"
    named = pack(assignments_cycling(4, 4), None, count=2, seed=77,
                 reg=reg_with(4), package_id="batch-a")
    assert named.package_id == "batch-a"


def make_package(count=10, n=8, seed=0):
    return pack(assignments_cycling(count, n), None, count=count, seed=seed,
                reg=reg_with(n))


def select_all(package, correct):
    """Response choosing the hidden option for the given record ids."""
    return EvalResponse(package.package_id, {
        it.record_id: ((it.tid_option_index,) if it.record_id in correct
                       else ((it.tid_option_index + 1) % 4,))
        for it in package.items})


def test_score_extremes():
    package = make_package()
    everyone = {it.record_id for it in package.items}
    assert score(package, select_all(package, everyone)).overall_rate == 1.0
    assert score(package, select_all(package, set())).overall_rate == 0.0


def test_score_agreement_means_hidden_option_selected():
    package = make_package(count=4)
    items = package.items
    response = EvalResponse(package.package_id, {
        items[0].record_id: (items[0].tid_option_index,),
        items[1].record_id: tuple(sorted({items[1].tid_option_index,
                                          (items[1].tid_option_index + 1) % 4})),
        items[2].record_id: ((items[2].tid_option_index + 2) % 4,),
    })
    report = score(package, response)
    assert report.answered == 3
    assert report.agreeing == 2
    assert report.overall_rate == pytest.approx(2 / 3)


def test_score_is_answered_weighted_mean_of_per_texture():
    package = make_package(count=40, n=8, seed=4)
    correct = {it.record_id for i, it in enumerate(package.items) if i % 3}
    report = score(package, select_all(package, correct))
    weighted = sum(t.rate * t.answered for t in report.per_texture.values())
    assert report.overall_rate == pytest.approx(weighted / report.answered)
    assert sum(t.answered for t in report.per_texture.values()) == report.answered


def test_score_rejects_foreign_package():
    package = make_package()
    with pytest.raises(ValueError, match="package"):
        score(package, EvalResponse("other", {"r0": (0,)}))
    with pytest.raises(ValueError, match="not in package"):
        score(package, EvalResponse(package.package_id, {"ghost": (0,)}))
    with pytest.raises(ValueError, match="answers no items"):
        score(package, EvalResponse(package.package_id, {}))


def test_sixty_one_of_hundred_scores_exactly():
    package = make_package(count=100, n=8, seed=61)
    correct = {it.record_id for it in package.items[:61]}
    report = score(package, select_all(package, correct))
    assert report.overall_rate == 0.61
    assert report.answered == 100
    assert report.agreeing == 61


def test_package_json_roundtrip(tmp_path):
    package = make_package(count=12, n=6, seed=2)
    path = tmp_path / "package.json"
    humaneval.write_package(package, path)
    assert humaneval.read_package(path) == package


def test_package_json_is_strict(tmp_path):
    package = make_package(count=2)
    path = tmp_path / "package.json"
    humaneval.write_package(package, path)
    doc = json.loads(path.read_text())

    doc["surprise"] = 1
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="unexpected"):
        humaneval.read_package(path)

    del doc["surprise"], doc["seed"]
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="missing"):
        humaneval.read_package(path)

    path.write_text("{broken")
    with pytest.raises(SchemaError, match="invalid JSON"):
        humaneval.read_package(path)


def test_package_json_rejects_unknown_generator(tmp_path):
    package = make_package(count=2)
    path = tmp_path / "package.json"
    humaneval.write_package(package, path)
    doc = json.loads(path.read_text())
    doc["generator"] = "dice"
    path.write_text(json.dumps(doc))
    with pytest.raises(SchemaError, match="generator"):
        humaneval.read_package(path)


def test_responses_csv_roundtrip(tmp_path):
    response = EvalResponse("pkg", {"a": (0,), "b": (1, 3)})
    path = tmp_path / "responses.csv"
    humaneval.write_responses_csv(response, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "package_id,record_id,selected_indices"
    assert lines[2] == "pkg,b,1;3"
    assert humaneval.read_responses_csv(path) == response


@pytest.mark.parametrize("body,match", [
    ("pkg,a,0\npkg2,b,1", "mixed package ids"),
    ("pkg,a,0\npkg,a,1", "duplicate record"),
    ("pkg,a,zero", "bad selection list"),
    ("pkg,a,9", "out of range"),
    ("", "no response rows"),
])
def test_responses_csv_rejects(tmp_path, body, match):
    path = tmp_path / "responses.csv"
    path.write_text("package_id,record_id,selected_indices\n" + body + "\n"
                    if body else "package_id,record_id,selected_indices\n")
    with pytest.raises(SchemaError, match=match):
        humaneval.read_responses_csv(path)


def test_agreement_csv_layout(tmp_path):
    package = make_package(count=8, n=8)
    correct = {it.record_id for it in package.items[:4]}
    report = score(package, select_all(package, correct))
    path = tmp_path / "agreement.csv"
    humaneval.write_agreement_csv(report, package, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "scope,texture_id,texture_name,answered,agreeing,rate"
    assert lines[1] == "overall,,,8,4,0.5"
    assert all(line.startswith("texture,") for line in lines[2:])


def test_uniform_guessing_is_deterministic():
    package = make_package(count=30, n=8, seed=5)
    a = simulate_uniform_responses(package, seed=1)
    b = simulate_uniform_responses(package, seed=1)
    assert a == b
    assert all(len(sel) == 1 for sel in a.selections.values())
