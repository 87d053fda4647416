import json
import subprocess

import pytest

from textureprobe import cli


def run_cli(args):
    return cli.main([str(a) for a in args])


def test_probe_then_downstream_validate(texture_folder, registry_path,
                                        tmp_path, capsys):
    out = tmp_path / "texture_records.jsonl"
    code = run_cli(["--model", "resnet18", "--weights", "none",
                    "--data", texture_folder, "--kind", "texture-probe",
                    "--registry", registry_path, "--out", out, "--batch", "3"])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "10 records" in stdout
    assert out.exists()
    assert json.loads(
        (tmp_path / "texture_records.jsonl.manifest.json").read_text()
    )["record_count"] == 10

    proc = subprocess.run(
        ["texturebias", "validate", "--registry", str(registry_path),
         "--texture-records", str(out)],
        capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr


def test_missing_data_folder_exits_2(registry_path, tmp_path, capsys):
    code = run_cli(["--model", "resnet18", "--data", tmp_path / "nope",
                    "--kind", "texture-probe", "--registry", registry_path,
                    "--out", tmp_path / "r.jsonl"])
    assert code == 2
    assert "not found" in capsys.readouterr().err


def test_registry_mismatch_exits_1(texture_folder, registry_path, tmp_path,
                                   capsys):
    # Default weights expect a 1000-class registry; the toy one has 7.
    code = run_cli(["--model", "resnet18", "--data", texture_folder,
                    "--kind", "texture-probe", "--registry", registry_path,
                    "--out", tmp_path / "r.jsonl"])
    assert code == 1
    assert "registry mismatch" in capsys.readouterr().err


def test_unknown_model_is_usage_error(texture_folder, registry_path,
                                      tmp_path):
    with pytest.raises(SystemExit) as exc:
        run_cli(["--model", "vgg16", "--data", texture_folder,
                 "--kind", "texture-probe", "--registry", registry_path,
                 "--out", tmp_path / "r.jsonl"])
    assert exc.value.code == 2
