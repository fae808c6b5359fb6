"""Preset catalog, end-to-end determinism, CLI contract."""

import json
import os
from dataclasses import replace

import numpy as np
import pytest

from sqzbeat.cli import main
from sqzbeat.config import (
    ConfigError,
    DetectorConfig,
    config_hash,
    from_dict,
    list_presets,
    merge_config,
    preset_config,
    to_dict,
    validate_config,
)
from sqzbeat.runner import run, run_preset

EXPECTED_PRESETS = {
    "fig3-raw",
    "fig4-demod",
    "appendixD-no-cross",
    "appendixG-straightforward",
    "epr-identity",
    "appendixE-pump-sweep",
    "vacuum-selftest",
}


def test_preset_catalog_complete():
    names = {name for name, _ in list_presets()}
    assert EXPECTED_PRESETS <= names
    for name, desc in list_presets():
        assert desc.strip()


def test_every_preset_expands_to_a_valid_config():
    for name in EXPECTED_PRESETS:
        validate_config(preset_config(name))


def test_unknown_preset_rejected():
    with pytest.raises(ConfigError):
        preset_config("nope")


def test_config_roundtrip_and_hash():
    cfg = preset_config("fig3-raw")
    again = from_dict(json.loads(json.dumps(to_dict(cfg))))
    assert again == cfg
    assert config_hash(again) == config_hash(cfg)
    assert config_hash(replace(cfg, seed=cfg.seed + 1)) != config_hash(cfg)


def test_from_dict_reports_field_paths():
    data = to_dict(preset_config("fig3-raw"))
    data["grid"]["n_samples"] = 15
    with pytest.raises(ConfigError) as err:
        validate_config(from_dict(data))
    assert "grid.n_samples" in str(err.value)
    data = to_dict(preset_config("fig3-raw"))
    data["pickoff1"]["reflectivity"] = 0.0
    with pytest.raises(ConfigError) as err:
        validate_config(from_dict(data))
    assert "pickoff1.reflectivity" in str(err.value)
    with pytest.raises(ConfigError) as err:
        from_dict({"grid": {"bogus": 1}})
    assert "grid.bogus" in str(err.value)


def test_merge_config_patches_sections():
    cfg = preset_config("fig4-demod")
    patched = merge_config(cfg, {"grid": {"frames": 44}, "seed": 9})
    assert patched.grid.frames == 44
    assert patched.seed == 9
    assert patched.measurement == cfg.measurement


def _read_outputs(out_dir):
    blobs = {}
    for name in sorted(os.listdir(out_dir)):
        with open(os.path.join(out_dir, name), "rb") as fh:
            blobs[name] = fh.read()
    return blobs


def test_byte_identical_reruns_and_worker_invariance(tmp_path):
    frames = 48
    a = tmp_path / "a"
    b = tmp_path / "b"
    c = tmp_path / "c"
    run_preset("vacuum-selftest", frames=frames, out_dir=str(a), workers=1)
    run_preset("vacuum-selftest", frames=frames, out_dir=str(b), workers=1)
    run_preset("vacuum-selftest", frames=frames, out_dir=str(c), workers=2)
    blobs_a = _read_outputs(a)
    assert set(blobs_a) == {
        "processed_reference.txt",
        "processed_target.txt",
        "spectrum_background.txt",
        "spectrum_reference.txt",
        "spectrum_target.txt",
        "summary.txt",
    }
    assert blobs_a == _read_outputs(b)
    assert blobs_a == _read_outputs(c)


def test_worker_env_override(tmp_path, monkeypatch):
    frames = 32
    a = tmp_path / "a"
    b = tmp_path / "b"
    run_preset("vacuum-selftest", frames=frames, out_dir=str(a), workers=1)
    monkeypatch.setenv("SQZBEAT_WORKERS", "2")
    run_preset("vacuum-selftest", frames=frames, out_dir=str(b))
    assert _read_outputs(a) == _read_outputs(b)


def test_summary_records_effective_config_hash():
    cfg = preset_config("vacuum-selftest")
    summary = run(cfg, frames=25, seed=5, write_outputs=False)
    assert summary.config_hash == config_hash(replace(cfg, grid=replace(cfg.grid, frames=25), seed=5))
    assert summary.frames == 25
    assert summary.seed == 5


def test_reduced_frame_run_consistent_with_larger_run():
    small = run_preset("vacuum-selftest", frames=150, write_outputs=False)
    large = run_preset("vacuum-selftest", frames=500, write_outputs=False)
    for bs, bl in zip(small.bands, large.bands):
        combined = np.hypot(bs.stderr_db, bl.stderr_db)
        assert abs(bs.reduction_db - bl.reduction_db) < 3.5 * combined


def test_epr_preset_summary():
    summary = run_preset("epr-identity", write_outputs=False)
    assert summary.extras["epr.pass"] == "true"
    assert float(summary.extras["epr.max_residual"]) <= 1e-9


def test_opo_sweep_outputs(tmp_path):
    summary = run_preset(
        "appendixE-pump-sweep", frames=120, out_dir=str(tmp_path), workers=1
    )
    assert summary.extras["opo.monotone_improvement"] == "true"
    for power in (50, 100, 200, 300):
        tag = f"pump{power:03d}mw"
        mc = float(summary.extras[f"opo.{tag}.band_avg_squeezed_db"])
        model = float(summary.extras[f"opo.{tag}.model_squeezed_db"])
        assert abs(mc - model) < 0.35
        assert (tmp_path / f"{tag}_squeezed.txt").exists()
        assert (tmp_path / f"{tag}_antisqueezed.txt").exists()


def test_spectrum_files_have_headers(tmp_path):
    run_preset("vacuum-selftest", frames=30, out_dir=str(tmp_path))
    text = (tmp_path / "spectrum_reference.txt").read_text().splitlines()
    assert text[0].startswith("# config_hash=")
    assert any(line.startswith("# frames=") for line in text[:6])
    header_end = next(i for i, line in enumerate(text) if not line.startswith("#"))
    assert text[header_end] == "freq_hz,psd_db_rel_vacuum"
    first = text[header_end + 1].split(",")
    assert len(first) == 2


def test_cli_list_presets(capsys):
    assert main(["list-presets"]) == 0
    out = capsys.readouterr().out
    for name in EXPECTED_PRESETS:
        assert name in out


def test_cli_run_and_validate(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main([
        "run", "--preset", "vacuum-selftest", "--frames", "20", "--out", str(out), "--seed", "3",
    ])
    assert rc == 0
    stdout = capsys.readouterr().out
    assert "band.lower.reduction_db=" in stdout
    assert (out / "summary.txt").exists()

    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(to_dict(preset_config("vacuum-selftest"))))
    assert main(["validate", "--config", str(cfg_path)]) == 0

    bad = to_dict(preset_config("vacuum-selftest"))
    bad["scheme"] = "sideways"
    cfg_path.write_text(json.dumps(bad))
    assert main(["validate", "--config", str(cfg_path)]) == 2


def test_cli_config_patch_over_preset(tmp_path):
    cfg_path = tmp_path / "patch.json"
    cfg_path.write_text(json.dumps({"grid": {"frames": 18}}))
    rc = main([
        "run", "--preset", "vacuum-selftest", "--config", str(cfg_path),
        "--out", str(tmp_path / "o"),
    ])
    assert rc == 0
    lines = (tmp_path / "o" / "summary.txt").read_text()
    assert "frames=18" in lines


def test_cli_errors():
    assert main(["run"]) == 2  # neither preset nor config
    assert main(["run", "--preset", "nope"]) == 2
    assert main(["validate", "--config", "/does/not/exist.json"]) == 2


def test_cli_degenerate_subtraction_exit_code(tmp_path):
    cfg = replace(
        preset_config("vacuum-selftest"),
        detector=DetectorConfig(quantum_efficiency=0.99, electronic_noise_rel_db=20.0),
        grid=replace(preset_config("vacuum-selftest").grid, frames=25),
        seed=40,
    )
    cfg_path = tmp_path / "degenerate.json"
    cfg_path.write_text(json.dumps(to_dict(cfg)))
    assert main(["run", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 3
