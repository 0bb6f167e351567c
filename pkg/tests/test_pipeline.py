"""Config resolution, batch orchestration, manifests, and the CLI."""
from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np
import pytest

from brepscan import fixtures
from brepscan.cli import main as cli_main
from brepscan.config import PipelineConfig, config_from_dict, load_config
from brepscan.errors import ConfigError
from brepscan.pipeline import (
    atomic_write,
    discover_models,
    model_seed,
    parse_chunk_range,
    run_batch,
    run_model,
    sha256_file,
    verify_manifest,
)


def _write_models(root: Path, names, chunked=False):
    for i, name in enumerate(names):
        if chunked:
            sub = root / f"chunk_{i % 2:04d}"
            sub.mkdir(exist_ok=True)
        else:
            sub = root
        cc, mesh = fixtures.box(1.0 + 0.1 * i, 1.0, 1.0)
        fixtures.write_fixture(cc, mesh, sub / f"{name}.brep.json",
                               sub / f"{name}.mesh.ply")


# ---------------------------------------------------------------------------
# Config
# ---------------------------------------------------------------------------

def test_config_defaults_valid():
    cfg = PipelineConfig()
    cfg.validate()
    assert cfg.workers == 1
    assert cfg.ply_format == "ply-binary"


def test_config_from_toml(tmp_path):
    path = tmp_path / "cfg.toml"
    path.write_text(
        "global_seed = 99\nworkers = 2\n\n"
        "[scan]\nsubdivision_iterations = 1\n\n"
        "[annot]\nalpha_e = 0.1\n\n"
        "[sketch]\nbase_segments = 16\n\n"
        "[sketch.line]\nbow_prob = 0.5\n\n"
        "[eval]\ndihedral_threshold_deg = 45.0\n"
    )
    cfg = load_config(path)
    assert cfg.global_seed == 99
    assert cfg.scan.subdivision_iterations == 1
    assert cfg.annot.alpha_e == 0.1
    assert cfg.sketch.base_segments == 16
    assert cfg.sketch.line.bow_prob == 0.5
    assert cfg.eval.dihedral_threshold_deg == 45.0


def test_config_unknown_key_rejected():
    with pytest.raises(ConfigError):
        config_from_dict({"no_such_option": 1})
    with pytest.raises(ConfigError):
        config_from_dict({"scan": {"bogus": 2}})


def test_seed_priority(monkeypatch):
    monkeypatch.delenv("A2Z_SEED", raising=False)
    assert PipelineConfig().resolved_seed(None) == 0
    monkeypatch.setenv("A2Z_SEED", "17")
    assert PipelineConfig().resolved_seed(None) == 17
    assert PipelineConfig(global_seed=5).resolved_seed(None) == 5
    assert PipelineConfig(global_seed=5).resolved_seed(9) == 9


def test_model_seed_distinct_and_stable():
    s1 = model_seed(7, "model_a")
    assert s1 == (7 ^ zlib.crc32(b"model_a")) & 0x7FFFFFFF
    assert model_seed(7, "model_a") == s1
    assert model_seed(7, "model_b") != s1
    assert 0 <= s1 < 2 ** 31


def test_parse_chunk_range():
    assert parse_chunk_range("0-3") == [0, 1, 2, 3]
    assert parse_chunk_range("0,2,5") == [0, 2, 5]
    assert parse_chunk_range("1-2,7") == [1, 2, 7]


# ---------------------------------------------------------------------------
# Discovery and atomic writes
# ---------------------------------------------------------------------------

def test_discover_flat(tmp_path):
    _write_models(tmp_path, ["a", "b"])
    models = discover_models(tmp_path)
    assert [m["model_id"] for m in models] == ["a", "b"]
    assert all(m["chunk"] == 0 for m in models)


def test_discover_chunked_with_filter(tmp_path):
    _write_models(tmp_path, ["a", "b", "c", "d"], chunked=True)
    models = discover_models(tmp_path)
    assert len(models) == 4
    only0 = discover_models(tmp_path, chunks=[0])
    assert {m["chunk"] for m in only0} == {0}
    assert len(only0) == 2


def test_discover_skips_orphan_brep(tmp_path):
    _write_models(tmp_path, ["a"])
    (tmp_path / "orphan.brep.json").write_text("{}")
    models = discover_models(tmp_path)
    assert [m["model_id"] for m in models] == ["a"]


def test_atomic_write_leaves_no_partial_file(tmp_path):
    target = tmp_path / "out.txt"

    def boom(path):
        Path(path).write_text("partial")
        raise RuntimeError("interrupted")

    with pytest.raises(RuntimeError):
        atomic_write(target, boom)
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []  # temp file cleaned up

    atomic_write(target, lambda p: Path(p).write_text("done"))
    assert target.read_text() == "done"


# ---------------------------------------------------------------------------
# Batch runs
# ---------------------------------------------------------------------------

def test_run_batch_all_outputs_and_manifests(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["m0", "m1"])
    out = tmp_path / "out"
    cfg = PipelineConfig()
    result = run_batch("all", discover_models(src), cfg, 3, out)
    assert result.exit_code == 0
    for man in result.manifests:
        assert man.error is None
        path = out / f"{man.model_id}.manifest.json"
        assert path.exists()
        assert verify_manifest(path)
    for name in ("analytics.txt", "analytics.csv", "pr_by_chunk.csv"):
        assert (out / name).exists()
    # Scan, labels, sketch, and eval artifacts all present.
    produced = {p.name for p in out.iterdir()}
    for mid in ("m0", "m1"):
        for suffix in ("scan.ply", "labeled.ply", "labels.json",
                       "sketch.json", "eval.json"):
            assert f"{mid}.{suffix}" in produced


def test_manifest_detects_corruption(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["m0"])
    out = tmp_path / "out"
    run_batch("synth-scan", discover_models(src), PipelineConfig(), 3, out)
    man_path = out / "m0.manifest.json"
    assert verify_manifest(man_path)
    scan = out / "m0.scan.ply"
    scan.write_bytes(scan.read_bytes()[:-10] + b"corruption" )
    assert not verify_manifest(man_path)


def test_partial_failure_exit_code(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["good"])
    (src / "bad.brep.json").write_text("this is not json")
    cc, mesh = fixtures.box()
    from brepscan.fixtures import write_fixture

    # Give the broken brep a mesh so discovery picks it up.
    write_fixture(cc, mesh, src / "tmp.brep.json", src / "bad.mesh.ply")
    (src / "tmp.brep.json").unlink()
    models = discover_models(src)
    assert len(models) == 2
    out = tmp_path / "out"
    result = run_batch("validate", models, PipelineConfig(), 0, out)
    assert result.exit_code == 2
    errors = {m.model_id: m.error for m in result.manifests}
    assert errors["good"] is None
    assert errors["bad"] is not None


def test_all_failures_exit_code(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    (src / "bad.brep.json").write_text("nope")
    cc, mesh = fixtures.box()
    fixtures.write_fixture(cc, mesh, src / "tmp.brep.json", src / "bad.mesh.ply")
    (src / "tmp.brep.json").unlink()
    result = run_batch("validate", discover_models(src), PipelineConfig(), 0,
                       tmp_path / "out")
    assert result.exit_code == 1


def test_model_isolation(tmp_path):
    # Per-model seeds: adding another model never changes a model's bytes.
    src_a, src_b = tmp_path / "a", tmp_path / "b"
    src_a.mkdir(), src_b.mkdir()
    _write_models(src_a, ["m0"])
    _write_models(src_b, ["m0", "extra"])
    out_a, out_b = tmp_path / "oa", tmp_path / "ob"
    run_batch("synth-scan", discover_models(src_a), PipelineConfig(), 5, out_a)
    run_batch("synth-scan", discover_models(src_b), PipelineConfig(), 5, out_b)
    assert sha256_file(out_a / "m0.scan.ply") == sha256_file(out_b / "m0.scan.ply")


def test_parallel_matches_serial(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["m0", "m1", "m2"])
    out_s, out_p = tmp_path / "serial", tmp_path / "parallel"
    run_batch("synth-scan", discover_models(src), PipelineConfig(), 1, out_s)
    cfg = PipelineConfig(workers=2)
    run_batch("synth-scan", discover_models(src), cfg, 1, out_p)
    for mid in ("m0", "m1", "m2"):
        assert sha256_file(out_s / f"{mid}.scan.ply") == \
            sha256_file(out_p / f"{mid}.scan.ply")


# ---------------------------------------------------------------------------
# CLI entry point
# ---------------------------------------------------------------------------

def test_cli_validate(tmp_path, capsys):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["m0"])
    code = cli_main(["validate", str(src), "--out", str(tmp_path / "out"),
                     "--seed", "4"])
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["models"] == 1
    assert summary["failed"] == []
    assert summary["seed"] == 4


def test_cli_empty_input_fails(tmp_path):
    empty = tmp_path / "none"
    empty.mkdir()
    assert cli_main(["validate", str(empty)]) == 1


def test_cli_bad_config_fails(tmp_path):
    src = tmp_path / "in"
    src.mkdir()
    _write_models(src, ["m0"])
    bad = tmp_path / "bad.toml"
    bad.write_text("unknown_option = true\n")
    assert cli_main(["validate", str(src), "--config", str(bad)]) == 1
