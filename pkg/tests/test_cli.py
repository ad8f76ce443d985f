import json

import pytest

from flagflows.cli import main


def run(tmp_path, *args):
    return main(["--outdir", str(tmp_path)] + list(args))


def load_summary(tmp_path, name):
    return json.loads((tmp_path / f"{name}_summary.json").read_text())


def test_build_rep_writes_artifact_and_summary(tmp_path):
    assert run(tmp_path, "build-rep") == 0
    assert (tmp_path / "rep.json").exists()
    summary = load_summary(tmp_path, "build_rep")
    assert summary["n"] == 3
    assert summary["relator_distance"] < 1e-8


def test_sample_curve_writes_csv(tmp_path):
    assert run(tmp_path, "sample-curve") == 0
    lines = (tmp_path / "curve.csv").read_text().splitlines()
    assert lines[0] == "theta,chart_x,chart_y"
    assert len(lines) == load_summary(tmp_path, "sample_curve")["num_samples"] + 1


def test_frenet_check_passes_on_default_config(tmp_path):
    assert run(tmp_path, "frenet-check") == 0
    assert load_summary(tmp_path, "frenet_check")["passed"] is True


def test_dev_image_csv_has_documented_columns(tmp_path):
    assert run(tmp_path, "dev-image", "--map", "tr", "--num", "8") == 0
    header = (tmp_path / "dev_image.csv").read_text().splitlines()[0]
    assert header == "y,p0,p1,p2,line0,line1,line2"
    assert run(tmp_path, "dev-image", "--map", "alpha:1,3", "--num", "4") == 0
    header = (tmp_path / "dev_image.csv").read_text().splitlines()[0]
    assert header == "y,p0,p1,p2"


def test_flow_reports_period_matching_root_length(tmp_path):
    assert run(tmp_path, "flow", "--alpha", "2,3", "--word", "a1 b1",
               "--t-max", "1", "--steps", "4") == 0
    summary = load_summary(tmp_path, "flow")
    assert summary["rel_error"] < 1e-8
    orbit = (tmp_path / "flow_orbit.csv").read_text().splitlines()
    assert orbit[0] == "t,y,p0,p1,p2"
    assert len(orbit) == 6


def test_periods_at_small_depth(tmp_path):
    assert run(tmp_path, "periods", "--alpha", "2,3", "--max-len", "2") == 0
    summary = load_summary(tmp_path, "periods")
    assert summary["passed"] is True
    assert summary["worst_rel_error"] < 1e-6


def test_render_emits_svg(tmp_path):
    assert run(tmp_path, "render", "--figure", "boundary") == 0
    svg = (tmp_path / "boundary.svg").read_text()
    assert svg.startswith("<svg") and svg.endswith("</svg>")


def test_module_errors_become_structured_json(tmp_path, capsys):
    code = run(tmp_path, "dev-image", "--map", "bogus")
    assert code == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["subcommand"] == "dev-image"
    assert "bogus" in err["error"]["message"]


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"schema_version": 1, "bulge": 0.3, "word_ball": 3}))
    assert main(["--config", str(cfg), "--outdir", str(tmp_path), "build-rep"]) == 0
    assert load_summary(tmp_path, "build_rep")["bulge"] == 0.3


def test_unsupported_schema_version_is_rejected(tmp_path, capsys):
    cfg = tmp_path / "config.json"
    cfg.write_text(json.dumps({"schema_version": 99}))
    assert main(["--config", str(cfg), "--outdir", str(tmp_path), "build-rep"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert "schema" in err["error"]["message"]


def test_decay_on_default_config(tmp_path):
    assert run(tmp_path, "decay", "--t-max", "4", "--steps", "12") == 0
    summary = load_summary(tmp_path, "decay")
    assert abs(summary["slope"] + 1.0) < 0.05
