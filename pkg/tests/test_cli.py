import json

import pytest

from anyonsim.cli import EXIT_CONFIG, EXIT_OK, main


def run(tmp_path, *args, name="out"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def test_braid_fig3_both_engines(tmp_path, capsys):
    code, out = run(tmp_path, "braid", "--experiment", "fig3", "--variant", "em", "--engine", "both")
    assert code == EXIT_OK
    report = json.loads((out / "report.json").read_text())
    assert report["stabilizer"]["phase_ratio"] == [-1.0, 0.0]
    assert report["dense"]["phase_ratio"][0] == pytest.approx(-1, abs=1e-10)
    assert report["stabilizer"]["matches_prediction"]
    for f in ("protocol.json", "syndrome.json", "diagram.svg"):
        assert (out / f).exists()


def test_braid_fig4_reports_two_flips(tmp_path):
    code, out = run(tmp_path, "braid", "--experiment", "fig4", "--central-m", "true")
    assert code == EXIT_OK
    syn = json.loads((out / "syndrome.json").read_text())
    assert len(syn["flipped"]) == 2
    code, out = run(tmp_path, "braid", "--experiment", "fig4", "--central-m", "false", name="vac")
    assert json.loads((out / "syndrome.json").read_text())["flipped"] == []


def test_reruns_are_byte_identical(tmp_path):
    _, a = run(tmp_path, "correlate", "--shots", "500", "--seed", "4", name="a")
    _, b = run(tmp_path, "correlate", "--shots", "500", "--seed", "4", name="b")
    for f in ("correlate.json", "correlate.csv"):
        assert (a / f).read_bytes() == (b / f).read_bytes()
    _, c = run(tmp_path, "braid", name="c")
    _, d = run(tmp_path, "braid", name="d")
    for f in ("protocol.json", "syndrome.json", "diagram.svg", "report.json"):
        assert (c / f).read_bytes() == (d / f).read_bytes()


def test_correlate_single_shot_has_no_verdict(tmp_path):
    code, out = run(tmp_path, "correlate", "--shots", "1")
    report = json.loads((out / "correlate.json").read_text())
    assert code == EXIT_OK
    assert report["sign_flip_verdict"] is None and report["warnings"]


def test_correlate_vanishing_correlators_give_no_verdict(tmp_path):
    code, out = run(tmp_path, "correlate", "--jx", "0", "--jy", "0")
    report = json.loads((out / "correlate.json").read_text())
    assert code == EXIT_OK and report["sign_flip_verdict"] is None
    assert any("vanish" in w for w in report["warnings"])
    assert report["bases"]["XX"]["exact_sign_flip"]


def test_budget(tmp_path):
    code, out = run(tmp_path, "budget")
    assert code == EXIT_OK
    b = json.loads((out / "budget.json").read_text())
    assert b["n_ops"] == 60
    assert "focused-laser total" in (out / "budget.txt").read_text()
    code, out = run(tmp_path, "budget", "--n-ops", "0", name="zero")
    assert json.loads((out / "budget.json").read_text())["focused_total"] == 0


def test_oracle_command(tmp_path):
    code, out = run(tmp_path, "oracle", "--count", "10")
    assert code == EXIT_OK
    assert json.loads((out / "oracle.json").read_text())["passed"]


@pytest.mark.parametrize("args", [
    ["braid", "--engine", "dense"],                      # 6x6 exceeds the dense cap
    ["oracle", "--lattice", "6x6"],
    ["braid", "--lattice", "3x2", "--boundary", "torus"],
    ["braid", "--lattice", "2x2"],                          # too small for the loop
    ["braid", "--lattice", "banana"],
    ["correlate", "--shots", "0"],
    ["budget", "--n-ops", "-1"],
])
def test_config_errors(tmp_path, args, capsys):
    code, _ = run(tmp_path, *args)
    assert code == EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"schema": 1, "experiment": "fig3", "variant": "ee", "seed": 3}))
    code, out = run(tmp_path, "braid", "--config", str(cfg), "--engine", "both")
    report = json.loads((out / "report.json").read_text())
    assert code == EXIT_OK and report["experiment"] == "fig3-EE"
    # EE relative to EM is also -1.
    assert report["stabilizer"]["phase_ratio"] == [-1.0, 0.0]
    code, out = run(tmp_path, "braid", "--config", str(cfg), "--variant", "em", name="o")
    assert json.loads((out / "report.json").read_text())["experiment"] == "fig3-EM"
    cfg.write_text(json.dumps({"schema": 1, "bogus": 1}))
    assert run(tmp_path, "braid", "--config", str(cfg))[0] == EXIT_CONFIG
    cfg.write_text(json.dumps({"schema": 2}))
    assert run(tmp_path, "braid", "--config", str(cfg))[0] == EXIT_CONFIG


def test_custom_protocol(tmp_path):
    cfg = tmp_path / "c.json"
    pulses = [{"op": "+1 Z14", "angle": "pi"}]
    cfg.write_text(json.dumps({"schema": 1, "experiment": "custom", "protocol": pulses}))
    code, out = run(tmp_path, "braid", "--config", str(cfg))
    assert code == EXIT_OK
    assert len(json.loads((out / "syndrome.json").read_text())["flipped"]) == 2
