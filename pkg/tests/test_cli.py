"""End-to-end CLI tests: subcommand output, exit codes, config layering,
and determinism of the file artifacts."""

import csv
import dataclasses
import json
import shutil
import subprocess

import pytest

from zchurst import synthesize, zc_estimate
from zchurst.cli import build_parser, main, parse_config, resolve_settings
from zchurst.errors import InputError
from zchurst.harness import FIGURE3_SUMMARY_COLUMNS, VARIANCE_TABLE_COLUMNS

from benchmarks import TABLE1_H_GRID, TABLE1_K_EPS_01, TABLE1_K_EPS_001


def _write_series(path, values):
    path.write_text("\n".join(repr(float(v)) for v in values) + "\n")


@pytest.fixture
def series_file(tmp_path):
    path = synthesize(0.6, 300, seed=11)
    f = tmp_path / "series.txt"
    _write_series(f, path.levels)
    return f, path.levels


def test_estimate_text_output(series_file, capsys):
    f, values = series_file
    assert main(["estimate", str(f)]) == 0
    out = capsys.readouterr().out
    got = dict(line.split(": ", 1) for line in out.strip().split("\n"))
    expected = zc_estimate(values)
    assert got["method"] == "ZC"
    assert float(got["h_hat"]) == expected.h_hat
    assert float(got["ci_low"]) == expected.ci_low
    assert int(got["n"]) == expected.n


def test_estimate_json_matches_library(series_file, capsys):
    f, values = series_file
    assert main(["estimate", str(f), "--json"]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed == dataclasses.asdict(zc_estimate(values))


def test_estimate_heaf_degenerate_json(tmp_path, capsys):
    f = tmp_path / "flat.txt"
    _write_series(f, [3.0] * 40)
    assert main(["estimate", str(f), "--method", "heaf", "--json"]) == 0
    parsed = json.loads(capsys.readouterr().out)
    assert parsed["method"] == "HEAF"
    assert parsed["degenerate"] is True
    assert parsed["h_hat"] == 1.0
    assert parsed["ci_low"] is None


def test_exit_code_2_on_bad_input(tmp_path, capsys):
    assert main(["estimate", str(tmp_path / "nope.txt")]) == 2
    assert capsys.readouterr().err.startswith("error:")

    bad = tmp_path / "bad.txt"
    bad.write_text("1.0\nabc\n")
    assert main(["estimate", str(bad)]) == 2

    cfg = tmp_path / "bad.cfg"
    cfg.write_text("quod_nodes=16\n")
    assert main(["estimate", str(bad), "--config", str(cfg)]) == 2

    assert main(["variance-table", "--h", "0.5,x", "--n", "16"]) == 2
    # out-of-domain H is an input problem, not a crash
    assert main(["variance-table", "--h", "1.2", "--n", "16"]) == 2


def test_exit_code_3_on_numerical_failure(capsys):
    # an absolute tolerance below representable differences can only be met
    # by bitwise-identical node doublings, which this cell never produces
    code = main(
        [
            "variance-table",
            "--h",
            "0.61",
            "--n",
            "64",
            "--quad-nodes",
            "8",
            "--quad-abs-tol",
            "1e-300",
        ]
    )
    assert code == 3
    assert capsys.readouterr().err.startswith("numerical failure:")


def test_config_file_parsing(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "quad_nodes=16\n"
        "taylor_eps = 0.5  # inline comment\n"
        "\n"
        "proxy_grid_step=0.05\n"
    )
    assert parse_config(str(cfg)) == {
        "quad_nodes": 16,
        "taylor_eps": 0.5,
        "proxy_grid_step": 0.05,
    }
    cfg.write_text("just a line\n")
    with pytest.raises(InputError):
        parse_config(str(cfg))
    cfg.write_text("quad_nodes=abc\n")
    with pytest.raises(InputError):
        parse_config(str(cfg))


def test_settings_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("quad_nodes=16\ntaylor_eps=0.5\n")
    args = build_parser().parse_args(
        [
            "variance-table",
            "--h",
            "0.5",
            "--n",
            "16",
            "--config",
            str(cfg),
            "--quad-nodes",
            "32",
        ]
    )
    settings = resolve_settings(args)
    # flag beats config beats default
    assert settings.quad_nodes == 32
    assert settings.taylor_eps == 0.5
    assert settings.n_tilde_cap == 250


def test_variance_table_stdout(capsys):
    assert main(["variance-table", "--h", "0.6 0.8", "--n", "32,64"]) == 0
    lines = capsys.readouterr().out.split("\n")
    assert lines[0] == ",".join(VARIANCE_TABLE_COLUMNS)
    assert lines[-1] == ""
    rows = list(csv.DictReader(lines[:-1]))
    assert len(rows) == 4
    by_key = {(float(row["h"]), int(row["n"])): row for row in rows}
    # the asymptotic law only exists from three quarters up
    assert by_key[(0.6, 32)]["var_c_asymptotic"] == ""
    assert float(by_key[(0.8, 64)]["var_c_asymptotic"]) > 0.0


def test_figure1_stdout(capsys):
    assert main(["figure1", "--figure1-grid-step", "0.1"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    # header plus 11 grid points for each of the three default lengths
    assert len(lines) == 1 + 3 * 11


def test_figure3_stdout_and_files(tmp_path, capsys):
    argv = [
        "figure3",
        "--h",
        "0.5",
        "--n",
        "128",
        "--replications",
        "1000",
        "--seed",
        "3",
        "--proxy-grid-step",
        "0.1",
    ]
    assert main(argv) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == ",".join(FIGURE3_SUMMARY_COLUMNS)
    assert len(lines) == 2
    out_dir = tmp_path / "fig3"
    assert main(argv + ["--out", str(out_dir)]) == 0
    summary = (out_dir / "figure3_summary.csv").read_text()
    samples = (out_dir / "figure3_samples.csv").read_text()
    assert summary.split("\n")[1] == lines[1]
    assert len(samples.strip().split("\n")) == 1 + 1000


def test_reproduce_table1_file(tmp_path):
    out_dir = tmp_path / "t1"
    assert main(["reproduce", "--table", "1", "--out", str(out_dir)]) == 0
    with open(out_dir / "table1.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 20
    got = {(float(r["h"]), float(r["eps"])): int(r["k"]) for r in rows}
    for h, k01, k001 in zip(TABLE1_H_GRID, TABLE1_K_EPS_01, TABLE1_K_EPS_001):
        assert got[(h, 0.01)] == k01
        assert got[(h, 0.001)] == k001
    assert all(r["capped"] == "false" for r in rows)


def test_reproduce_table3_deterministic_across_workers(tmp_path):
    base = [
        "reproduce",
        "--table",
        "3",
        "--replications",
        "2",
        "--seed",
        "5",
    ]
    d1 = tmp_path / "w1"
    d2 = tmp_path / "w2"
    assert main(base + ["--out", str(d1)]) == 0
    assert main(base + ["--workers", "2", "--out", str(d2)]) == 0
    assert (d1 / "table3.csv").read_bytes() == (d2 / "table3.csv").read_bytes()


def test_console_script_installed(series_file):
    f, _ = series_file
    exe = shutil.which("zchurst")
    assert exe, "console script not on PATH"
    proc = subprocess.run(
        [exe, "estimate", str(f), "--json"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["method"] == "ZC"
