import json
import os

import pytest

from twirl import cli

ODD_CFG = """[field]
p = 5
e = 1
eisenstein = -5,1
precision = 18

[pipeline]
regime = odd
k_max = 3
gamma_depth = 2
unit_depth = 2
workers = 1

[output]
format = json

[selftest]
seed = 7
"""

EVEN_CFG = ODD_CFG.replace("p = 5", "p = 2").replace("e = 1", "e = 2") \
    .replace("eisenstein = -5,1", "eisenstein = -2,0,1") \
    .replace("regime = odd", "regime = even")


@pytest.fixture
def odd_cfg(tmp_path):
    p = tmp_path / "odd.ini"
    p.write_text(ODD_CFG)
    return str(p)


@pytest.fixture
def even_cfg(tmp_path):
    p = tmp_path / "even.ini"
    p.write_text(EVEN_CFG)
    return str(p)


def test_wfactor_csv(odd_cfg, tmp_path):
    out = tmp_path / "w.csv"
    assert cli.main(["wfactor", "--config", odd_cfg, "--out", str(out),
                     "--count", "8"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "k,delta_vector,closed,oracle,match"
    assert all(line.split(",")[-1] == "1" for line in lines[1:])
    # the pinned k < 0 row has volume 0
    assert lines[-1].split(",")[2] == "0"


def test_dtwist_json(odd_cfg, tmp_path):
    out = tmp_path / "d.json"
    assert cli.main(["dtwist", "--config", odd_cfg, "--alpha", "2",
                     "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["kernel_dim"] == 1
    assert rep["regular"] is True


def test_support_scan_json(odd_cfg, tmp_path):
    out = tmp_path / "s.json"
    assert cli.main(["support-scan", "--config", odd_cfg, "--alpha", "pi",
                     "--depth", "6", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["witness"] is None
    assert rep["regime"] == "alpha-noncompact"
    assert rep["strata_searched"]


def test_psik_csv(even_cfg, tmp_path):
    out = tmp_path / "p.csv"
    assert cli.main(["psik", "--config", even_cfg, "--alpha", "1+pi^2",
                     "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("k,coord0")
    assert len(lines) == 5  # header + k = 0..3


def test_coeffs_and_rg(odd_cfg, tmp_path):
    out = tmp_path / "c.json"
    assert cli.main(["coeffs", "--config", odd_cfg, "--out", str(out)]) == 0
    table = json.loads(out.read_text())
    assert table["metadata"]["q"] == 5
    out2 = tmp_path / "rg.json"
    assert cli.main(["rg-term", "--config", odd_cfg, "--out", str(out2)]) == 0
    rg = json.loads(out2.read_text())
    assert rg["unit_square_classes"] == 2


def test_residue_report_even(even_cfg, tmp_path):
    out = tmp_path / "r.json"
    assert cli.main(["residue", "--config", even_cfg, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["checks"]["re_expansion_exact"] is True
    assert "weight_only_constants" in rep
    a = rep["weight_only_constants"]["A"]
    assert json.loads('"%s"' % a)  # string fraction present
    assert rep["metadata"]["additive_character"].startswith("zeta_p")


def test_bad_config_exit_code(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text(ODD_CFG.replace("regime = odd", "regime = even"))
    assert cli.main(["coeffs", "--config", str(p)]) == 1


def test_output_dir_override(odd_cfg, tmp_path, monkeypatch):
    outdir = tmp_path / "outs"
    outdir.mkdir()
    monkeypatch.setenv("TWIRL_OUTPUT_DIR", str(outdir))
    cfg_text = ODD_CFG.replace("format = json", "format = json\npath = result.json")
    p = tmp_path / "cfg2.ini"
    p.write_text(cfg_text)
    assert cli.main(["dtwist", "--config", str(p), "--alpha", "2"]) == 0
    assert (outdir / "result.json").exists()
