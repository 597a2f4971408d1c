import csv
import json
import logging
import math

import numpy as np
import pytest

from qboson import cli
from qboson import hamiltonians as ham
from qboson import scattering as sc
from qboson.qnum import QContext
from qboson.spectral import SpectralFn, fourier_tilde_inverse


def config(*argv):
    return cli.resolve(cli.build_parser().parse_args(list(argv)))


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_verify_default_passes(tmp_path):
    out = tmp_path / "verify"
    assert cli.main(["verify", "--trials", "10", "--out", str(out)]) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"] and report["schema_version"] == 1
    assert report["config"]["n"] == 3
    assert all(c["failures"] == 0 for c in report["checks"])


def test_verify_one_particle(tmp_path):
    assert cli.main(["verify", "--n", "1", "--trials", "5", "--out", str(tmp_path / "v1")]) == 0


def test_verify_reports_corrupted_coefficient(tmp_path, caplog):
    def bad_v(ctx, lam, J):
        value = ham.v_coeff(ctx, lam, J)
        return value * 2 if len(set(lam)) < len(lam) else value

    cfg = config("verify", "--n", "2", "--trials", "10", "--out", str(tmp_path / "bad"))
    with caplog.at_level(logging.ERROR, logger="qboson"):
        assert cli.cmd_verify(cfg, v=bad_v) == 1
    report = json.loads((tmp_path / "bad.json").read_text())
    failed = [c for c in report["checks"] if c["failures"]]
    assert failed and all(c["name"].startswith("oracle") for c in failed)
    witness = failed[0]["witness"]
    assert {"lambda", "J"} <= set(witness)
    assert "lambda" in caplog.text


def test_orthogonality_targets(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["orthogonality", "--out", str(out)]) == 0
    rep = json.loads((tmp_path / "o.json").read_text())
    assert rep["target"] == "3/2"
    assert [r["order"] for r in rep["ladder"]] == [16, 24, 32, 48]
    assert rep["checks"]["ladder_monotone"]

    assert cli.main(["orthogonality", "--lam", "1,0", "--mu", "0,0", "--out", str(out)]) == 0
    rep = json.loads((tmp_path / "o.json").read_text())
    assert rep["target"] == "0" and rep["abs_error"] < 1e-2

    assert cli.main(["orthogonality", "--n", "1", "--lam", "3", "--quad-order", "16", "--out", str(out)]) == 0
    rep = json.loads((tmp_path / "o.json").read_text())
    assert rep["target"] == "1" and rep["abs_error"] < 1e-10


def test_ladder_monotone_rule():
    assert cli.ladder_monotone([1e-2, 1e-3, 1.05e-3, 0])
    assert not cli.ladder_monotone([1e-3, 2e-3])


def test_config_file_merge(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n": 1, "q": "0.25", "quad-order": 20}))
    cfg = config("orthogonality", "--config", str(path), "--quad-order", "24")
    assert cfg.n == 1 and cfg.q == "0.25" and cfg.quad_order == 24
    assert cfg.lam is None
    path.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["orthogonality", "--config", str(path)]) == 2


@pytest.mark.parametrize("argv", [
    ["verify", "--q", "3/2"],
    ["verify", "--q", "0"],
    ["verify", "--window", "2:1"],
    ["verify", "--q", "x"],
    ["verify", "--window", "abc"],
    ["orthogonality", "--lam", "1,0,0"],
    ["orthogonality", "--quad-order", "2"],
])
def test_invalid_configs_exit_2(argv):
    assert cli.main(argv) == 2


def test_mode_routing():
    assert cli.make_context("1/2", None).mode == "exact"
    assert cli.make_context("0.5", None).mode == "float"
    assert cli.make_context("1/2", "float").mode == "float"


def test_scatter_runs_are_byte_identical(tmp_path):
    argv = ["scatter", "--quad-order", "128", "--time-list=-5,5"]
    assert cli.main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert cli.main(argv + ["--out", str(tmp_path / "b")]) == 0
    for suffix in (".csv", ".json"):
        assert (tmp_path / f"a{suffix}").read_bytes() == (tmp_path / f"b{suffix}").read_bytes()
    rows = read_csv(tmp_path / "a.csv")
    assert list(rows[0]) == sc.SCAN_COLUMNS
    assert [float(r["t"]) for r in rows] == [-5.0, 5.0]
    manifest = json.loads((tmp_path / "a.json").read_text())
    assert manifest["packet"]["order"] == 128 and manifest["passed"]


def test_scatter_one_particle_is_trivial(tmp_path):
    assert cli.main(["scatter", "--n", "1", "--quad-order", "128", "--time-list=-10,0,10",
                     "--out", str(tmp_path / "s")]) == 0
    for row in read_csv(tmp_path / "s.csv"):
        assert float(row["norm_fplus_minus_f0"]) < 1e-10
        assert float(row["norm_fminus_minus_f0"]) < 1e-10
        assert abs(float(row["norm_fpm"]) - 1) < 5e-3


def test_scatter_rejects_bad_packet(caplog):
    with caplog.at_level(logging.ERROR, logger="qboson"):
        code = cli.main(["scatter", "--quad-order", "64", "--packet-center", "2.0,1.1415926",
                         "--packet-width", "0.3"])
    assert code == 2
    assert "[" in caplog.text


def test_evolve_outputs(tmp_path):
    out = tmp_path / "e"
    assert cli.main(["evolve", "--quad-order", "128", "--time-list", "0,5", "--out", str(out)]) == 0
    rows = read_csv(tmp_path / "e.csv")
    assert all(abs(float(r["norm"]) - 1) < 5e-3 for r in rows)
    manifest = json.loads((tmp_path / "e.json").read_text())
    snap = manifest["snapshots"][0]
    assert snap["t"] == 0
    # t = 0 snapshot is the inverse transform of the profile
    packet = sc.reference_packet(2, 1, 128)
    ctx = QContext(0.5, "float")
    support = [tuple(rec["weight"]) for rec in snap["state"]][:40]
    direct = fourier_tilde_inverse(ctx, SpectralFn(packet.grid, packet.values.astype(complex)), support)
    got = {tuple(rec["weight"]): complex(rec["re"], rec["im"]) for rec in snap["state"]}
    assert max(abs(got[lam] - direct[lam]) for lam in support) < 1e-10


def test_evolve_truncation_warning(tmp_path, caplog):
    with caplog.at_level(logging.WARNING, logger="qboson"):
        cli.main(["evolve", "--quad-order", "128", "--time-list", "5", "--window=-2:2",
                  "--out", str(tmp_path / "t")])
    assert "leaves the window" in caplog.text and "tail" in caplog.text


def test_small_q_evolution_matches_phase_model():
    packet = sc.reference_packet(2, 1, 128)
    a = sc.evolve_packet(QContext(1e-12, "float"), packet, 5.0)
    b = sc.evolve_packet(None, packet, 5.0)
    assert np.max(np.abs(a.values - b.values)) < 1e-9


def test_stdout_output(capsys):
    assert cli.main(["scatter", "--n", "1", "--quad-order", "64", "--time-list", "1"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == ",".join(sc.SCAN_COLUMNS)
