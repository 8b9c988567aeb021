"""Config ingestion, experiment drivers, emitted files, exit codes."""

from __future__ import annotations

import csv
import json
import math

import numpy as np
import pytest

from ritzmem.cli import ConfigError, build_config, load_config, main, scale_inputs

GAS_KV = """\
# circular membrane under gas pressure
gamma1 = 0.02
gamma2 = -0.015
gamma3 = 0.00025
c = 1.7
family = polynomial
m = 6
"""

LIQ_JSON = {
    "gamma1": 0.1,
    "c": 0.5,
    "d": 10.0,
    "family": "adaptive",
    "m": 6,
    "n": 1,
}


def write_cfg(tmp_path, text, name="case.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    for row in data:
        assert len(row) == len(header)
    return header, np.array([[float(v) for v in row] for row in data])


def test_config_key_value_format(tmp_path):
    cfg = build_config(load_config(write_cfg(tmp_path, GAS_KV)))
    assert cfg.mat.gamma1 == 0.02
    assert cfg.mat.gamma2 == -0.015
    assert cfg.c == 1.7
    assert cfg.d == 0.0
    assert cfg.family == "polynomial"
    assert cfg.m == 6


def test_config_json_format(tmp_path):
    path = tmp_path / "case.json"
    path.write_text(json.dumps(LIQ_JSON))
    cfg = build_config(load_config(path))
    assert cfg.mat.gamma1 == 0.1
    assert cfg.c == 0.5 and cfg.d == 10.0
    assert cfg.family == "adaptive"
    assert cfg.n_p == 1


def test_config_rejects_unknown_key():
    with pytest.raises(ConfigError, match="unknown"):
        build_config({"gamma1": 0.1, "cc": 2.0})


def test_config_rejects_bad_probe():
    with pytest.raises(ConfigError, match="probe"):
        build_config({"c": 1.0, "probes": "0.2 1.5"})


def test_config_rejects_negative_d():
    with pytest.raises(ConfigError, match="d must"):
        build_config({"c": 1.0, "d": -1.0})


def test_solve_gas_profile(tmp_path):
    cfg = write_cfg(tmp_path, GAS_KV)
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out),
                 "--probe", "0.2"]) == 0
    for name in ("solution.json", "profile.csv", "report.json"):
        assert (out / name).exists()

    header, rows = read_csv(out / "profile.csv")
    assert header == ["s", "z", "r", "dz", "dr",
                      "lambda1", "lambda2", "T1", "T2", "delta"]
    assert rows.shape[0] == 201
    assert np.all(np.diff(rows[:, 0]) > 0.0)
    # clamped edge
    assert abs(rows[-1, 1]) <= 1e-10
    assert abs(rows[-1, 2] - 1.0) <= 1e-10
    # tabulated interior point lands on the grid
    row = rows[40]
    assert row[0] == pytest.approx(0.2, abs=1e-15)
    assert row[1] == pytest.approx(0.7926, abs=5e-4)
    assert row[2] == pytest.approx(0.3069, abs=5e-4)
    assert -row[3] == pytest.approx(0.4362, abs=5e-4)
    assert row[4] == pytest.approx(1.4757, abs=5e-4)

    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert report["delta_probes"][0]["s"] == 0.2
    assert 2e-6 < report["delta_probes"][0]["delta"] < 2e-4


def test_solve_zero_load(tmp_path):
    cfg = write_cfg(tmp_path, "c = 0\nm = 4\n")
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_csv(out / "profile.csv")
    assert np.max(np.abs(rows[:, 1])) == 0.0
    assert np.max(np.abs(rows[:, 2] - rows[:, 0])) == 0.0
    assert np.max(np.abs(rows[:, 7])) == 0.0
    assert np.max(np.abs(rows[:, 8])) == 0.0


def test_solve_liquid_reports_single_steepness(tmp_path):
    path = tmp_path / "liq.json"
    path.write_text(json.dumps(LIQ_JSON))
    out = tmp_path / "out"
    assert main(["solve", "--config", str(path), "--out", str(out)]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is True
    assert isinstance(report["final_p"], list)
    assert len(report["final_p"]) == 1
    assert report["final_p"][0] > 0.0


def test_exit_code_2_on_config_errors(tmp_path):
    bad_key = write_cfg(tmp_path, "c = 1.0\nwobble = 3\n", "bad.cfg")
    assert main(["solve", "--config", bad_key, "--out", str(tmp_path / "a")]) == 2
    no_c = write_cfg(tmp_path, "m = 4\n", "noc.cfg")
    assert main(["solve", "--config", no_c, "--out", str(tmp_path / "b")]) == 2
    assert main(["solve", "--config", str(tmp_path / "absent.cfg"),
                 "--out", str(tmp_path / "c")]) == 2
    steep_d0 = write_cfg(tmp_path, "c = 1.0\nfamily = adaptive\n", "sd0.cfg")
    assert main(["solve", "--config", steep_d0, "--out", str(tmp_path / "d")]) == 2


def test_exit_code_3_still_writes_report(tmp_path):
    cfg = write_cfg(tmp_path, "c = 60\nm = 3\ngamma1 = 0.02\n")
    out = tmp_path / "out"
    assert main(["solve", "--config", cfg, "--out", str(out)]) == 3
    report = json.loads((out / "report.json").read_text())
    assert report["converged"] is False
    assert report["message"]
    assert not (out / "profile.csv").exists()


def test_converge_gas_ladder(tmp_path):
    cfg = write_cfg(tmp_path, GAS_KV + "m_min = 1\nm_max = 6\n")
    out = tmp_path / "out"
    assert main(["converge", "--config", cfg, "--out", str(out),
                 "--probe", "0.2"]) == 0
    header, rows = read_csv(out / "table.csv")
    assert header == ["m", "z", "r", "dz", "dr", "d2z", "d2r", "delta"]
    assert rows.shape == (6, 8)
    assert list(rows[:, 0]) == [1, 2, 3, 4, 5, 6]
    fixtures = {
        4: (0.7926, 0.3068, -0.4350, 1.4759, -2.0421, -0.8560),
        5: (0.7926, 0.3069, -0.4362, 1.4758, -2.0415, -0.8591),
        6: (0.7926, 0.3069, -0.4362, 1.4757, -2.0406, -0.8596),
    }
    for m, expect in fixtures.items():
        row = rows[m - 1]
        for got, want in zip(row[1:5], expect[:4]):
            assert got == pytest.approx(want, abs=5e-4)
        for got, want in zip(row[5:7], expect[4:]):
            assert got == pytest.approx(want, abs=5e-3)
    delta = rows[:, 7]
    assert 2e-1 / 3 <= delta[0] <= 2e-1 * 3
    assert 2e-5 / 10 <= delta[-1] <= 2e-5 * 10
    # near-monotone decay at the probe point; the defect of one iterate can
    # cross zero close to the probe, so allow half an order of slack
    for a, b in zip(delta, delta[1:]):
        assert b <= a * math.sqrt(10.0)


def test_converge_polynomial_stall_under_weight(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "gamma1 = 0.1\nc = 0.5\nd = 10\nfamily = polynomial\n"
        "m_min = 8\nm_max = 8\n")
    out = tmp_path / "out"
    assert main(["converge", "--config", cfg, "--out", str(out),
                 "--probe", "0.9"]) == 0
    _, rows = read_csv(out / "table.csv")
    assert rows.shape[0] == 1
    assert 1e-3 <= rows[0, 7] <= 1e-1


def test_sweep_fold_hints(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "gamma1 = 0.02\ngamma2 = -0.015\ngamma3 = 0.00025\n"
        "c_start = 0.1\nc_end = 1.9\nm = 6\n")
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    header, rows = read_csv(out / "loadsag.csv")
    assert header == ["c", "f", "stability_hint"]
    assert np.all(np.diff(rows[:, 1]) > 0.0)
    hints = rows[:, 2][rows[:, 2] != 0]
    assert int(np.count_nonzero(np.diff(hints))) == 2


def test_sweep_short_monotone_leg(tmp_path):
    cfg = write_cfg(
        tmp_path,
        "gamma1 = 0.02\ngamma2 = -0.015\ngamma3 = 0.00025\n"
        "c_start = 0.2\nc_end = 0.5\nc_step = 0.05\nm = 6\n")
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    _, rows = read_csv(out / "loadsag.csv")
    assert np.all(np.diff(rows[:, 0]) > 0.0)
    assert np.all(np.diff(rows[:, 1]) > 0.0)
    assert np.all(rows[:, 2] >= 0.0)


def test_sweep_empty_range(tmp_path):
    cfg = write_cfg(tmp_path, "c_start = 0.7\nc_end = 0.7\n")
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    text = (out / "loadsag.csv").read_text()
    assert text == "c,f,stability_hint\n"


def test_scale_trivial_cases(capsys, tmp_path):
    args = ["scale", "--r0", "0.1", "--h0", "0.001", "--c1", "2e5",
            "--out", str(tmp_path / "s")]
    assert main(args + ["--rho-g", "9810", "--p-star", "1000",
                        "--p-ref", "1000"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["c"] == 0.0
    assert result["d"] == pytest.approx(0.24525, rel=1e-12)
    assert main(args + ["--rho-g", "0", "--p-star", "5000",
                        "--p-ref", "1000"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["d"] == 0.0
    assert result["c"] == pytest.approx(1.0, rel=1e-12)


def test_scale_round_trip():
    rng = np.random.default_rng(7)
    for _ in range(20):
        r0, h0, c1 = rng.uniform(0.01, 2.0, size=3)
        c = rng.uniform(-5.0, 5.0)
        d = rng.uniform(0.0, 20.0)
        denom = 2.0 * c1 * h0
        # keep the reference pressure at the scale of the difference, or the
        # subtraction sheds the digits the identity is asserted on
        p_ref = rng.uniform(-3.0, 3.0) * denom / r0
        p_star = c * denom / r0 + p_ref
        rho_g = d * denom / r0**2
        back = scale_inputs(r0=r0, h0=h0, c1=c1, rho_g=rho_g,
                            p_star=p_star, p_ref=p_ref)
        assert back["c"] == pytest.approx(c, rel=1e-12, abs=1e-15)
        assert back["d"] == pytest.approx(d, rel=1e-12, abs=1e-15)


def test_scale_rejects_nonpositive_geometry():
    with pytest.raises(ConfigError):
        scale_inputs(r0=0.0, h0=0.001, c1=2e5, rho_g=0.0,
                     p_star=1.0, p_ref=0.0)


def test_outputs_byte_reproducible(tmp_path):
    cfg = write_cfg(tmp_path, GAS_KV)
    out1, out2 = tmp_path / "run1", tmp_path / "run2"
    for out in (out1, out2):
        assert main(["solve", "--config", cfg, "--out", str(out),
                     "--probe", "0.2"]) == 0
    for name in ("solution.json", "profile.csv", "report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
