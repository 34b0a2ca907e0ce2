import csv
import io
import json
import subprocess
import sys

import pytest

from rydpol import cli, config
from rydpol.errors import ConfigError


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def reference_text():
    from importlib import resources
    return resources.files("rydpol").joinpath("data/paper.toml").read_text()


@pytest.fixture
def seedless(tmp_path):
    path = tmp_path / "noseed.toml"
    path.write_text("\n".join(l for l in reference_text().splitlines() if not l.startswith("seed")))
    return path


def test_reference_config_loads(cfg):
    m = cfg.medium()
    assert cfg.seed == 20180
    assert m.length == pytest.approx(60e-6)
    assert cfg.budget().shots == 10000


def test_unknown_keys_rejected(tmp_path, capsys):
    with pytest.raises(ConfigError, match="unknown key"):
        config.parse_text("[medium]\ndensty_per_cm3 = 2e12\n")
    with pytest.raises(ConfigError, match="unknown section"):
        config.parse_text("[mediums]\n")
    with pytest.raises(ConfigError, match="wrong type"):
        config.parse_text("[budget]\nshots = true\n")
    bad = tmp_path / "bad.toml"
    bad.write_text("[medium]\nfoo = 1\n")
    code, _, err = run(capsys, "spectrum", "--config", str(bad))
    assert code == 2 and "foo" in err


def test_missing_file_and_bad_syntax(tmp_path, capsys):
    assert run(capsys, "spectrum", "--config", str(tmp_path / "nope.toml"))[0] == 2
    broken = tmp_path / "broken.toml"
    broken.write_text("[medium\n")
    assert run(capsys, "spectrum", "--config", str(broken))[0] == 2


def test_usage_error_exit_code(capsys):
    assert run(capsys, "spectrum", "--points", "many")[0] == 2
    assert run(capsys, "repro", "nonsense")[0] == 2


def test_echo_round_trip(tmp_path, capsys):
    echo = tmp_path / "echo.json"
    code, first, _ = run(capsys, "optimize", "--format", "json", "--echo-config", str(echo))
    assert code == 0
    assert config.load(echo) == config.reference_config()
    code, second, _ = run(capsys, "optimize", "--format", "json", "--config", str(echo))
    assert code == 0 and first == second


def test_sampling_without_seed_fails(seedless, capsys):
    code, _, err = run(capsys, "tomography-sim", "--config", str(seedless))
    assert code == 2 and "seed" in err
    code, _, _ = run(capsys, "tomography-sim", "--config", str(seedless), "--seed", "3", "--shots", "2000")
    assert code == 0
    # deterministic modes need no seed
    assert run(capsys, "tomography-sim", "--config", str(seedless), "--mode", "expected")[0] == 0


def test_infeasible_medium_exit_code(tmp_path, capsys):
    weak = tmp_path / "weak.toml"
    weak.write_text(reference_text().replace("c6_au = 2.3e23", "c6_au = 2.3e17"))
    code, _, err = run(capsys, "optimize", "--config", str(weak))
    assert code == 3 and "Infeasible" in err


def test_repro_single_target(capsys):
    code, out, _ = run(capsys, "repro", "zeta")
    assert code == 0 and "PASS" in out
    code, out, _ = run(capsys, "repro", "zeta", "--format", "json")
    assert json.loads(out)[0]["passed"] is True


def test_repro_failure_exit_code(capsys):
    code, out, _ = run(capsys, "repro", "im_chi_b")
    assert code == (0 if "FAIL" not in out else 1)


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--points", "11")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 11
    assert list(rows[0]) == ["delta_s_mhz", "re_chi", "im_chi", "od", "beta_rad", "transmission"]


def test_visibility_curve_csv(capsys, caplog):
    code, out, _ = run(capsys, "visibility-curve", "--lmin", "0.25", "--lmax", "8", "--points", "32")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert list(rows[0]) == ["l_over_rb", "delta_beta_b_rad", "v_t", "beta_4_rad"]
    assert all(0 <= float(r["v_t"]) <= 1 for r in rows)
    assert float(rows[0]["l_over_rb"]) >= 0.5  # no pi solution below half a radius
    assert "skipping" in caplog.text


def test_blockade_sweep_and_position(capsys):
    code, out, _ = run(capsys, "blockade", "--sweep", "--points", "5")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 5
    assert list(rows[0]) == ["z_s_um", "l_b_um", "delta_od", "delta_beta_rad"]
    code, out, _ = run(capsys, "blockade", "--convention", "position", "--z-s-um", "30", "--format", "json")
    assert code == 0 and "r_b" in out


def test_optimize_sweep(capsys):
    code, out, _ = run(capsys, "optimize", "--sweep", "gamma_rg", "--points", "4")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4
    assert list(rows[0])[:2] == ["gamma_rg_per_us", "zeta"]


def test_truth_table_and_bound(capsys):
    code, out, _ = run(capsys, "truth-table", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "input,output,probability"
    code, out, _ = run(capsys, "fidelity-bound", "--samples", "20000")
    doc = json.loads(out)
    assert code == 0
    assert doc["f_e_bound"] == pytest.approx(0.76, abs=0.01)
    assert doc["f_m"] == pytest.approx(0.875, abs=0.002)
    assert doc["monte_carlo"]["f_e"] == pytest.approx(doc["f_e_bound"], abs=0.01)


def test_tomography_sim_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert run(capsys, "tomography-sim", "--seed", "7", "--shots", "3000", "--out", str(p))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    code, out, _ = run(capsys, "tomography-sim", "--state", "ideal", "--mode", "expected", "--format", "json")
    assert code == 0 and json.loads(out)["fidelity"] == pytest.approx(1.0)


def test_hopping_compare(capsys):
    code, out, _ = run(capsys, "hopping-compare")
    assert code == 0 and json.loads(out)["decay_factor"] == pytest.approx(0.75, abs=0.01)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rydpol.cli", "repro", "zeta"], capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
