import json
import subprocess
import sys

import pytest

from aqec_lab import __version__, cli
from aqec_lab.errors import InvariantViolation


def run_json(argv):
    text, _ = cli.run(argv)
    return json.loads(text)


def strip_wall(text):
    return "\n".join(l for l in text.splitlines() if "wall_time" not in l)


def test_bounds_json_metadata():
    out = run_json(["bounds", "--family", "double-layer", "--noise", "erasure-iid:0.05",
                    "--n", "256", "--k", "64", "--eps", "n^-1", "--seed", "3"])
    assert out["version"] == __version__
    assert out["seed"] == 3
    assert out["config"]["eps"] == "n^-1"
    assert "wall_time" in out
    assert out["result"]["formula_id"] == "double-layer/erasure-iid/nonsmooth"
    assert 0 < out["result"]["value"] < 1


def test_json_keys_sorted():
    text, _ = cli.run(["curves", "--format", "json", "--points", "3", "--seed", "1"])
    obj = json.loads(text)
    assert text == json.dumps(obj, sort_keys=True, indent=2) + "\n"


def test_curves_csv_format():
    text, _ = cli.run(["curves", "--seed", "1"])
    assert "\r" not in text
    lines = text.splitlines()
    meta = [l for l in lines if l.startswith("#")]
    assert any(l.startswith("# version:") for l in meta)
    assert any(l.startswith("# seed: 1") for l in meta)
    body = [l for l in lines if not l.startswith("#")]
    assert body[0].split(",")[0] == "p" and len(body[0].split(",")) == 8
    assert len(body) == 62
    assert body[4].split(",")[4] == "%.12g" % (1 - 2 * 0.03)


def test_simulate_reproducible_except_wall_time():
    argv = ["simulate", "--family", "double-layer", "--noise", "erasure-iid:0.2", "--n", "16", "--k", "4",
            "--eps", "1", "--xi", "2", "--circuits", "4", "--patterns", "50", "--seed", "9"]
    a, _ = cli.run(argv)
    b, _ = cli.run(argv + ["--workers", "2"])
    ja, jb = json.loads(a), json.loads(b)
    assert ja["result"]["per_circuit"] == jb["result"]["per_circuit"]
    assert strip_wall(a) == strip_wall(cli.run(argv)[0])


def test_missing_seed_is_recorded():
    out = run_json(["curves", "--format", "json", "--points", "2"])
    assert isinstance(out["seed"], int) and out["config"]["seed"] == out["seed"]


def test_config_file_and_unknown_field(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"family": "clifford", "noise": "erasure-fixed:12", "n": 40, "k": 8, "eps": 1.0}))
    out = run_json(["bounds", "--config", str(good), "--seed", "0"])
    assert out["result"]["value"] == pytest.approx(0.25)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 40, "colour": "blue"}))
    assert cli.main(["bounds", "--config", str(bad)]) == 2
    assert "colour" in capsys.readouterr().err


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"points": 5}))
    text, _ = cli.run(["curves", "--config", str(cfg), "--points", "3", "--seed", "0"])
    assert len([l for l in text.splitlines() if not l.startswith("#")]) == 4


def test_exit_codes(capsys, monkeypatch):
    assert cli.main(["bounds", "--n", "10"]) == 2
    assert cli.main(["nonsense"]) == 2
    assert cli.main(["bounds", "--family", "double-layer", "--noise", "erasure-iid:2", "--n", "10", "--k", "2",
                     "--eps", "0.1"]) == 3
    assert cli.main(["curves", "--p-max", "0.9"]) == 3

    def boom(cfg):
        raise InvariantViolation("broken")

    monkeypatch.setitem(cli.HANDLERS, "curves", boom)
    assert cli.main(["curves"]) == 4
    capsys.readouterr()


def test_output_file(tmp_path):
    path = tmp_path / "out.json"
    assert cli.main(["curves", "--points", "2", "--format", "json", "--output", str(path), "--seed", "1"]) == 0
    assert json.loads(path.read_text())["command"] == "curves"


def test_second_moment_modes():
    mk = run_json(["second-moment", "--mode", "markov", "--depth", "40", "--seed", "1"])["result"]
    assert abs(mk["exact"] - mk["haar"]) < 1e-8 and mk["residual"] < 1e-8
    tr = run_json(["second-moment", "--mode", "transfer", "--n", "4", "--k", "1", "--xi", "1",
                   "--pattern", "1,0,0,1", "--seed", "1"])["result"]
    assert tr["exact"] == tr["dense"] and tr["residual"] == 0


def test_lightcone_and_compare_block():
    lc = run_json(["lightcone", "--seed", "1"])["result"]
    assert lc["M"] >= 1 and lc["J_size"] == len(lc["J"]) >= 1
    assert lc["floor"] <= 1
    cb = run_json(["compare-block", "--n", "120", "--circuits", "5", "--patterns", "50", "--seed", "2"])["result"]
    assert round(cb["analytic"]["block_poly_exponent"], 2) == 0.14
    assert round(cb["analytic"]["double_layer_exponent"], 3) == -0.025
    assert set(cb["empirical"]) == {"double-layer", "block"}
    assert cli.main(["compare-block", "--n", "96", "--circuits", "1"]) == 3


def test_env_var_sets_workers(monkeypatch):
    monkeypatch.setenv("AQEC_LAB_THREADS", "2")
    _, cfg = cli.run(["curves", "--points", "2", "--seed", "1"])
    assert cfg["workers"] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "aqec_lab", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
