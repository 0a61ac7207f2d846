import csv
import io
import json

import pytest

from sqkd import attack, cli
from sqkd.depol import DepolScenario, dilation


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_keyrate_scenario(capsys):
    code, out, _ = run(capsys, "keyrate", "--q", "0", "--b", "0")
    assert code == 0 and json.loads(out)["report"]["r"] == 1.0
    code, out, _ = run(capsys, "keyrate", "--q", "0.1", "--b", "0")
    assert json.loads(out)["report"]["r"] == pytest.approx(0.0432, abs=5e-4)


def test_keyrate_attack_file_matches_scenario(capsys, tmp_path):
    path = tmp_path / "depol_q0.1.json"
    assert cli.main(["dilate", "--q", "0.1", "--b", "0", "-o", str(path)]) == 0
    _, a_out, _ = run(capsys, "keyrate", "--attack", str(path))
    _, s_out, _ = run(capsys, "keyrate", "--q", "0.1", "--b", "0")
    a_rep, s_rep = json.loads(a_out)["report"], json.loads(s_out)["report"]
    for k in ("eta", "capB", "lambda", "hBA", "sBEC", "sEC_upper", "r"):
        assert a_rep[k] == pytest.approx(s_rep[k], abs=1e-10)


def test_keyrate_stats_file(capsys, tmp_path):
    path = tmp_path / "stats.json"
    path.write_text(json.dumps({"b": 0, "qz0": 0, "qz1": 0, "p0plus": 0.5, "p1plus": 0.5,
                                "pe1": 0.5, "peminus": 0}))
    code, out, _ = run(capsys, "keyrate", "--stats", str(path))
    assert code == 0 and json.loads(out)["report"]["r"] == 1.0


def test_keyrate_bad_stats_names_field(capsys, tmp_path):
    path = tmp_path / "stats.json"
    path.write_text(json.dumps({"b": 0, "qz0": 0, "qz1": 0, "p0plus": 0.5, "p1plus": 0.5, "pe1": "x",
                                "peminus": 0}))
    code, _, err = run(capsys, "keyrate", "--stats", str(path))
    assert code == 1 and "'pe1'" in err


def test_keyrate_abort_exit_code(capsys, tmp_path):
    path = tmp_path / "stats.json"
    path.write_text(json.dumps({"b": 0, "qz0": 0.3, "qz1": 0.3, "p0plus": 1.0, "p1plus": 0.5,
                                "pe1": 0.4, "peminus": 0.3}))
    code, out, _ = run(capsys, "keyrate", "--stats", str(path))
    assert code == 2 and json.loads(out)["report"]["aborted"]


def test_keyrate_sources_exclusive(capsys, tmp_path):
    with pytest.raises(SystemExit) as exc:
        cli.main(["keyrate", "--q", "0.1", "--attack", "x.json"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["keyrate"])


def test_simulate_noiseless(capsys):
    code, out, _ = run(capsys, "simulate", "--q", "0", "--b", "0", "--iterations", "100000", "--seed", "7")
    d = json.loads(out)
    assert code == 0
    assert d["errors"] == {"01": 0, "10": 0}
    assert d["seed"] == 7 and d["generator"] == "PCG64"
    assert d["report"]["r"] == pytest.approx(1.0, abs=0.05)


def test_simulate_reproducible(capsys):
    argv = ["simulate", "--q", "0.1", "--b", "0", "--iterations", "50000", "--seed", "3", "--shards", "2"]
    _, one, _ = run(capsys, *argv)
    _, two, _ = run(capsys, *argv)
    assert one == two


def test_simulate_depol(capsys):
    _, out, _ = run(capsys, "simulate", "--q", "0.1", "--b", "0", "--iterations", "1000000", "--seed", "1")
    assert json.loads(out)["report"]["r"] == pytest.approx(0.0432, abs=0.02)


def test_threshold_cmd(capsys):
    _, out, _ = run(capsys, "threshold", "--b-list", "0")
    b, tau = out.splitlines()[1].split(",")
    assert float(b) == 0 and float(tau) == pytest.approx(0.1072, abs=1e-3)
    _, out, _ = run(capsys, "threshold", "--b-list", "-0.1")
    b, tau = out.splitlines()[1].split(",")
    assert float(b) == -0.1 and float(tau) == pytest.approx(0.1118, abs=1e-3)


def test_threshold_range(capsys):
    code, out, _ = run(capsys, "threshold", "--b-min", "0.3", "--b-max", "0.34", "--b-step", "0.02")
    rows = out.splitlines()[1:]
    assert code == 0 and len(rows) == 3 and rows[-1] == "0.34,"


def test_sweep_cmd(capsys, tmp_path):
    path = tmp_path / "fig1.csv"
    code = cli.main(["sweep", "--b-list", "0,-0.1,0.1,0.25", "--q-min", "0", "--q-max", "0.15",
                     "--q-step", "0.001", "-o", str(path)])
    rows = list(csv.DictReader(io.StringIO(path.read_text())))
    assert code == 0 and len(rows) == 4 * 151
    assert float(rows[0]["r"]) == 1.0


def test_sweep_invalid_grid(capsys):
    code, _, err = run(capsys, "sweep", "--b-list", "0", "--q-step", "-1")
    assert code == 1 and "step" in err


def test_validate_cmd(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text(dilation(DepolScenario(0.1, 0)).to_json())
    code, out, _ = run(capsys, "validate", "--attack", str(good))
    assert code == 0 and json.loads(out)["passed"]

    ident = tmp_path / "id.json"
    ident.write_text(attack.identity_attack().to_json())
    code, out, _ = run(capsys, "validate", "--attack", str(ident))
    d = json.loads(out)
    assert code == 0 and d["norm0_residual"] == d["orth_residual"] == 0

    bad = tmp_path / "bad.json"
    data = json.loads(ident.read_text())
    data["e1"] = [[1.0, 0.0]]
    bad.write_text(json.dumps(data))
    code, out, _ = run(capsys, "validate", "--attack", str(bad))
    assert code == 1 and json.loads(out)["norm0_residual"] == pytest.approx(1.0)

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run(capsys, "validate", "--attack", str(broken))
    assert code == 1 and "malformed" in err
