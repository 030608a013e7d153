import csv
import json
import math
import re

import pytest

from galois_sat.cli import DEFAULTS, ConfigError, main, read_config, resolve
from galois_sat.jsonio import dumps17

K_RED = math.sqrt(0.9)
C_RED = 1 - 2.5 / 3


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestConfig:
    def test_precedence(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nC = 0.5\nxi = 0.75  # inline\nt-final = 3\n")
        got = resolve("simulate", {"C": 1.2, "xi": None}, cfg)
        assert got["C"] == 1.2 and got["xi"] == 0.75 and got["t_final"] == 3.0
        assert got["tol"] == DEFAULTS["simulate"]["tol"]

    @pytest.mark.parametrize("text", ["C 0.5\n", "bogus = 1\n", "seed = x\n",
                                      "from_particular = maybe\n"])
    def test_bad_config(self, tmp_path, text):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text(text)
        with pytest.raises(ConfigError):
            read_config(cfg)

    def test_bad_config_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("C = one\n")
        assert run(capsys, "classify", "--config", str(cfg))[0] == 2

    def test_missing_config(self, capsys, tmp_path):
        assert run(capsys, "classify", "--config", str(tmp_path / "nope.cfg"))[0] == 2


class TestExitCodes:
    def test_degenerate_C(self, capsys, tmp_path):
        code, _, err = run(capsys, "simulate", "--C", "1", "--out", str(tmp_path / "t.csv"))
        assert code == 2 and "omega = 0" in err

    @pytest.mark.parametrize("argv", [["classify", "--C", "2.5"], ["classify", "--k", "1.5"],
                                      ["monodromy", "--tol", "1e-2"], ["frobnicate"],
                                      ["section", "--seeds", "0;1"]])
    def test_invalid_input(self, capsys, argv):
        assert run(capsys, *argv)[0] == 2

    def test_infeasible_section_energy(self, capsys, tmp_path):
        code, _, err = run(capsys, "section", "--h", "-3", "--out", str(tmp_path / "s.csv"))
        assert code == 2 and "EnergyInfeasible" in err

    def test_numerical_failure(self, capsys, tmp_path, monkeypatch):
        import galois_sat.poincare as pc
        from galois_sat.errors import StepFailure

        def boom(*a, **k):
            raise StepFailure("step size underflow")
        monkeypatch.setattr(pc, "run_section", boom)
        assert run(capsys, "section", "--out", str(tmp_path / "s.csv"))[0] == 3


class TestClassify:
    @pytest.mark.parametrize("argv, verdict", [
        (["--C", "1.5", "--xi", "0.2", "--k", "0.5"], "SL2 - necessary condition for "
                                                      "integrability violated"),
        (["--C", "0.5", "--xi", "0.75", "--k", "0.6"], "Case2Solvable - identity component "
                                                       "Abelian; necessary condition satisfied"),
        (["--C", repr(C_RED), "--xi", "1.25", "--k", repr(K_RED)], "Reducible"),
    ])
    def test_verdicts(self, capsys, argv, verdict):
        code, out, _ = run(capsys, "classify", "--no-monodromy", *argv)
        assert code == 0 and out.strip().startswith(verdict)

    def test_defaults_give_sl2(self, capsys):
        assert run(capsys, "classify", "--no-monodromy")[1].startswith("SL2")

    def test_json(self, capsys, tmp_path):
        out_file = tmp_path / "rep.json"
        code, out, _ = run(capsys, "classify", "--json", "--out", str(out_file))
        d = json.loads(out)
        assert code == 0 and d["schema"] == 1 and d["classification"] == "SL2"
        assert d["monodromy"]["relations"]["irreducible"] is True
        assert json.loads(out_file.read_text()) == d


    def test_thread_cap_does_not_change_report(self, capsys, monkeypatch):
        serial = run(capsys, "classify", "--json")[1]
        monkeypatch.setenv("GALOIS_SAT_THREADS", "4")
        assert run(capsys, "classify", "--json")[1] == serial


class TestOtherCommands:
    def test_simulate(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        code, out, _ = run(capsys, "simulate", "--t-final", "5", "--n-out", "11",
                           "--out", str(path))
        d = json.loads(out)
        assert code == 0 and max(d["relative_drift"].values()) < 1e-8
        rows = list(csv.reader(path.open()))
        assert rows[0][0] == "t" and len(rows) == 12

    def test_simulate_from_particular(self, capsys, tmp_path):
        code, out, _ = run(capsys, "simulate", "--from-particular", "--k", "0.5", "--C", "1.5",
                           "--t-final", "1", "--out", str(tmp_path / "p.csv"))
        x0 = json.loads(out)["x0"]
        assert x0[0] == pytest.approx(1 + 0.5 * math.sqrt(1.5), abs=1e-15)

    def test_monodromy(self, capsys):
        code, out, _ = run(capsys, "monodromy")
        d = json.loads(out)
        assert code == 0 and d["relations"]["sphere_residual"] < 1e-6

    def test_section(self, capsys, tmp_path):
        path = tmp_path / "s.csv"
        code, out, _ = run(capsys, "section", "--seeds", "0.3:1", "--max-crossings", "4",
                           "--out", str(path))
        d = json.loads(out)
        assert code == 0 and d["seeds"][0]["status"] == "ok"
        assert path.read_text().splitlines()[1] == "seed_id,crossing_index,q1,p1,t"

    @pytest.mark.parametrize("C", ["1.5", "0.5"])
    def test_solution_check(self, capsys, C):
        code, out, _ = run(capsys, "solution-check", "--C", C)
        d = json.loads(out)
        assert code == 0 and d["ok"] and d["sup_error"] < 1e-7 and d["H_error"] < 1e-12


class TestJSONOutput:
    def test_seventeen_digits(self):
        text = dumps17({"x": 0.1, "z": 1 + 2j, "bad": float("nan"), "n": [1, 2.5]})
        assert '"x": 0.10000000000000001' in text
        assert '"n": [1, 2.5]' in text
        d = json.loads(text)
        assert d["bad"] is None and d["z"] == [1.0, 2.0] and d["x"] == 0.1

    def test_report_floats(self, capsys):
        out = run(capsys, "solution-check")[1]
        tokens = re.findall(r"-?\d+\.\d+(?:e[+-]\d+)?", out)
        assert tokens
        # every float is written exactly as %.17g would write it
        assert all(f"{float(t):.17g}" == t for t in tokens)
