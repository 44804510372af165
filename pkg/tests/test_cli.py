import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from fracpoisson.cli import main, parse_grid
from fracpoisson.estimate import asymptotic_se
from fracpoisson.specfun import EULER_GAMMA


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def data_rows(text):
    return [ln for ln in text.splitlines() if ln and not ln.startswith("#")][1:]


class TestSimulate:
    def test_small_and_repeatable(self, capsys):
        args = ["simulate", "--nu", 1, "--mu", 10, "--n", 5, "--seed", 7]
        code, out, _ = run(args, capsys)
        assert code == 0
        t = np.array([float(v) for v in data_rows(out)])
        assert t.size == 5 and np.all(np.diff(t) > 0)
        meta = json.loads(out.splitlines()[0][2:])
        assert meta["seed"] == 7 and meta["nu"] == 1.0 and "version" in meta
        assert run(args, capsys)[1] == out

    def test_horizon(self, capsys):
        code, out, _ = run(["simulate", "--nu", 0.5, "--mu", 1, "--horizon", 10, "--seed", 2], capsys)
        assert code == 0
        assert all(float(v) <= 10 for v in data_rows(out))

    def test_jsonl_and_gaps(self, capsys):
        code, out, _ = run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 3, "--format", "jsonl",
                            "--emit", "interarrival"], capsys)
        lines = [json.loads(ln) for ln in out.splitlines() if not ln.startswith("#")]
        assert code == 0 and len(lines) == 3 and all("interarrival" in d for d in lines)

    def test_alt_fpp(self, capsys):
        code, out, _ = run(["simulate", "--nu", 1, "--mu", 2, "--horizon", 5, "--alt-fpp", "--grid", "0:5:6",
                            "--seed", 3], capsys)
        rows = [[float(v) for v in r.split(",")] for r in data_rows(out)]
        assert code == 0 and len(rows) == 6
        y = [r[1] for r in rows]
        assert y[0] == 0 and all(b >= a for a, b in zip(y, y[1:])) and all(v == int(v) for v in y)

    def test_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("FPP_SEED", "11")
        _, a, _ = run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 4], capsys)
        _, b, _ = run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 4, "--seed", 11], capsys)
        assert a == b and json.loads(a.splitlines()[0][2:])["seed"] == 11
        monkeypatch.setenv("FPP_SEED", "x")
        assert run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 4], capsys)[0] == 2

    def test_default_seed_is_zero(self, capsys, monkeypatch):
        monkeypatch.delenv("FPP_SEED", raising=False)
        _, a, _ = run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 4], capsys)
        assert json.loads(a.splitlines()[0][2:])["seed"] == 0


class TestEstimate:
    def test_round_trip(self, tmp_path, capsys):
        path = tmp_path / "sim.csv"
        assert main(["simulate", "--nu", "0.5", "--mu", "1", "--n", "100000", "--seed", "1",
                     "--emit", "interarrival", "--out", str(path)]) == 0
        code, out, _ = run(["estimate", "--input", path], capsys)
        d = json.loads(out)
        assert code == 0 and d["meta"]["command"] == "estimate"
        assert abs(d["nu_hat"] - 0.5) < 3 * d["nu_se"]
        assert abs(d["mu_hat"] - 1.0) < 3 * d["mu_se"]

    def test_degenerate_file(self, tmp_path, capsys):
        path = tmp_path / "c.csv"
        path.write_text("interarrival\n" + "\n".join([repr(math.exp(-EULER_GAMMA))] * 8) + "\n")
        code, out, _ = run(["estimate", "--input", path], capsys)
        d = json.loads(out)
        assert code == 0 and d["nu_hat"] == 1.0 and d["clamped"] and abs(d["mu_hat"] - 1) < 1e-15

    def test_table6_file(self, tmp_path, capsys):
        path = tmp_path / "t6.csv"
        assert main(["simulate", "--nu", "0.9", "--mu", "10", "--n", "100000", "--out", str(path)]) == 0
        code, out, _ = run(["estimate", "--input", path], capsys)
        lo, hi = json.loads(out)["nu_ci"]
        assert abs(lo - 0.8967) <= 0.003 and abs(hi - 0.9036) <= 0.003

    def test_both(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        main(["simulate", "--nu", "0.7", "--mu", "2", "--n", "2000", "--out", str(path)])
        code, out, _ = run(["estimate", "--input", path, "--ci", "both", "--bootstrap-B", 50, "--seed", 5], capsys)
        d = json.loads(out)
        assert code == 0 and d["method"] == "both"
        assert "nu_ci" in d["bootstrap"] and "mu_ci" in d["bootstrap"] and d["meta"]["seed"] == 5
        code, out2, _ = run(["estimate", "--input", path, "--ci", "both", "--bootstrap-B", 50, "--seed", 5], capsys)
        assert out2 == out

    def test_csv_output(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        main(["simulate", "--nu", "0.7", "--mu", "2", "--n", "500", "--out", str(path)])
        code, out, _ = run(["estimate", "--input", path, "--format", "csv"], capsys)
        lines = out.splitlines()
        assert code == 0 and lines[0].startswith("# ") and lines[1].startswith("nu_hat,mu_hat")

    def test_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(sys, "stdin", io.StringIO("interarrival\n1\n2\n3\n"))
        code, out, _ = run(["estimate", "--input", "-"], capsys)
        assert code == 0 and json.loads(out)["n"] == 3

    @pytest.mark.slow
    def test_round_trip_parameter_grid(self, tmp_path, capsys):
        # average over 20 seeds of the N = 1e5 estimates lies within 3 predicted se of the truth
        for nu, mu in ((0.9, 10.0), (0.3, 1.0), (0.2, 100.0), (0.6, 1000.0)):
            nus, mus = [], []
            for seed in range(20):
                path = tmp_path / f"r{seed}.csv"
                assert main(["simulate", "--nu", str(nu), "--mu", str(mu), "--n", "100000", "--seed", str(seed),
                             "--emit", "interarrival", "--out", str(path)]) == 0
                code, out, _ = run(["estimate", "--input", path], capsys)
                d = json.loads(out)
                nus.append(d["nu_hat"])
                mus.append(d["mu_hat"])
            nu_se, mu_se = asymptotic_se(nu, mu, 100_000)
            assert abs(np.mean(nus) - nu) <= 3 * nu_se / math.sqrt(20)
            assert abs(np.mean(mus) - mu) <= 3 * mu_se / math.sqrt(20)


class TestEval:
    def test_limit_pdf(self, capsys):
        code, out, _ = run(["eval", "--fn", "limit-pdf", "--nu", 0.5, "--grid", "0:3:4"], capsys)
        rows = [[float(v) for v in r.split(",")] for r in data_rows(out)]
        assert code == 0 and len(rows) == 4
        assert rows[0][0] == 0 and abs(rows[0][1] - 2 / math.pi) < 1e-15

    def test_survival(self, capsys):
        code, out, _ = run(["eval", "--fn", "survival", "--nu", 1, "--mu", 1, "--grid", "0:1:2"], capsys)
        rows = [[float(v) for v in r.split(",")] for r in data_rows(out)]
        assert rows[0] == [0.0, 1.0] and rows[1][0] == 1.0 and abs(rows[1][1] - math.exp(-1)) < 1e-15

    def test_stable_pdf_json(self, capsys):
        code, out, _ = run(["eval", "--fn", "stable-pdf", "--alpha", 0.5, "--grid", "1:1:1", "--format", "json"],
                           capsys)
        d = json.loads(out)
        assert code == 0 and d["meta"]["fn"] == "stable-pdf"
        assert abs(d["rows"][0][1] - 0.219696) < 1e-6

    @pytest.mark.parametrize("fn,extra", [("ml", ["--nu", 0.5]), ("ml2", ["--alpha", 0.5, "--beta", 0.5]),
                                          ("interarrival-pdf", ["--nu", 0.5, "--mu", 1]),
                                          ("pmf", ["--nu", 0.5, "--mu", 1, "--n", 2])])
    def test_other_functions(self, capsys, fn, extra):
        code, out, _ = run(["eval", "--fn", fn, *extra, "--grid", "0.5:2:4"], capsys)
        assert code == 0 and len(data_rows(out)) == 4

    def test_grid_parsing(self):
        assert np.array_equal(parse_grid("0:1:3"), [0, 0.5, 1])
        assert np.array_equal(parse_grid("2:2:1"), [2.0])


class TestExperiment:
    def test_bundled_markdown(self, capsys):
        code, out, _ = run(["experiment", "--spec", "table2", "--format", "markdown"], capsys)
        assert code == 0 and "| nu_hat |" in out and "N=10,000" in out

    def test_smoke_and_determinism(self, capsys):
        args = ["experiment", "--nu", 0.5, "--mu", 2, "--sample-sizes", 100, "--replicates", 1]
        t0 = time.time()
        code, out, _ = run(args, capsys)
        assert code == 0 and time.time() - t0 < 1.0
        assert run(args, capsys)[1] == out
        d = json.loads(out)
        assert d["spec"]["seed"] == 0 and len(d["cells"]) == 2

    def test_spec_file(self, tmp_path, capsys):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps({"nu": 0.6, "mu": 1000, "sample_sizes": [200], "replicates": 5, "seed": 3,
                                    "ci_level": 0.9, "bootstrap_B": 10, "mode": "ci"}))
        code, out, _ = run(["experiment", "--spec", path, "--format", "csv"], capsys)
        lines = out.splitlines()
        assert code == 0 and json.loads(lines[0][2:])["spec"]["seed"] == 3 and len(lines) == 4


class TestExitCodes:
    def test_usage(self, capsys):
        assert run(["simulate", "--mu", 1, "--n", 3], capsys)[0] == 2
        assert run(["simulate", "--nu", 0.5, "--mu", 1], capsys)[0] == 2
        assert run(["simulate", "--nu", 0.5, "--mu", 1, "--n", 3, "--horizon", 2], capsys)[0] == 2
        assert run(["simulate", "--nu", 1.5, "--mu", 1, "--n", 3], capsys)[0] == 2
        assert run(["eval", "--fn", "ml", "--grid", "0:1"], capsys)[0] == 2
        assert run(["eval", "--fn", "ml", "--grid", "0:1:3"], capsys)[0] == 2
        assert run(["experiment"], capsys)[0] == 2

    def test_data(self, tmp_path, capsys):
        assert run(["estimate", "--input", tmp_path / "missing.csv"], capsys)[0] == 3
        bad = tmp_path / "bad.csv"
        bad.write_text("arrival_time\n1.0\n2.0\n1.5\n")
        code, _, err = run(["estimate", "--input", bad], capsys)
        assert code == 3 and "line 4" in err
        one = tmp_path / "one.csv"
        one.write_text("interarrival\n1.0\n")
        assert run(["estimate", "--input", one], capsys)[0] == 3
        assert run(["experiment", "--spec", tmp_path / "nope.json"], capsys)[0] == 3

    def test_accuracy(self, capsys):
        code, _, err = run(["eval", "--fn", "pmf", "--nu", 0.5, "--mu", 100, "--n", 2, "--grid", "1:1:1"], capsys)
        assert code == 4 and "accuracy" in err

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "fracpoisson", "eval", "--fn", "ml", "--nu", "1", "--grid", "0:0:1"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and r.stdout.splitlines()[-1] == "0,1"
        r = subprocess.run([sys.executable, "-m", "fracpoisson", "bogus"], capture_output=True, text=True)
        assert r.returncode == 2
