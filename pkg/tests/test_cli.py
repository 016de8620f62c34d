import json
import math

import pytest
from click.testing import CliRunner

from homsense.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def gauss_file(state_file):
    return state_file("gauss.json", {"family": "gaussian", "sigma": 1.0})


@pytest.fixture
def cat_file(state_file):
    return state_file("cat.json", {"family": "frequency_cat", "sigma": 1.0,
                                   "delta": 10.0})


def _data_lines(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


class TestQfi:
    def test_state_csv(self, runner, gauss_file):
        res = runner.invoke(main, ["qfi", "--state", gauss_file])
        assert res.exit_code == 0
        lines = _data_lines(res.output)
        assert lines[0].split(",")[:3] == ["family", "params", "convention"]
        row = lines[1].split(",")
        assert row[0] == "gaussian"
        assert float(row[3]) == pytest.approx(0.5)  # printed f_tt

    def test_canonical_convention(self, runner, gauss_file):
        res = runner.invoke(main, ["qfi", "--state", gauss_file,
                                   "--convention", "canonical"])
        row = _data_lines(res.output)[1].split(",")
        assert float(row[3]) == pytest.approx(2.0)

    def test_preset_table(self, runner):
        res = runner.invoke(main, ["qfi", "--preset", "table1"])
        assert res.exit_code == 0
        assert len(_data_lines(res.output)) >= 5

    def test_roundtrip_precision(self, runner, cat_file):
        res = runner.invoke(main, ["qfi", "--state", cat_file,
                                   "--convention", "canonical"])
        from homsense.qfi import qfi_canonical
        from homsense.statefamilies import load_spec
        exact = qfi_canonical(load_spec(cat_file)).f_tt
        f_tt = float(_data_lines(res.output)[1].split(",")[3])
        assert f_tt == exact  # 17-digit formatting roundtrips bit-exactly

    def test_bad_state_exits_2(self, runner, state_file):
        bad = state_file("bad.json", {"family": "gaussian", "sigma": -1.0})
        res = runner.invoke(main, ["qfi", "--state", bad])
        assert res.exit_code == 2

    def test_deterministic_bytes(self, runner, cat_file):
        a = runner.invoke(main, ["qfi", "--state", cat_file]).output
        b = runner.invoke(main, ["qfi", "--state", cat_file]).output
        assert a == b


class TestFiSweep:
    def test_header_and_rows(self, runner, cat_file):
        res = runner.invoke(main, ["fi-sweep", "--state", cat_file,
                                   "--range", "0.01:0.15:8"])
        assert res.exit_code == 0
        lines = _data_lines(res.output)
        assert lines[0] == "param_value,p0,p1,p2,coincidence,f_tt,f_mm,f_mt"
        assert len(lines) == 9
        first = [float(v) for v in lines[1].split(",")]
        assert first[0] == 0.01
        assert 0.0 <= first[4] <= 1.0

    def test_count_validation(self, runner, cat_file):
        res = runner.invoke(main, ["fi-sweep", "--state", cat_file,
                                   "--range", "0:1:1"])
        assert res.exit_code == 2


class TestWigner:
    def test_json_norm(self, runner, gauss_file):
        res = runner.invoke(main, ["wigner", "--state", gauss_file,
                                   "--nx", "64", "--ny", "64",
                                   "--format", "json"])
        assert res.exit_code == 0
        doc = json.loads(res.output)
        assert doc["data"]["norm_estimate"] == pytest.approx(1.0, abs=1e-4)

    def test_csv_meta(self, runner, gauss_file):
        res = runner.invoke(main, ["wigner", "--state", gauss_file,
                                   "--nx", "32", "--ny", "32"])
        assert res.exit_code == 0
        meta = [ln for ln in res.output.splitlines() if ln.startswith("#")]
        assert any("norm" in ln for ln in meta)


class TestSimulateAndEstimate:
    def test_simulate_counts(self, runner, cat_file):
        res = runner.invoke(main, ["simulate", "--state", cat_file,
                                   "--tau", "0.05", "--trials", "5000",
                                   "--seed", "9"])
        assert res.exit_code == 0
        doc = json.loads(res.output)
        counts = doc["data"]
        assert counts["n0"] + counts["n1"] + counts["n2"] == 5000

    def test_seed_reproducible(self, runner, cat_file):
        args = ["simulate", "--state", cat_file, "--tau", "0.05",
                "--trials", "5000", "--seed", "9"]
        assert runner.invoke(main, args).output == runner.invoke(main,
                                                                 args).output

    def test_estimate_roundtrip(self, runner, cat_file):
        sim = json.loads(runner.invoke(
            main, ["simulate", "--state", cat_file, "--tau", "0.0785",
                   "--trials", "200000", "--seed", "4"]).output)["data"]
        counts = f"{sim['n0']},{sim['n1']},{sim['n2']}"
        res = runner.invoke(main, ["estimate", "--state", cat_file,
                                   "--counts", counts])
        assert res.exit_code == 0
        doc = json.loads(res.output)
        assert doc["data"]["estimate"] == pytest.approx(0.0785, abs=5e-3)

    def test_estimate_window_override(self, runner, cat_file):
        q = math.pi / 40.0
        res = runner.invoke(main, ["estimate", "--state", cat_file,
                                   "--counts", "0,60000,40000",
                                   "--window", f"{0.02 * q}:{1.98 * q}"])
        assert res.exit_code == 0


class TestCrStudy:
    def test_summary_and_rows(self, runner, cat_file, tmp_path):
        summary_path = tmp_path / "summary.json"
        res = runner.invoke(main, [
            "cr-study", "--state", cat_file, "--tau", "0.0785",
            "--trials", "400", "--experiments", "12", "--seed", "3",
            "--summary-out", str(summary_path)])
        assert res.exit_code == 0
        lines = _data_lines(res.output)
        assert lines[0] == "experiment_id,tau_hat,converged"
        assert len(lines) == 13
        summary = json.loads(summary_path.read_text())["data"]
        assert summary["n_experiments"] == 12
        assert "ratio" in summary


class TestTables:
    def test_both_tables(self, runner):
        res = runner.invoke(main, ["tables"])
        assert res.exit_code == 0
        lines = _data_lines(res.output)
        assert lines[0].startswith("table,label,family")
        tables = {ln.split(",")[0] for ln in lines[1:]}
        assert tables == {"table1", "table2"}

    def test_atomic_write(self, runner, tmp_path):
        out = tmp_path / "tables.csv"
        res = runner.invoke(main, ["tables", "--out", str(out)])
        assert res.exit_code == 0
        assert out.exists()
        leftovers = [p for p in tmp_path.iterdir() if p.name != "tables.csv"]
        assert leftovers == []
