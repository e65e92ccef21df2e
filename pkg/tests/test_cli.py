import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from tdlbounds import PdpSpec, TapGrid, build_covariance, gen_pilot, write_pilot_csv
from tdlbounds.cli import main, parse_snr_list


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestParsing:
    def test_snr_forms(self):
        assert parse_snr_list("-20:10:30") == [-20, -10, 0, 10, 20, 30]
        assert parse_snr_list("0, 5,10") == [0, 5, 10]

    @pytest.mark.parametrize("argv,field", [
        (["bounds", "--snr-db", "1:0:5"], "--snr-db"),
        (["bounds", "--window", "3"], "--window"),
        (["bounds", "--window=-1,2"], "--window"),
        (["bounds", "--pdp", "{bad json"], "--pdp"),
        (["bounds", "--pdp", "laplacian"], "--pdp"),
        (["bounds", "--bandwidth", "1,10"], "--bandwidth"),
        (["bounds", "--n", "0"], "--n"),
        (["table1", "--threshold", "1.5"], "--threshold"),
        (["simulate", "--pilot", "pink", "--trials", "2"], "--pilot"),
        (["simulate", "--estimators", "ml", "--trials", "2"], "--estimators"),
    ])
    def test_usage_errors_name_the_field(self, capsys, argv, field):
        code, out, err = run(capsys, *argv)
        assert code == 2 and out == ""
        assert err.strip().splitlines()[-1].startswith(f"error: usage: {field}:")

    def test_argparse_rejects_unknown_command(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["figure2"])
        assert info.value.code == 2


class TestTable1:
    def test_narrowband_row(self, capsys):
        code, out, err = run(capsys, "table1", "--bandwidth", "1", "--kinds",
                             "exponential,gaussian,uniform")
        assert code == 0
        got = {(r["kind"]): (int(r["L1"]), int(r["L2"])) for r in rows(out)}
        assert got == {"exponential": (1, 5), "gaussian": (3, 4), "uniform": (1, 6)}
        assert all(float(r["captured"]) >= 0.9 and r["status"] == "ok" for r in rows(out))
        assert "(1,5)" in err and "(3,4)" in err

    def test_delta(self, capsys):
        code, out, _ = run(capsys, "table1", "--pdp", "delta", "--bandwidth", "1",
                           "--threshold", "0.999", "--min-side", "0")
        assert code == 0
        r = rows(out)[0]
        assert (r["L1"], r["L2"]) == ("0", "0")

    def test_bad_cell_does_not_abort(self, capsys):
        code, out, err = run(capsys, "table1", "--bandwidth", "1", "--kinds",
                             "exponential,trunc_exponential", "--tau-m", "2")
        assert code == 0
        te = [r for r in rows(out) if r["kind"] == "trunc_exponential"][0]
        assert te["status"].startswith("calibration:") and te["L1"] == ""
        assert [r for r in rows(out) if r["kind"] == "exponential"][0]["L2"] == "5"

    def test_json(self, capsys):
        code, out, _ = run(capsys, "table1", "--bandwidth", "1", "--kinds", "gaussian",
                           "--format", "json")
        doc = json.loads(out)
        assert doc["cells"][0]["L1"] == 3 and doc["threshold"] == 0.9


class TestBounds:
    def test_beta_column(self, capsys):
        code, out, _ = run(capsys, "bounds", "--window", "3,6", "--n", "100", "--snr-db", "0")
        assert code == 0
        assert out.splitlines()[0] == "snr_db,beta,bcrb,bcrb_wideband"
        assert float(rows(out)[0]["beta"]) == pytest.approx(0.1, rel=1e-12)

    @pytest.mark.parametrize("kind", ["exponential", "gaussian", "uniform", "trunc_exponential"])
    def test_low_snr_floor(self, capsys, kind):
        code, out, _ = run(capsys, "bounds", "--pdp", kind, "--window", "3,6",
                           "--snr-db=-120,0")
        trace = build_covariance(PdpSpec(kind), TapGrid(1.0, 3, 6)).total_energy
        assert abs(float(rows(out)[0]["bcrb"]) - trace) <= 1e-6 * trace

    @pytest.mark.slow
    def test_bcrb_below_beta_wideband(self, capsys):
        code, out, _ = run(capsys, "bounds", "--bandwidth", "10", "--window", "33,63")
        assert code == 0
        assert all(float(r["bcrb"]) < float(r["beta"]) for r in rows(out))

    def test_auto_window_and_json(self, capsys):
        code, out, _ = run(capsys, "bounds", "--pdp", '{"kind": "gaussian", "tau_ds": 1}',
                           "--snr-db", "10", "--format", "json")
        doc = json.loads(out)
        assert (doc["meta"]["L1"], doc["meta"]["L2"]) == (3, 4)
        assert doc["meta"]["pdp"]["kind"] == "gaussian"

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "b.csv"
        code, out, _ = run(capsys, "bounds", "--window", "1,2", "--snr-db", "0,10",
                           "--out", str(path))
        assert code == 0 and out == ""
        assert len(path.read_text().splitlines()) == 3


class TestSimulate:
    ARGS = ("simulate", "--window", "3,6", "--n", "100", "--trials", "2000", "--seed", "9")

    def test_mmse_tracks_bcrb(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--estimators", "mmse")
        assert code == 0
        for r in rows(out):
            assert abs(float(r["mse"]) - float(r["bound"])) <= 3 * float(r["stderr"])

    def test_noiseless_ls(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--estimators", "ls", "--snr-db", "200")
        assert float(rows(out)[0]["mse"]) < 1e-15

    def test_byte_identical(self, capsys):
        a = run(capsys, *self.ARGS, "--workers", "1")[1]
        b = run(capsys, *self.ARGS, "--workers", "3")[1]
        assert a == b
        assert a.splitlines()[0] == "snr_db,estimator,mse,stderr,trials,theory,bound"

    def test_pilot_file(self, capsys, tmp_path):
        grid = TapGrid(1.0, 3, 6)
        x = gen_pilot("constant_modulus", 100 + grid.L1 + grid.L2, seed=4)
        path = tmp_path / "pilot.csv"
        write_pilot_csv(path, x)
        code, out, _ = run(capsys, *self.ARGS, "--pilot-file", str(path), "--snr-db", "0")
        assert code == 0
        short = tmp_path / "short.csv"
        write_pilot_csv(short, gen_pilot("constant_modulus", 50))
        code, _, err = run(capsys, *self.ARGS, "--pilot-file", str(short))
        assert code == 1 and err.startswith("error: range:")


class TestPilotSpectrum:
    def test_constant_modulus(self, capsys):
        code, out, _ = run(capsys, "pilot-spectrum", "--pilot", "constant_modulus",
                           "--px", "2", "--length", "100000", "--maxlag", "16")
        assert code == 0
        recs = rows(out)
        lag0 = [r for r in recs if r["quantity"] == "lag" and r["x"] == "0"][0]
        assert float(lag0["value"]) == pytest.approx(2.0, rel=1e-12)
        psd = np.array([float(r["value"]) for r in recs if r["quantity"] == "psd"])
        assert np.all(np.abs(psd - 2.0) <= 0.05 * 2.0)

    def test_file_round_trip(self, capsys, tmp_path):
        x = gen_pilot("gaussian_white", 4000, seed=12)
        path = tmp_path / "p.csv"
        write_pilot_csv(path, x)
        a = run(capsys, "pilot-spectrum", "--pilot-file", str(path), "--maxlag", "8")[1]
        b = run(capsys, "pilot-spectrum", "--pilot", "gaussian_white", "--length", "4000",
                "--seed", "12", "--maxlag", "8")[1]
        assert a == b

    def test_maxlag_range(self, capsys):
        code, _, err = run(capsys, "pilot-spectrum", "--length", "10", "--maxlag", "5")
        assert code == 1 and err.startswith("error: range:")


class TestCovariance:
    def test_csv(self, capsys):
        code, out, _ = run(capsys, "covariance", "--pdp", "delta", "--window", "1,1")
        recs = rows(out)
        assert len(recs) == 9
        centre = [r for r in recs if r["l"] == "0" and r["p"] == "0"][0]
        assert float(centre["re"]) == pytest.approx(1.0, abs=1e-8)

    def test_calibration_error_category(self, capsys):
        code, _, err = run(capsys, "covariance", "--pdp", "trunc_exponential", "--tau-m", "1")
        assert code == 1 and err.startswith("error: calibration:")


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "tdlbounds", "--version"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("tdlbounds ")
