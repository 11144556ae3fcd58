import csv
import json
import math

import pytest

from atomembed.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_measure(tmp_path, name, weights, normalized=None):
    doc = {"weights": weights}
    if normalized is not None:
        doc["normalized"] = normalized
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


@pytest.fixture
def binom5(tmp_path):
    return write_measure(tmp_path, "b5.json",
                         ["1/32", "5/32", "5/16", "5/16", "5/32", "1/32"])


@pytest.fixture
def uniform4(tmp_path):
    return write_measure(tmp_path, "u4.json", ["1/4"] * 4)


class TestFamilyCommand:
    def test_binomial_emits_measure_json(self, capsys):
        code, out, _ = run(capsys, "family", "binomial", "--n", "5", "--p", "1/2")
        assert code == 0
        doc = json.loads(out)
        assert doc["weights"] == ["1/32", "5/32", "5/16", "5/16", "5/32", "1/32"]
        assert doc["normalized"] is True

    def test_custom_with_normalize(self, capsys):
        code, out, _ = run(capsys, "family", "custom",
                           "--weights", "2,2,2,2", "--normalize")
        assert code == 0
        assert json.loads(out)["weights"] == ["1/4"] * 4

    def test_missing_parameter(self, capsys):
        code, _, err = run(capsys, "family", "binomial", "--n", "5")
        assert code == 1
        assert "needs" in err

    def test_round_trip_family_check(self, capsys, tmp_path):
        code, out, _ = run(capsys, "family", "binomial", "--n", "5", "--p", "1/2")
        saved = tmp_path / "m.json"
        saved.write_text(out)
        code1, out1, _ = run(capsys, "check", str(saved))
        code2, out2, _ = run(capsys, "check", str(saved))
        assert code1 == code2 == 0
        assert out1 == out2
        assert json.loads(out1)["verdict"] == "not_embeddable"

    def test_piped_family_check_equals_file_check(self, capsys, tmp_path,
                                                  monkeypatch):
        import io

        code, family_out, _ = run(capsys, "family", "binomial", "--n", "4",
                                  "--p", "1/2")
        assert code == 0
        saved = tmp_path / "m.json"
        saved.write_text(family_out)
        _, from_file, _ = run(capsys, "check", str(saved))
        monkeypatch.setattr("sys.stdin", io.StringIO(family_out))
        _, from_pipe, _ = run(capsys, "check", "-")
        assert from_pipe == from_file


class TestCheckAndClassify:
    def test_check_binomial_five(self, capsys, binom5):
        code, out, _ = run(capsys, "check", binom5)
        assert code == 0
        doc = json.loads(out)
        assert doc["flat"] is False
        assert doc["witness"] == [0, 1, 2, 3]
        assert doc["checked_count"] == 22
        assert doc["subset_values"]["0,1,2,3,4,5"] == "-41984/25"

    def test_check_full_set_only(self, capsys, binom5):
        code, out, _ = run(capsys, "check", binom5, "--full-set-only")
        assert code == 0
        assert json.loads(out)["checked_count"] == 3

    def test_classify_uniform(self, capsys, uniform4):
        code, out, _ = run(capsys, "classify", uniform4)
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "embeddable"
        assert doc["dimension"] == 3

    def test_exact_flag_rejects_float_weights(self, capsys, tmp_path):
        path = write_measure(tmp_path, "f.json", [0.1, 0.9])
        code, _, err = run(capsys, "check", path, "--exact")
        assert code == 1
        assert "mode conflict" in err

    def test_indeterminate_exit_code(self, capsys, tmp_path):
        t = 3.0 + 2.0 * math.sqrt(3.0)
        path = write_measure(tmp_path, "b.json", [1.0, 1.0, 1.0, 1.0 / t])
        code, out, _ = run(capsys, "classify", path)
        assert code == 2
        assert json.loads(out)["verdict"] == "indeterminate"

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, err = run(capsys, "check", str(path))
        assert code == 1
        assert "malformed JSON" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "check", "/nonexistent/measure.json")
        assert code == 1
        assert "no such file" in err

    def test_inconsistent_normalized_flag(self, capsys, tmp_path):
        path = write_measure(tmp_path, "n.json", [1, 1], normalized=True)
        code, _, err = run(capsys, "check", path)
        assert code == 1
        assert "normalized" in err


class TestDetCommand:
    def test_all_modes_agree_on_uniform(self, capsys, uniform4):
        code, out, _ = run(capsys, "det", uniform4, "--mode", "all")
        assert code == 0
        doc = json.loads(out)
        assert doc["values"]["closed"] == "1/128"
        assert doc["values"]["numeric"] == "1/128"
        assert doc["values"]["lemma"] == "1/128"
        assert doc["sign"] == "positive"

    def test_subset_selection(self, capsys, binom5):
        code, out, _ = run(capsys, "det", binom5, "--simplex", "0,1,2,3")
        assert code == 0
        doc = json.loads(out)
        assert doc["sign"] == "negative"
        assert doc["criterion"] == "-4096/25"

    def test_boundary_float_exits_two(self, capsys, tmp_path):
        t = 3.0 + 2.0 * math.sqrt(3.0)
        path = write_measure(tmp_path, "b.json", [1.0, 1.0, 1.0, 1.0 / t])
        code, out, _ = run(capsys, "det", path)
        assert code == 2
        assert json.loads(out)["sign"] == "boundary"

    def test_pair_rejected(self, capsys, uniform4):
        code, _, err = run(capsys, "det", uniform4, "--simplex", "0,1")
        assert code == 1
        assert "3 points" in err


class TestEmbedCommand:
    def test_uniform_to_file(self, capsys, uniform4, tmp_path):
        out_csv = tmp_path / "coords.csv"
        code, out, _ = run(capsys, "embed", uniform4, "--out", str(out_csv))
        assert code == 0
        summary = json.loads(out)
        assert summary["dimension"] == 3
        assert summary["max_residual"] <= 1e-8
        with open(out_csv) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["c0", "c1", "c2"]
        assert len(rows) == 5
        pts = [[float(v) for v in row] for row in rows[1:]]
        for i in range(4):
            for j in range(i + 1, 4):
                dist = math.dist(pts[i], pts[j])
                assert abs(dist - 0.5) < 1e-10

    def test_stdout_csv_and_stderr_summary(self, capsys, uniform4):
        code, out, err = run(capsys, "embed", uniform4)
        assert code == 0
        assert out.splitlines()[0] == "c0,c1,c2"
        assert json.loads(err)["dimension"] == 3

    def test_not_flat_is_an_error(self, capsys, binom5):
        code, _, err = run(capsys, "embed", binom5)
        assert code == 1
        assert "witness" in err


class TestSweepCommand:
    def test_binomial_trials_sweep(self, capsys, tmp_path):
        out_csv = tmp_path / "sweep.csv"
        code, out, _ = run(capsys, "sweep", "binomial", "--p", "1/2", "--n", "2",
                           "--param", "n", "--start", "2", "--stop", "5",
                           "--steps", "4", "--out", str(out_csv))
        assert code == 0
        assert json.loads(out) == {
            "rows": 4, "embeddable": 3, "not_embeddable": 1, "indeterminate": 0}
        with open(out_csv) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["parameter", "verdict", "worst_value", "witness"]
        assert [r[1] for r in rows[1:]] == ["E", "E", "E", "N"]
        # the worst subset of binomial(5,1/2) is the full atom set
        assert rows[4][3] == "0|1|2|3|4|5"

    def test_hypergeometric_draws_sweep(self, capsys):
        code, out, err = run(capsys, "sweep", "hypergeometric",
                             "--population", "8", "--successes", "4",
                             "--draws", "2", "--param", "draws",
                             "--start", "1", "--stop", "4", "--steps", "4")
        assert code == 0
        verdicts = [line.split(",")[1] for line in out.splitlines()[1:]]
        assert len(verdicts) == 4
        assert set(verdicts) <= {"E", "N", "I"}
        assert json.loads(err)["rows"] == 4

    def test_unknown_param(self, capsys):
        code, _, err = run(capsys, "sweep", "uniform", "--atoms", "4",
                           "--param", "p", "--start", "1", "--stop", "2",
                           "--steps", "2")
        assert code == 1
        assert "sweep parameter" in err


class TestSampleCommand:
    def test_summary_and_rows(self, capsys, tmp_path):
        rows_csv = tmp_path / "rows.csv"
        code, out, _ = run(capsys, "sample", "--k", "4", "--count", "50",
                           "--seed", "12", "--rows", str(rows_csv))
        assert code == 0
        doc = json.loads(out)
        assert doc["total"] == 50
        assert doc["seed"] == 12
        with open(rows_csv) as fh:
            rows = list(csv.reader(fh))
        assert len(rows) == 51
        assert rows[0][:2] == ["index", "w0"]

    def test_jobs_flag_is_bit_stable(self, capsys, tmp_path):
        csv1, csv2 = tmp_path / "a.csv", tmp_path / "b.csv"
        code1, out1, _ = run(capsys, "sample", "--k", "5", "--count", "120",
                             "--seed", "4", "--jobs", "1", "--rows", str(csv1))
        code2, out2, _ = run(capsys, "sample", "--k", "5", "--count", "120",
                             "--seed", "4", "--jobs", "3", "--rows", str(csv2))
        assert code1 == code2 == 0
        assert out1 == out2
        assert csv1.read_bytes() == csv2.read_bytes()

    def test_seed_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("ATOMEMBED_SEED", "99")
        code, out, _ = run(capsys, "sample", "--k", "4", "--count", "10")
        assert code == 0
        assert json.loads(out)["seed"] == 99

    def test_bad_count(self, capsys):
        code, _, err = run(capsys, "sample", "--k", "4", "--count", "0")
        assert code == 1
        assert "count" in err


class TestBisectCommand:
    def test_uniform_to_binomial(self, capsys, tmp_path, binom5):
        u6 = write_measure(tmp_path, "u6.json", ["1/6"] * 6)
        trace_csv = tmp_path / "trace.csv"
        code, out, _ = run(capsys, "bisect", u6, binom5, "--tol", "1e-6",
                           "--trace", str(trace_csv))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict_low"] == "E"
        assert doc["verdict_high"] == "N"
        assert doc["width"] <= 1e-6
        assert abs(doc["boundary_decimal"] - 0.844821) < 1e-4
        with open(trace_csv) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iteration", "lower", "upper", "midpoint", "verdict"]
        assert len(rows) == doc["iterations"] + 1

    def test_no_crossing(self, capsys, tmp_path, uniform4):
        code, _, err = run(capsys, "bisect", uniform4, uniform4)
        assert code == 1
        assert "nothing to bracket" in err


class TestUsage:
    def test_no_command(self, capsys):
        code, _, err = run(capsys)
        assert code == 1
        assert "command is required" in err

    def test_unknown_flag(self, capsys, uniform4):
        code, _, err = run(capsys, "check", uniform4, "--frobnicate")
        assert code == 1
        assert "frobnicate" in err

    def test_unknown_command(self, capsys):
        code, _, err = run(capsys, "transmogrify")
        assert code == 1
        assert "invalid choice" in err
