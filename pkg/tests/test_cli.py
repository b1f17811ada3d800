"""CLI surface: subcommand output schemas, formatting, exit codes, and
byte-identical reruns."""

import numpy as np
import pytest

from stickdiv.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestClosedForm:
    def test_mean_uncoupled_prints_reported_value(self, capsys):
        code, out, _ = run_cli(
            capsys, "closed-form", "--theta", "5", "--a", "2", "--b", "3",
            "--quantity", "mean-uncoupled",
        )
        assert code == 0
        assert out.strip() == "1.71666667"

    def test_mean_coupled(self, capsys):
        code, out, _ = run_cli(
            capsys, "closed-form", "--theta", "5", "--quantity", "mean-coupled"
        )
        assert code == 0
        assert out.strip() == "0.833333333"

    def test_mean_reversed(self, capsys):
        code, out, _ = run_cli(
            capsys, "closed-form", "--theta", "3", "--a", "2", "--b", "1",
            "--quantity", "mean-reversed", "--tol", "1e-6",
        )
        assert code == 0
        assert abs(float(out.strip()) - 7.0 / 6.0) < 1e-3

    def test_domain_error_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "closed-form", "--theta", "-1", "--quantity", "mean-coupled"
        )
        assert code == 1
        assert "error:" in err

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "cf.csv"
        code, _, _ = run_cli(
            capsys, "closed-form", "--theta", "5", "--quantity", "mean-coupled",
            "--out", str(path),
        )
        assert code == 0
        header, rows = parse_csv(path.read_text())
        assert header == ["quantity", "value"]
        assert rows[0][0] == "mean-coupled"


class TestSeries:
    def test_inverse_rising(self, capsys):
        code, out, _ = run_cli(
            capsys, "series", "--which", "inverse-rising", "--beta", "2", "--nmax", "200"
        )
        assert code == 0
        assert out.strip() == "1"

    def test_quotient_rising_csv(self, capsys, tmp_path):
        path = tmp_path / "series.csv"
        code, out, _ = run_cli(
            capsys, "series", "--which", "quotient-rising", "--beta", "4",
            "--lam", "0.5", "--nmax", "50", "--out", str(path),
        )
        assert code == 0
        assert out.strip() == "2"
        header, rows = parse_csv(path.read_text())
        assert header == ["n", "partial_sum", "closed_form"]
        assert len(rows) == 50
        assert float(rows[-1][2]) == 2.0

    def test_divergent_series_exit_code(self, capsys):
        code, _, err = run_cli(
            capsys, "series", "--which", "inverse-rising", "--beta", "0.5", "--nmax", "10"
        )
        assert code == 1
        assert "diverges" in err


class TestBoundCheck:
    def test_value(self, capsys):
        code, out, _ = run_cli(capsys, "bound-check", "--theta", "1", "--beta", "10")
        assert code == 0
        assert out.strip() == "0.694444444"

    def test_domain_error(self, capsys):
        code, _, err = run_cli(capsys, "bound-check", "--theta", "1", "--beta", "1.5")
        assert code == 1
        assert "beta > theta + 1" in err


class TestSampleWeights:
    def test_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "sample-weights", "--theta", "5", "--trunc", "20", "--seed", "3"
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["n", "v", "w"]
        assert len(rows) == 20
        v = np.array([float(r[1]) for r in rows])
        w = np.array([float(r[2]) for r in rows])
        expected = v * np.concatenate([[1.0], np.cumprod(1.0 - v[:-1])])
        np.testing.assert_allclose(w, expected, rtol=1e-6)

    def test_compare_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "sample-weights", "--theta", "5", "--a", "2", "--b", "3",
            "--trunc", "50", "--seed", "3", "--compare",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["n", "v", "w", "v_cmp", "w_cmp"]
        v_cmp = np.array([float(r[3]) for r in rows])
        w_cmp = np.array([float(r[4]) for r in rows])
        assert np.all(v_cmp == v_cmp[0])
        np.testing.assert_allclose(
            w_cmp, v_cmp[0] * (1 - v_cmp[0]) ** np.arange(50), rtol=1e-6
        )


class TestKlPath:
    def test_cumulative_consistency(self, capsys):
        code, out, _ = run_cli(
            capsys, "kl-path", "--theta", "3", "--a", "2", "--b", "3",
            "--trunc", "30", "--seed", "5",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["n", "term", "cumulative"]
        terms = np.array([float(r[1]) for r in rows])
        cum = np.array([float(r[2]) for r in rows])
        np.testing.assert_allclose(cum, np.cumsum(terms), rtol=1e-6)

    def test_coupled_first_term_zero(self, capsys):
        code, out, _ = run_cli(
            capsys, "kl-path", "--theta", "3", "--coupled", "--trunc", "10", "--seed", "5"
        )
        _, rows = parse_csv(out)
        assert float(rows[0][1]) == 0.0


class TestMcKl:
    def test_schema_and_rerun_bytes(self, capsys, tmp_path):
        args = [
            "mc-kl", "--theta", "5", "--a", "2", "--b", "3", "--reps", "400",
            "--trunc", "50", "--seed", "42",
        ]
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(capsys, *args, "--out", str(p1))[0] == 0
        assert run_cli(capsys, *args, "--out", str(p2))[0] == 0
        b1, b2 = p1.read_bytes(), p2.read_bytes()
        assert b1 == b2
        header, rows = parse_csv(p1.read_text())
        assert header == ["rep", "kl", "cum_mean"]
        assert len(rows) == 400
        kl = np.array([float(r[1]) for r in rows])
        cum = np.array([float(r[2]) for r in rows])
        np.testing.assert_allclose(cum, np.cumsum(kl) / np.arange(1, 401), rtol=1e-6)

    def test_workers_flag_identical_output(self, capsys, tmp_path):
        base = [
            "mc-kl", "--theta", "5", "--a", "2", "--b", "3", "--reps", "600",
            "--trunc", "40", "--seed", "9",
        ]
        files = []
        for w in ("1", "2"):
            path = tmp_path / f"w{w}.csv"
            assert run_cli(capsys, *base, "--workers", w, "--out", str(path))[0] == 0
            files.append(path.read_bytes())
        assert files[0] == files[1]


class TestCurvesCli:
    def test_variance_curve_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "variance-curve", "--thetas", "1,2", "--reps", "500",
            "--trunc", "50", "--seed", "1", "--workers", "1",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["theta", "mc_variance", "closed_form_variance"]
        assert [r[0] for r in rows] == ["1", "2"]

    def test_dtheta_curve_schema_and_empty_bound(self, capsys):
        code, out, _ = run_cli(
            capsys, "dtheta-curve", "--theta", "1", "--betas", "1,10", "--reps", "300",
            "--trunc", "50", "--seed", "1", "--workers", "1",
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["beta", "estimate", "stderr", "upper_bound"]
        assert rows[0][3] == ""  # beta = 1 <= theta + 1: no bound
        assert rows[1][3] != ""

    def test_dtheta_partition_schema(self, capsys):
        code, out, _ = run_cli(
            capsys, "dtheta-partition", "--theta", "0.5", "--beta", "2", "--nmax", "6"
        )
        assert code == 0
        header, rows = parse_csv(out)
        assert header == ["n_level", "level_sum", "cumulative"]
        assert len(rows) == 6
        levels = np.array([float(r[1]) for r in rows])
        cum = np.array([float(r[2]) for r in rows])
        np.testing.assert_allclose(cum, np.cumsum(levels), rtol=1e-8)


class TestArgumentErrors:
    def test_unknown_subcommand(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_missing_required_flag(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["closed-form", "--quantity", "mean-coupled"])
        assert exc.value.code == 2


def test_nine_significant_digits(capsys):
    code, out, _ = run_cli(capsys, "bound-check", "--theta", "1", "--beta", "3.7")
    # theta/(theta+1) * beta^2 / ((beta-1)(beta-2)) = 0.5*13.69/(2.7*1.7)
    assert code == 0
    assert out.strip() == format(0.5 * 3.7**2 / (2.7 * 1.7), ".9g")
