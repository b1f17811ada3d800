"""Rendering tests against fixture CSVs shaped like the stickdiv schemas."""

import numpy as np
import pytest
from matplotlib.lines import Line2D

from stickdiv_plots.render import FIGURE_KINDS, SchemaError, build_figure, main, render

FIXTURES = {
    "weights": (
        "n,v,w\n1,0.5,0.5\n2,0.25,0.125\n3,0.5,0.1875\n"
    ),
    "weights_compare": (
        "n,v,w,v_cmp,w_cmp\n1,0.5,0.5,0.4,0.4\n2,0.25,0.125,0.4,0.24\n3,0.5,0.1875,0.4,0.144\n"
    ),
    "convergence": (
        "rep,kl,cum_mean\n" + "\n".join(
            f"{i},{1.5 + 0.1 * ((i * 7) % 3)},{1.7 + 1.0 / i:.6f}" for i in range(1, 200)
        ) + "\n"
    ),
    "variance": (
        "theta,mc_variance,closed_form_variance\n1,1.39,1.3877\n5,0.88,0.8831\n10,0.71,0.7099\n"
    ),
    "dtheta": (
        "beta,estimate,stderr,upper_bound\n"
        "0,0,0,\n1,0.21,0.002,\n3,0.31,0.002,1.125\n10,0.47,0.002,0.694444444\n"
    ),
    "partition": (
        "n_level,level_sum,cumulative\n1,0,0\n2,0.148,0.148\n3,0.06,0.208\n"
    ),
    "series": (
        "n,partial_sum,closed_form\n1,0.5,1\n2,0.666667,1\n3,0.75,1\n"
    ),
}


def write_fixture(tmp_path, name, text=None):
    path = tmp_path / f"{name}.csv"
    path.write_text(text if text is not None else FIXTURES[name])
    return str(path)


@pytest.mark.parametrize("kind", sorted(FIGURE_KINDS))
def test_renders_every_kind(tmp_path, kind):
    fixture = "weights" if kind == "weights" else kind
    csv_path = write_fixture(tmp_path, fixture)
    out = render(csv_path, kind, str(tmp_path / f"{kind}.png"), reference=0.8333)
    data = (tmp_path / f"{kind}.png").read_bytes()
    assert out.endswith(".png")
    assert len(data) > 1000
    assert data[:8] == b"\x89PNG\r\n\x1a\n"


def test_weights_compare_columns(tmp_path):
    csv_path = write_fixture(tmp_path, "weights_compare")
    fig = build_figure(csv_path, "weights")
    labels = [line.get_label() for line in fig.axes[0].lines]
    assert "geometric weights" in labels


def test_reference_line_drawn(tmp_path):
    csv_path = write_fixture(tmp_path, "convergence")
    fig = build_figure(csv_path, "convergence", reference=1.716667)
    ax = fig.axes[0]
    dashed = [
        line for line in ax.get_lines()
        if isinstance(line, Line2D) and line.get_linestyle() == "--"
    ]
    assert dashed, "expected a dashed reference line"
    assert np.allclose(dashed[0].get_ydata(), 1.716667)
    assert dashed[0].get_color() == "red"


def test_no_reference_no_line(tmp_path):
    csv_path = write_fixture(tmp_path, "convergence")
    fig = build_figure(csv_path, "convergence")
    assert all(line.get_linestyle() != "--" for line in fig.axes[0].get_lines())


def test_bound_overlay(tmp_path):
    csv_path = write_fixture(tmp_path, "dtheta")
    fig = build_figure(csv_path, "dtheta", reference=0.5)
    labels = [line.get_label() for line in fig.axes[0].lines]
    assert "upper bound" in labels


def test_schema_mismatch_reports_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("alpha,beta\n1,2\n")
    with pytest.raises(SchemaError) as err:
        build_figure(str(path), "convergence")
    assert "alpha" in str(err.value)
    assert "rep" in str(err.value)


def test_empty_csv_is_schema_error(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("")
    with pytest.raises(SchemaError):
        build_figure(str(path), "weights")


def test_header_only_is_schema_error(tmp_path):
    path = tmp_path / "bare.csv"
    path.write_text("rep,kl,cum_mean\n")
    with pytest.raises(SchemaError):
        build_figure(str(path), "convergence")


def test_unknown_kind(tmp_path):
    csv_path = write_fixture(tmp_path, "series")
    with pytest.raises(SchemaError):
        build_figure(csv_path, "sparkline")


def test_rerender_is_byte_identical(tmp_path):
    csv_path = write_fixture(tmp_path, "variance")
    a = tmp_path / "a.png"
    b = tmp_path / "b.png"
    render(csv_path, "variance", str(a), reference=0.6449)
    render(csv_path, "variance", str(b), reference=0.6449)
    assert a.read_bytes() == b.read_bytes()
    sa = tmp_path / "a.svg"
    sb = tmp_path / "b.svg"
    render(csv_path, "variance", str(sa))
    render(csv_path, "variance", str(sb))
    assert sa.read_bytes() == sb.read_bytes()


class TestCli:
    def test_success(self, tmp_path, capsys):
        csv_path = write_fixture(tmp_path, "convergence")
        out = tmp_path / "fig.png"
        code = main([csv_path, "convergence", str(out), "--reference", "1.716667"])
        assert code == 0
        assert out.exists()
        assert capsys.readouterr().out.strip() == str(out)

    def test_empty_csv_nonzero_exit(self, tmp_path, capsys):
        path = tmp_path / "empty.csv"
        path.write_text("")
        code = main([str(path), "weights", str(tmp_path / "x.png")])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_default_output_name(self, tmp_path, capsys, monkeypatch):
        csv_path = write_fixture(tmp_path, "series")
        monkeypatch.chdir(tmp_path)
        code = main([csv_path, "series"])
        assert code == 0
        assert (tmp_path / "series.png").exists()

    def test_bad_kind_exit_2(self, tmp_path):
        csv_path = write_fixture(tmp_path, "series")
        with pytest.raises(SystemExit) as exc:
            main([csv_path, "nonsense"])
        assert exc.value.code == 2
