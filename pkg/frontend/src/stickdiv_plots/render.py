"""Render figures from stickdiv CSV output.

Each figure kind is tied to one CSV schema produced by the ``stickdiv``
command-line tool; this package only reads those files and never recomputes
any statistic.  Theoretical reference values are supplied by the caller
(``--reference``) and drawn as a red dashed horizontal line.

Rendering is a pure function of the input CSV: a fixed figure size, fixed
dpi, and stripped SVG date metadata make repeated renders byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")
# fixed hash salt keeps SVG element ids, and therefore whole files, reproducible
matplotlib.rcParams["svg.hashsalt"] = "stickdiv"

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["FIGURE_KINDS", "SchemaError", "build_figure", "render", "main"]

FIGSIZE = (8.0, 5.0)
DPI = 110

# figure kind -> exact CSV header (sample-weights may carry the optional
# comparator columns)
FIGURE_KINDS = {
    "weights": ["n", "v", "w"],
    "convergence": ["rep", "kl", "cum_mean"],
    "variance": ["theta", "mc_variance", "closed_form_variance"],
    "dtheta": ["beta", "estimate", "stderr", "upper_bound"],
    "partition": ["n_level", "level_sum", "cumulative"],
    "series": ["n", "partial_sum", "closed_form"],
}

_WEIGHTS_COMPARE = ["n", "v", "w", "v_cmp", "w_cmp"]


class SchemaError(ValueError):
    """Raised when a CSV does not match the expected schema for a kind."""


def _read_csv(path: str, kind: str):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: empty file, expected header {FIGURE_KINDS[kind]}")
    header = rows[0]
    expected = FIGURE_KINDS[kind]
    if kind == "weights":
        if header != expected and header != _WEIGHTS_COMPARE:
            raise SchemaError(
                f"{path}: header {header} does not match {expected} "
                f"(or {_WEIGHTS_COMPARE})"
            )
    elif header != expected:
        raise SchemaError(f"{path}: header {header} does not match {expected}")
    if len(rows) == 1:
        raise SchemaError(f"{path}: no data rows under header {header}")
    columns = {name: [] for name in header}
    for row in rows[1:]:
        if len(row) != len(header):
            raise SchemaError(f"{path}: row {row} does not match header {header}")
        for name, cell in zip(header, row):
            columns[name].append(cell)
    return columns


def _floats(cells):
    return np.array([float(c) for c in cells])


def _draw_reference(ax, reference: float | None):
    if reference is not None:
        ax.axhline(reference, color="red", linestyle="--", linewidth=1.2,
                   label=f"theoretical {reference:g}")


def build_figure(csv_path: str, figure_kind: str, reference: float | None = None):
    """Build the matplotlib Figure for a CSV; raises SchemaError on mismatch."""
    if figure_kind not in FIGURE_KINDS:
        raise SchemaError(
            f"unknown figure kind {figure_kind!r}; choose from {sorted(FIGURE_KINDS)}"
        )
    columns = _read_csv(csv_path, figure_kind)
    fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI)

    if figure_kind == "weights":
        n = _floats(columns["n"])
        ax.plot(n, _floats(columns["w"]), "o-", markersize=3, label="stick-breaking weights")
        if "w_cmp" in columns:
            ax.plot(n, _floats(columns["w_cmp"]), "s-", markersize=3,
                    label="geometric weights")
        ax.set_xlabel("n")
        ax.set_ylabel("weight")
    elif figure_kind == "convergence":
        rep = _floats(columns["rep"])
        ax.plot(rep, _floats(columns["cum_mean"]), linewidth=1.0, label="cumulative mean")
        _draw_reference(ax, reference)
        ax.set_xlabel("replicate")
        ax.set_ylabel("cumulative mean divergence")
    elif figure_kind == "variance":
        theta = _floats(columns["theta"])
        ax.plot(theta, _floats(columns["mc_variance"]), "o-", markersize=3,
                label="sample variance")
        ax.plot(theta, _floats(columns["closed_form_variance"]), "-",
                label="closed form")
        _draw_reference(ax, reference)
        ax.set_xlabel("theta")
        ax.set_ylabel("variance")
    elif figure_kind == "dtheta":
        beta = _floats(columns["beta"])
        estimate = _floats(columns["estimate"])
        stderr = _floats(columns["stderr"])
        ax.errorbar(beta, estimate, yerr=3 * stderr, fmt="o-", markersize=3,
                    linewidth=1.0, label="estimate (3 se)")
        bound_pairs = [
            (b, float(u)) for b, u in zip(beta, columns["upper_bound"]) if u != ""
        ]
        if bound_pairs:
            bx, by = zip(*bound_pairs)
            ax.plot(bx, by, ":", color="black", label="upper bound")
        _draw_reference(ax, reference)
        ax.set_xlabel("beta")
        ax.set_ylabel("expected divergence")
    elif figure_kind == "partition":
        n = _floats(columns["n_level"])
        ax.plot(n, _floats(columns["level_sum"]), "o-", markersize=3, label="level sum")
        ax.plot(n, _floats(columns["cumulative"]), "s-", markersize=3, label="cumulative")
        _draw_reference(ax, reference)
        ax.set_xlabel("level n")
        ax.set_ylabel("contribution")
    else:  # series
        n = _floats(columns["n"])
        ax.plot(n, _floats(columns["partial_sum"]), linewidth=1.0, label="partial sum")
        ax.plot(n, _floats(columns["closed_form"]), "--", color="red", label="closed form")
        ax.set_xlabel("n")
        ax.set_ylabel("value")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def render(csv_path: str, figure_kind: str, out_image_path: str | None = None,
           reference: float | None = None) -> str:
    """Render a CSV to an image file; returns the output path.

    The output defaults to ``<figure_kind>.png``; ``.svg`` extensions switch
    to vector output (with date metadata stripped so reruns are identical).
    """
    out = out_image_path or f"{figure_kind}.png"
    fig = build_figure(csv_path, figure_kind, reference=reference)
    try:
        if out.endswith(".svg"):
            fig.savefig(out, metadata={"Date": None})
        else:
            fig.savefig(out)
    finally:
        plt.close(fig)
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stickdiv-plot",
        description="Render a stickdiv CSV as a figure",
    )
    parser.add_argument("csv_path")
    parser.add_argument("figure_kind", choices=sorted(FIGURE_KINDS))
    parser.add_argument("out_image_path", nargs="?", default=None)
    parser.add_argument("--reference", type=float, default=None,
                        help="theoretical value for the red dashed line")
    args = parser.parse_args(argv)
    try:
        out = render(args.csv_path, args.figure_kind, args.out_image_path,
                     reference=args.reference)
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
