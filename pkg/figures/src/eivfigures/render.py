"""Panel rendering from experiment CSVs.

Each public function reads one or two CSV files and writes SVG panels:

* ``render_grouped_summary``: per-group replicate scatter plus a median
  bar, one panel per statistic column (largest/smallest standard-error
  eigenvalue, multivariate effective sample size).
* ``render_acf``: one autocorrelation panel per parameter column.

Rendering is a pure function of the input files: group order is the
order of first appearance, axis limits come from the data extents with a
fixed 5% pad, and nothing is recomputed from chains.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

# byte-identical SVG across runs: fixed element-id salt, text kept as
# text (not paths), no embedded creation date (see _savefig)
plt.rcParams["svg.hashsalt"] = "eivfigures"
plt.rcParams["svg.fonttype"] = "none"


def _savefig(fig, out: Path) -> None:
    fig.savefig(out, format="svg", metadata={"Date": None})


class ColumnError(KeyError):
    """An expected column is missing from an input CSV."""


def read_csv(path: Path) -> list[dict]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {path}")
    lines = [l for l in path.read_text().splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(lines))
    if not rows:
        raise ColumnError(f"{path}: no data rows")
    return rows


def column(rows: list[dict], name: str, path: Path) -> list[float]:
    if name not in rows[0]:
        raise ColumnError(
            f"{path}: missing column {name!r} (found: {sorted(rows[0])})"
        )
    return [float(r[name]) for r in rows]


def _groups(rows: list[dict], key: str, path: Path) -> list[str]:
    if key not in rows[0]:
        raise ColumnError(
            f"{path}: missing grouping column {key!r} (found: {sorted(rows[0])})"
        )
    seen: list[str] = []
    for r in rows:
        if r[key] not in seen:
            seen.append(r[key])
    return seen


def _padded_limits(values: list[float]) -> tuple[float, float]:
    lo, hi = min(values), max(values)
    pad = 0.05 * (hi - lo) if hi > lo else 0.05 * abs(hi) + 1e-12
    return lo - pad, hi + pad


# statistic column -> (panel slug, y-axis label, log scale)
SUMMARY_PANELS = {
    "se_sqrt_eig_max": ("se_max", "largest SE eigenvalue (sqrt)", True),
    "se_sqrt_eig_min": ("se_min", "smallest SE eigenvalue (sqrt)", True),
    "mess": ("mess", "multivariate ESS", False),
}


def render_grouped_summary(
    summary_path: Path, out_dir: Path, group_key: str, stem: str
) -> list[Path]:
    """Three panels from a replicate summary CSV, grouped by ``group_key``."""
    summary_path, out_dir = Path(summary_path), Path(out_dir)
    rows = read_csv(summary_path)
    groups = _groups(rows, group_key, summary_path)
    written = []
    for col, (slug, ylabel, log) in SUMMARY_PANELS.items():
        values = column(rows, col, summary_path)
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        medians = []
        for gi, grp in enumerate(groups):
            ys = [v for r, v in zip(rows, values) if r[group_key] == grp]
            ax.scatter([gi] * len(ys), ys, s=18, alpha=0.7, zorder=3,
                       label=None)
            med = sorted(ys)[len(ys) // 2] if len(ys) % 2 else 0.5 * (
                sorted(ys)[len(ys) // 2 - 1] + sorted(ys)[len(ys) // 2])
            medians.append(med)
            ax.hlines(med, gi - 0.25, gi + 0.25, color="black", zorder=4)
        ax.set_xticks(range(len(groups)), groups)
        ax.set_xlabel(group_key)
        ax.set_ylabel(ylabel)
        if log and min(values) > 0:
            ax.set_yscale("log")
        else:
            ax.set_ylim(*_padded_limits(values))
        ax.set_xlim(-0.5, len(groups) - 0.5)
        fig.tight_layout()
        out = out_dir / f"{stem}_{slug}.svg"
        _savefig(fig, out)
        plt.close(fig)
        written.append(out)
    return written


def render_acf(acf_path: Path, out_dir: Path, params: list[str], stem: str) -> list[Path]:
    """One autocorrelation panel per parameter column in an ACF CSV."""
    acf_path, out_dir = Path(acf_path), Path(out_dir)
    rows = read_csv(acf_path)
    lags = column(rows, "lag", acf_path)
    written = []
    for param in params:
        vals = column(rows, param, acf_path)
        fig, ax = plt.subplots(figsize=(4.0, 3.0))
        markerline, stemlines, base = ax.stem(lags, vals)
        plt.setp(markerline, markersize=3)
        ax.axhline(0.0, color="gray", linewidth=0.8)
        ax.set_xlim(min(lags) - 0.5, max(lags) + 0.5)
        ax.set_ylim(*_padded_limits(vals + [0.0, 1.0]))
        ax.set_xlabel("lag")
        ax.set_ylabel(f"autocorrelation of {param}")
        fig.tight_layout()
        out = out_dir / f"{stem}_acf_{param}.svg"
        _savefig(fig, out)
        plt.close(fig)
        written.append(out)
    return written


def render_fig1(in_dir: Path, out_dir: Path) -> list[Path]:
    return render_grouped_summary(
        Path(in_dir) / "fig1_summary.csv", out_dir, "config", "fig1")


def render_fig2(in_dir: Path, out_dir: Path) -> list[Path]:
    return render_grouped_summary(
        Path(in_dir) / "fig2_summary.csv", out_dir, "df", "fig2")


def render_fig3(in_dir: Path, out_dir: Path) -> list[Path]:
    return render_acf(
        Path(in_dir) / "fig3_acf.csv", out_dir,
        ["alpha", "beta", "sigma2"], "fig3")


RENDERERS = {"fig1": render_fig1, "fig2": render_fig2, "fig3": render_fig3}
