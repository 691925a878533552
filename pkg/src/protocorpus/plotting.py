"""Figures for the stats report, rendered headless to PNG."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .stats import CorpusStats, count_table  # noqa: E402

RC = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    # fixed metadata keeps repeated renders byte-identical
    "svg.hashsalt": "protocorpus",
}


def _save(fig, path: Path) -> Path:
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_age_series(series, path) -> Path:
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 3.2))
        years = sorted(series)
        ax.plot(years, [series[y][0] for y in years], marker="o", ms=3, lw=1.2)
        ax.set_xlabel("year")
        ax.set_ylabel("average speaker age")
        ax.set_title("Average age of speakers")
        if not years:
            ax.text(0.5, 0.5, "no dated speeches", ha="center", va="center",
                    transform=ax.transAxes)
        fig.tight_layout()
        return _save(fig, Path(path))


def plot_counts(counts, path) -> Path:
    header, rows = count_table(counts)
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(7, 0.4 * max(len(rows), 3) + 1.2))
        labels = [r[0] for r in rows]
        left = [0] * len(rows)
        for col, name in enumerate(header[1:], start=1):
            vals = [r[col] for r in rows]
            ax.barh(labels, vals, left=left, label=name)
            left = [a + b for a, b in zip(left, vals)]
        ax.set_xlabel("segments")
        ax.set_title("Segments by parliament, kind and party")
        if rows:
            ax.legend(loc="upper left", bbox_to_anchor=(1.01, 1), frameon=False)
        ax.invert_yaxis()
        fig.tight_layout()
        return _save(fig, Path(path))


def render_all(stats: CorpusStats, out_dir) -> list[Path]:
    out = Path(out_dir)
    return [plot_age_series(stats.age_series, out / "age_series.png"),
            plot_counts(stats.counts, out / "counts.png")]
