"""Figure layouts for the scenario time series.

Each layout mirrors one reference figure: population traces with insets,
concurrence/g2 overlays with peak markers, storage-comparison decay curves,
symmetric-coupling and CW-pump panels.  Rendering is deterministic for fixed
inputs and style.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from scipy.signal import find_peaks

from .csvio import SeriesFile, flat_top_envelope, read_series

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")

PEAK_PROMINENCE_FRACTION = 0.05

_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
}


@dataclass
class FigureSpec:
    """What to render: figure id, input CSVs, output path, style options."""

    figure: str
    csv_paths: tuple
    out_path: str
    log_y: bool = False
    insets: bool = True

    def __post_init__(self):
        if self.figure not in FIGURE_IDS:
            raise ValueError(f"unknown figure id {self.figure!r}; "
                             f"expected one of {FIGURE_IDS}")
        if not self.csv_paths:
            raise ValueError("at least one CSV path is required")


def concurrence_peak_times(series):
    """Times of the concurrence maxima (5% prominence), the marker positions."""
    c = series["C"]
    ok = np.isfinite(c)
    t, c = series.times[ok], c[ok]
    if len(c) < 3:
        return np.array([])
    rng = float(c.max() - c.min())
    if rng <= 0:
        return np.array([])
    idx, _ = find_peaks(c, prominence=PEAK_PROMINENCE_FRACTION * rng)
    return t[idx]


def render(spec):
    """Render the figure; returns (out_path, info dict with marker times)."""
    series = [read_series(p) for p in spec.csv_paths]
    with plt.rc_context(_RC):
        fn = _LAYOUTS[spec.figure]
        fig, info = fn(spec, series)
        fig.savefig(spec.out_path, metadata={"Software": "figkit"})
        plt.close(fig)
    return spec.out_path, info


def _empty_guard(ax, series):
    if series.n_rows == 0:
        ax.annotate("no data rows in CSV", xy=(0.5, 0.5),
                    xycoords="axes fraction", ha="center", color="crimson")
        return True
    return False


def _plot_g2_with_markers(ax, series, marker_times):
    t = series.times
    ax.plot(t, series["g2_12"], color="tab:red", label=r"$g^{(2)}_{12}$")
    g2 = series["g2_12"]
    for i, tm in enumerate(marker_times):
        y = np.interp(tm, t[np.isfinite(g2)], g2[np.isfinite(g2)]) if np.isfinite(g2).any() else 0.0
        ax.annotate("", xy=(tm, y), xytext=(tm, y + 0.25 * max(1.0, np.nanmax(g2) if np.isfinite(g2).any() else 1.0)),
                    arrowprops=dict(arrowstyle="->", color="black", lw=0.8))
    ax.set_xlabel("t (fs)")
    ax.set_ylabel(r"$g^{(2)}$")


def _layout_fig2(spec, series_list):
    s = series_list[0]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    info = {"marker_times_fs": []}
    if _empty_guard(ax, s):
        return fig, info
    t = s.times
    ax.plot(t, s["C"], "k-", label="C")
    for col, color in (("g2_11", "tab:blue"), ("g2_22", "tab:green"),
                       ("g2_12", "tab:red")):
        ax.plot(t, s[col], color=color, label=col.replace("g2_", r"$g^{(2)}_{") + "}$")
    ax.set_xlabel("t (fs)")
    ax.set_ylabel(r"C, $g^{(2)}$")
    if spec.log_y:
        ax.set_yscale("log")
    ax.legend(loc="upper right", fontsize=7)
    if spec.insets:
        ins = ax.inset_axes([0.55, 0.45, 0.4, 0.3])
        ins.plot(t, s["n_qd1"], label="QD1")
        ins.plot(t, s["n_qd2"], label="QD2")
        ins.set_xlabel("t (fs)", fontsize=6)
        ins.set_ylabel("n", fontsize=6)
        ins.tick_params(labelsize=6)
    return fig, info


def _layout_fig3(spec, series_list):
    s = series_list[0]
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    info = {"marker_times_fs": []}
    if _empty_guard(ax_a, s):
        return fig, info
    t = s.times
    for col, label in (("n_qd1", "QD1"), ("n_qd2", "QD2"),
                       ("n_cav1", "cavity 1"), ("n_cav2", "cavity 2")):
        ax_a.plot(t, s[col], label=label)
    ax_a.set_xlabel("t (fs)")
    ax_a.set_ylabel("population")
    ax_a.legend(fontsize=7)
    if spec.insets:
        ins = ax_a.inset_axes([0.55, 0.6, 0.4, 0.3])
        ins.plot(t, s["n_total"], "k-")
        ins.set_ylabel("n total", fontsize=6)
        ins.tick_params(labelsize=6)

    marker_times = concurrence_peak_times(s)
    info["marker_times_fs"] = [float(x) for x in marker_times]
    ax_b.plot(t, s["C"], "k-", label="C")
    _plot_g2_with_markers(ax_b, s, marker_times)
    if spec.insets:
        ins_b = ax_b.inset_axes([0.12, 0.6, 0.35, 0.3])
        ins_b.plot(t, s["g2_11"], color="tab:blue")
        ins_b.plot(t, s["g2_22"], color="tab:green")
        ins_b.tick_params(labelsize=6)
    ax_b.legend(fontsize=7)
    return fig, info


def _layout_fig4(spec, series_list):
    s = series_list[0]
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    info = {"marker_times_fs": []}
    if _empty_guard(ax_a, s):
        return fig, info
    t = s.times
    ax_a.plot(t, s["C_ph"], label=r"$C_{ph}$")
    ax_a.plot(t, s["C_tot"], label=r"$C_{tot}$")
    ax_a.plot(t, s["F2"], label=r"$F^2$")
    ax_a.set_xlabel("t (fs)")
    ax_a.legend(fontsize=7)

    marker_times = concurrence_peak_times(s)
    info["marker_times_fs"] = [float(x) for x in marker_times]
    _plot_g2_with_markers(ax_b, s, marker_times)
    return fig, info


def _layout_fig5(spec, series_list):
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    info = {"marker_times_fs": []}
    if _empty_guard(ax, series_list[0]):
        return fig, info
    labels = ("with cavities", "open geometry")
    for s, label in zip(series_list, labels):
        ax.plot(s.times, s["C"], label=f"{label} ({s.config.get('scenario', '?')})")
    ax.set_xlabel("t (fs)")
    ax.set_ylabel("C")
    if spec.log_y:
        ax.set_yscale("log")
    ax.legend(fontsize=7)
    return fig, info


def _layout_fig6(spec, series_list):
    s = series_list[0]
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    info = {"marker_times_fs": []}
    if _empty_guard(ax, s):
        return fig, info
    t = s.times
    for col, label in (("n_qd1", "QD1"), ("n_qd2", "QD2")):
        ax.plot(t, s[col], label=label)
    ax.set_xlabel("t (fs)")
    ax.set_ylabel("population")
    ax.legend(fontsize=7)
    if spec.insets:
        ins = ax.inset_axes([0.55, 0.55, 0.4, 0.35])
        ins.plot(t, s["C"], "k-", label="C")
        ins.plot(t, s["g2_12"], color="tab:red")
        ins.tick_params(labelsize=6)
        ins.set_ylabel(r"C, $g^{(2)}_{12}$", fontsize=6)
    return fig, info


def _layout_fig7(spec, series_list):
    s = series_list[0]
    fig, (ax_a, ax_b) = plt.subplots(1, 2, figsize=(8.4, 3.4))
    info = {"marker_times_fs": []}
    if _empty_guard(ax_a, s):
        return fig, info
    t = s.times
    ax_a.plot(t, s["n_qd1"], label="QD1")
    ax_a.plot(t, s["n_qd2"], label="QD2")
    ax_a.set_xlabel("t (fs)")
    ax_a.set_ylabel("population")
    ax_b.plot(t, s["C"], "k-", label="C")
    ax_b.plot(t, s["g2_12"], color="tab:red", label=r"$g^{(2)}_{12}$")
    ax_b.set_xlabel("t (fs)")
    if s.config.get("pulse_shape") == "flat_top":
        env = flat_top_envelope(s.config, t)
        for ax in (ax_a, ax_b):
            twin = ax.twinx()
            twin.plot(t, env, color="orange", alpha=0.7, lw=1.0)
            twin.set_yticks([])
    ax_a.legend(fontsize=7)
    ax_b.legend(fontsize=7, loc="upper left")
    return fig, info


_LAYOUTS = {
    "fig2": _layout_fig2,
    "fig3": _layout_fig3,
    "fig4": _layout_fig4,
    "fig5": _layout_fig5,
    "fig6": _layout_fig6,
    "fig7": _layout_fig7,
}
