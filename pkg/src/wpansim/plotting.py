"""Matplotlib figures written next to the metric CSVs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .metrics import SampleRow  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.grid": True,
    "grid.alpha": 0.3,
}

MODE_STYLE = {False: ("-", "no ACK"), True: ("--", "ACK")}


def _minutes(series: list[SampleRow]) -> list[float]:
    return [row.t / 60e6 for row in series]


def plot_run(series_by_mode: dict[bool, list[SampleRow]], path: str | Path,
             title: str = "") -> Path:
    """Delay on the left axis, throughput and load on the right, per ACK mode."""
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        rates_ax = ax.twinx()
        for ack, series in sorted(series_by_mode.items()):
            ls, name = MODE_STYLE[ack]
            x = _minutes(series)
            ax.plot(x, [r.delay_s for r in series], ls, color="C3", marker="o", ms=3,
                    label=f"delay ({name})")
            rates_ax.plot(x, [r.throughput_bps for r in series], ls, color="C0",
                          label=f"throughput ({name})")
            rates_ax.plot(x, [r.load_bps for r in series], ls, color="C2",
                          label=f"load ({name})")
        ax.set_xlabel("time (min)")
        ax.set_ylabel("delay (s)")
        rates_ax.set_ylabel("bit/s")
        rates_ax.grid(False)
        handles = ax.get_legend_handles_labels()
        more = rates_ax.get_legend_handles_labels()
        ax.legend(handles[0] + more[0], handles[1] + more[1], loc="best")
        if title:
            ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return path


def plot_e2e(series_by_rate: dict[int, list[SampleRow]], path: str | Path,
             title: str = "End-to-end delay") -> Path:
    path = Path(path)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        for rate, series in sorted(series_by_rate.items()):
            ax.plot(_minutes(series), [r.e2e_delay_s for r in series], marker="o", ms=3,
                    label=f"{rate // 1000} kbps")
        ax.set_xlabel("time (min)")
        ax.set_ylabel("end-to-end delay (s)")
        ax.set_yscale("symlog", linthresh=1e-3)
        ax.legend()
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=120)
        plt.close(fig)
    return path
