"""Text outputs: run metadata sidecars, the sweep summary table, gnuplot scripts."""

from __future__ import annotations

import json
from pathlib import Path

from . import __version__
from .metrics import SampleRow, fmt_sig
from .simulation import SimulationResult

MODE_NAMES = {False: "noack", True: "ack"}


def cell_name(rate: int, ack: bool) -> str:
    return f"rate{rate}_{MODE_NAMES[ack]}"


def meta_path(csv_path: str | Path) -> Path:
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


def run_metadata(result: SimulationResult) -> dict:
    cfg = result.config
    done = result.completed_services()
    mean = result.mean_service_time_us()
    m = result.metrics
    return {
        "version": __version__,
        "config": cfg.as_sections(),
        "events_processed": result.summary.events_processed,
        "packets_generated": m.packets_submitted,
        "packets_delivered": m.packets_delivered,
        "drops": dict(sorted(m.drops.items())),
        "conservation": result.conservation,
        "channel": result.counters,
        "service_count": len(done),
        "service_time_mean_us": mean,
    }


def write_metadata(result: SimulationResult, path: str | Path) -> None:
    Path(path).write_text(json.dumps(run_metadata(result), indent=2, sort_keys=True) + "\n")


def _minutes(t_us: int) -> str:
    return fmt_sig(t_us / 60_000_000, 6)


def summary_table(cells: dict[tuple[int, bool], list[SampleRow]]) -> str:
    """One block per ACK mode, metric groups side by side per rate."""
    rates = sorted({rate for rate, _ in cells})
    modes = [ack for ack in (False, True) if any((r, ack) in cells for r in rates)]
    groups = [("Delay(s)", lambda r: fmt_sig(r.delay_s)),
              ("Throughput(bps)", lambda r: f"{r.throughput_bps:.0f}"),
              ("Load(bps)", lambda r: f"{r.load_bps:.0f}"),
              ("E2E delay(s)", lambda r: fmt_sig(r.e2e_delay_s))]
    out = []
    for ack in modes:
        present = [r for r in rates if (r, ack) in cells]
        header1 = ["Time(min)"] + [g for g, _ in groups for _ in present]
        header2 = [""] + [f"{r // 1000}k" for _ in groups for r in present]
        body = []
        n = max(len(cells[(r, ack)]) for r in present)
        for i in range(n):
            rows = [cells[(r, ack)][i] if i < len(cells[(r, ack)]) else None for r in present]
            t = next(row.t for row in rows if row is not None)
            line = [_minutes(t)]
            for _, fn in groups:
                line += [fn(row) if row is not None else "" for row in rows]
            body.append(line)
        table = [header1, header2] + body
        widths = [max(len(row[c]) for row in table) for c in range(len(header1))]
        out.append(f"mode: {'ACK' if ack else 'no-ACK'}")
        for row in table:
            out.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip())
        out.append("")
    return "\n".join(out)


def gnuplot_script(csv_files: dict[str, str], title: str = "") -> str:
    """Script plotting delay, throughput and load from each listed CSV.

    ``csv_files`` maps a legend label to a CSV path (relative to the script).
    """
    lines = [
        "# gnuplot script; run with: gnuplot <this file>",
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set terminal pngcairo size 900,600",
        "set xlabel 'time (s)'",
        "set grid",
    ]
    panels = [("delay", 2, "delay (s)"), ("throughput", 3, "throughput (bit/s)"),
              ("load", 4, "load (bit/s)"), ("e2e", 5, "end-to-end delay (s)")]
    for name, col, ylabel in panels:
        lines.append(f"set output '{name}.png'")
        lines.append(f"set ylabel '{ylabel}'")
        lines.append(f"set title '{title} {ylabel}'".rstrip())
        parts = [f"'{path}' using 1:{col} with linespoints title '{label}'"
                 for label, path in csv_files.items()]
        lines.append("plot " + ", \\\n     ".join(parts))
    return "\n".join(lines) + "\n"
