"""Command-line entry point: ``wpansim simulate|sweep|analyze|compare|version``.

Exit codes: 0 success, 1 nothing to report, 2 configuration or parameter
error, 3 internal invariant violation (recent events dumped to stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, analytics
from .config import ConfigError, ScenarioConfig, resolve_config
from .core import RATES_BPS, US_PER_S, InvariantViolation
from .engine import SchedulingInPast
from .metrics import series_to_csv
from .report import cell_name, gnuplot_script, meta_path, run_metadata, summary_table
from .simulation import Simulation, cell_seed

EXIT_OK, EXIT_EMPTY, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="config file or bundled scenario name "
                   "(table3, paper-match)")
    p.add_argument("--ack", dest="ack", action="store_true", default=None)
    p.add_argument("--no-ack", dest="ack", action="store_false")
    p.add_argument("--seed", type=int, help="base seed (unsigned 64-bit)")
    p.add_argument("--duration", type=float, help="simulated seconds")
    p.add_argument("--sample-interval", type=float, help="seconds between samples")
    p.add_argument("--devices", type=int, help="number of end devices")
    p.add_argument("--accounting", choices=("payload", "ppdu"))
    p.add_argument("--emit-plots", action="store_true",
                   help="write a gnuplot script and PNG figures next to the CSVs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wpansim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one scenario and write its metric CSV")
    _add_scenario_args(p)
    p.add_argument("--rate", type=int, help="data rate in bit/s")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.add_argument("--trace", help="write the event trace to this file")

    p = sub.add_parser("sweep", help="run every (rate, ACK mode) cell")
    _add_scenario_args(p)
    p.add_argument("--rates", default=",".join(map(str, RATES_BPS)),
                   help="comma-separated rates in bit/s")
    p.add_argument("--modes", default="noack,ack", help="comma-separated: noack, ack")
    p.add_argument("--outdir", default="sweep-out")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")

    p = sub.add_parser("analyze", help="evaluate the closed-form model")
    p.add_argument("--rate", type=int, default=250_000)
    p.add_argument("--payload", type=int, default=114)
    p.add_argument("--devices", type=int, default=10)
    p.add_argument("--be", type=int, default=3)
    p.add_argument("--be-max", type=int, default=5)
    p.add_argument("--bo-slots", type=float, default=3)
    p.add_argument("--ack", dest="ack", action="store_true", default=False)
    p.add_argument("--no-ack", dest="ack", action="store_false")

    p = sub.add_parser("compare", help="simulated service time vs the closed form")
    p.add_argument("--csv", required=True, help="CSV written by `simulate --out`")
    p.add_argument("--meta", help="run metadata (default: <csv stem>.meta.json)")
    p.add_argument("--rate", type=int)
    p.add_argument("--payload", type=int)
    p.add_argument("--ack", dest="ack", action="store_true", default=None)
    p.add_argument("--no-ack", dest="ack", action="store_false")

    sub.add_parser("version", help="print the version")
    return parser


def scenario_from_args(args) -> ScenarioConfig:
    cfg = resolve_config(args.config)
    phy, mac, run, net = {}, {}, {}, {}
    if getattr(args, "rate", None) is not None:
        phy["data_rate_bps"] = args.rate
    if args.ack is not None:
        mac["ack_enabled"] = args.ack
    if args.seed is not None:
        run["base_seed"] = args.seed
    if args.duration is not None:
        run["duration_s"] = args.duration
        if args.sample_interval is None and args.duration < cfg.run.sample_interval_s:
            run["sample_interval_s"] = args.duration
    if args.sample_interval is not None:
        run["sample_interval_s"] = args.sample_interval
    if args.accounting is not None:
        run["accounting"] = args.accounting
    if args.devices is not None:
        net["n_end_devices"] = args.devices
    sections = {k: v for k, v in (("phy", phy), ("mac", mac), ("run", run),
                                   ("network", net)) if v}
    return cfg.replace(**sections) if sections else cfg


def run_cell(cfg: ScenarioConfig, trace=None):
    sim = Simulation(cfg, trace=trace)
    try:
        result = sim.run()
    except (InvariantViolation, SchedulingInPast, AssertionError) as exc:
        raise CellFailure(str(exc), sim.engine.dump_recent()) from exc
    return result


class CellFailure(Exception):
    def __init__(self, message: str, recent: str):
        super().__init__(message)
        self.recent = recent


def _sweep_worker(cfg: ScenarioConfig):
    result = run_cell(cfg)
    return series_to_csv(result.series), run_metadata(result), result.series


def cmd_simulate(args) -> int:
    cfg = scenario_from_args(args)
    trace_path = args.trace
    if trace_path is None and cfg.run.trace_enabled:
        trace_path = (Path(args.out).with_suffix(".trace.tsv") if args.out
                      else "wpansim.trace.tsv")
    trace = open(trace_path, "w", newline="\n") if trace_path else None
    try:
        result = run_cell(cfg, trace)
    finally:
        if trace is not None:
            trace.close()
    csv_text = result.csv()
    if args.out:
        out = Path(args.out)
        out.write_text(csv_text)
        meta_path(out).write_text(json.dumps(run_metadata(result), indent=2,
                                             sort_keys=True) + "\n")
        if args.emit_plots:
            from .plotting import plot_run

            stem = out.stem
            (out.parent / f"{stem}.gp").write_text(
                gnuplot_script({stem: out.name}, title=stem))
            plot_run({cfg.mac.ack_enabled: result.series}, out.parent / f"{stem}.png",
                     title=f"{cfg.phy.data_rate_bps // 1000} kbps")
    else:
        sys.stdout.write(csv_text)
    return EXIT_OK


def _parse_modes(text: str) -> list[bool]:
    modes = []
    for tok in filter(None, (t.strip() for t in text.split(","))):
        if tok not in ("ack", "noack"):
            raise UsageError(f"--modes: unknown mode {tok!r}")
        modes.append(tok == "ack")
    if not modes:
        raise UsageError("--modes: empty")
    return modes


def _parse_rates(text: str) -> list[int]:
    try:
        rates = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"--rates: cannot parse {text!r}") from None
    if not rates or any(r <= 0 for r in rates):
        raise UsageError("--rates: need positive rates")
    return rates


def cmd_sweep(args) -> int:
    base = scenario_from_args(args)
    rates = _parse_rates(args.rates)
    modes = _parse_modes(args.modes)
    cells = {}
    for rate in rates:
        for ack in modes:
            cells[(rate, ack)] = base.replace(
                phy={"data_rate_bps": rate}, mac={"ack_enabled": ack},
                run={"base_seed": cell_seed(base.run.base_seed, rate)})
    keys = list(cells)
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            outputs = list(pool.map(_sweep_worker, [cells[k] for k in keys]))
    else:
        outputs = [_sweep_worker(cells[k]) for k in keys]

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    series = {}
    for key, (csv_text, meta, rows) in zip(keys, outputs):
        name = cell_name(*key)
        (outdir / f"{name}.csv").write_text(csv_text)
        (outdir / f"{name}.meta.json").write_text(json.dumps(meta, indent=2,
                                                             sort_keys=True) + "\n")
        series[key] = rows
    summary = summary_table(series)
    (outdir / "summary.txt").write_text(summary)
    sys.stdout.write(summary)
    if args.emit_plots:
        from .plotting import plot_e2e, plot_run

        csvs = {cell_name(*k): f"{cell_name(*k)}.csv" for k in keys}
        (outdir / "plots.gp").write_text(gnuplot_script(csvs, title="sweep"))
        for rate in rates:
            plot_run({ack: series[(rate, ack)] for ack in modes},
                     outdir / f"fig_rate{rate}.png", title=f"{rate // 1000} kbps")
        for ack in modes:
            plot_e2e({rate: series[(rate, ack)] for rate in rates},
                     outdir / f"fig_e2e_{'ack' if ack else 'noack'}.png")
    return EXIT_OK


def _fmt(x: float) -> str:
    return f"{x:.10g}"


def cmd_analyze(args) -> int:
    from .core import MacParams, PhyParams

    try:
        phy = PhyParams(data_rate_bps=args.rate)
        mac = MacParams(ack_enabled=args.ack)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    br = analytics.transaction_delay(args.bo_slots, args.payload, args.ack, phy, mac)
    model = analytics.ContentionModel(args.devices, args.be)
    lines = [
        ("t_bo_s", br.t_bo), ("t_data_s", br.t_data), ("t_ta_s", br.t_ta),
        ("t_ack_s", br.t_ack), ("t_ifs_s", br.t_ifs), ("total_s", br.total),
        ("total_ms", br.total * 1e3),
        ("p_backoff_period", analytics.p_backoff_period(args.be)),
        ("p_success_slot", analytics.p_success_slot(model)),
        ("p_time_delay_event", analytics.p_time_delay_event(model, be_max=args.be_max)),
    ]
    out = [f"{k} = {_fmt(v)}" for k, v in lines]
    try:
        etd = _fmt(analytics.expected_time_delay(model, be_max=args.be_max))
    except analytics.DomainError as exc:
        etd = f"undefined ({exc})"
    out.append(f"expected_time_delay_slots = {etd}")
    print("\n".join(out))
    return EXIT_OK


def cmd_compare(args) -> int:
    from .core import MacParams, PhyParams

    mpath = Path(args.meta) if args.meta else meta_path(args.csv)
    if not Path(args.csv).is_file():
        raise UsageError(f"--csv: no such file {args.csv}")
    if not mpath.is_file():
        raise UsageError(f"missing run metadata {mpath}")
    meta = json.loads(mpath.read_text())
    sections = meta["config"]
    phy_cfg, mac_cfg = sections["phy"], sections["mac"]
    if sections["network"]["n_end_devices"] != 1:
        raise UsageError("compare needs a single end-device run")
    checks = (("rate", args.rate, phy_cfg["data_rate_bps"]),
              ("payload", args.payload, sections["traffic"]["payload_bytes"]),
              ("ack", args.ack, mac_cfg["ack_enabled"]))
    for flag, given, recorded in checks:
        if given is not None and given != recorded:
            raise UsageError(f"--{flag}={given} does not match the run ({recorded})")
    if not meta.get("service_count"):
        print("no samples: the run completed no packet transactions")
        return EXIT_EMPTY
    phy = PhyParams(**phy_cfg)
    mac = MacParams(**mac_cfg)
    predicted = analytics.expected_service_time(sections["traffic"]["payload_bytes"],
                                                phy, mac)
    simulated = meta["service_time_mean_us"] / US_PER_S
    rel = abs(simulated - predicted) / predicted
    print(f"packets = {meta['service_count']}")
    print(f"simulated_service_time_s = {_fmt(simulated)}")
    print(f"predicted_service_time_s = {_fmt(predicted)}")
    print(f"relative_error = {_fmt(rel)}")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "compare": cmd_compare,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"wpansim {__version__}")
        return EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UsageError, analytics.DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CellFailure as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        print("recent events:", file=sys.stderr)
        print(exc.recent, file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
