"""Load, throughput and delay accounting sampled as cumulative averages.

Load counts bits handed to any MAC by the upper layers; throughput counts
bits the coordinator MAC forwards upward. Both are cumulative averages over
elapsed simulated time, and delays are running means over delivered frames.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field

from .core import US_PER_S, Frame, InvariantViolation, MacParams, PhyParams, data_ppdu_bits
from .engine import Event

CSV_HEADER = "time_s,delay_s,throughput_bps,load_bps,e2e_delay_s"

ACCOUNTING_MODES = ("payload", "ppdu")


@dataclass(frozen=True)
class SampleRow:
    t: int  # us
    delay_s: float
    throughput_bps: float
    load_bps: float
    e2e_delay_s: float

    @property
    def time_s(self) -> float:
        return self.t / US_PER_S


@dataclass
class Metrics:
    phy: PhyParams
    mac: MacParams
    accounting: str = "payload"
    label: str = "metrics"

    bits_submitted: int = 0
    bits_delivered: int = 0
    packets_submitted: int = 0
    packets_delivered: int = 0
    packets_lost: int = 0
    delay_sum_us: int = 0
    e2e_sum_us: int = 0
    drops: dict = field(default_factory=dict)
    series: list[SampleRow] = field(default_factory=list)
    delivered_ids: set[int] = field(default_factory=set)
    lost_ids: set[int] = field(default_factory=set)
    dropped_ids: set[int] = field(default_factory=set)
    keep_delays: bool = False
    delays_us: list[int] = field(default_factory=list)

    def __post_init__(self):
        if self.accounting not in ACCOUNTING_MODES:
            raise ValueError(f"accounting must be one of {ACCOUNTING_MODES}")

    def frame_bits(self, frame: Frame) -> int:
        if self.accounting == "payload":
            return 8 * frame.payload_bytes
        return data_ppdu_bits(frame.payload_bytes, self.phy, self.mac)

    def record_submit(self, frame: Frame, now: int) -> None:
        self.bits_submitted += self.frame_bits(frame)
        self.packets_submitted += 1

    def record_deliver(self, frame: Frame, now: int) -> None:
        self.bits_delivered += self.frame_bits(frame)
        self.packets_delivered += 1
        delay = now - frame.mac_enqueued_at
        self.delay_sum_us += delay
        self.e2e_sum_us += now - frame.created_at
        self.delivered_ids.add(frame.frame_id)
        if self.keep_delays:
            self.delays_us.append(delay)

    def record_drop(self, drop) -> None:
        key = drop.reason.value
        self.drops[key] = self.drops.get(key, 0) + 1
        if drop.frame_id not in self.delivered_ids:
            self.dropped_ids.add(drop.frame_id)

    def record_loss(self, frame: Frame) -> None:
        self.packets_lost += 1
        self.lost_ids.add(frame.frame_id)

    def sample(self, now: int) -> SampleRow:
        if now <= 0:
            row = SampleRow(now, 0.0, 0.0, 0.0, 0.0)
        else:
            n = self.packets_delivered
            elapsed = now / US_PER_S
            row = SampleRow(
                now,
                self.delay_sum_us / n / US_PER_S if n else 0.0,
                self.bits_delivered / elapsed,
                self.bits_submitted / elapsed,
                self.e2e_sum_us / n / US_PER_S if n else 0.0,
            )
        if row.throughput_bps > row.load_bps:
            raise InvariantViolation(f"throughput {row.throughput_bps} > load {row.load_bps}")
        self.series.append(row)
        return row

    def handle(self, ev: Event) -> None:
        self.sample(ev.fire_at)

    def mean_delay_s(self) -> float:
        n = self.packets_delivered
        return self.delay_sum_us / n / US_PER_S if n else 0.0


def fmt_sig(x: float, digits: int = 6) -> str:
    """Fixed-point rendering with ``digits`` significant digits, no exponent."""
    if x == 0 or not math.isfinite(x):
        return "0" if x == 0 else repr(x)
    exp = math.floor(math.log10(abs(x)))
    decimals = max(0, digits - 1 - exp)
    s = f"{x:.{decimals}f}"
    # log10 can land one short right below a power of ten
    if decimals and len(s.replace("-", "").replace(".", "").lstrip("0")) > digits:
        s = f"{x:.{decimals - 1}f}"
    return s


def fmt_time(t_us: int) -> str:
    whole, frac = divmod(t_us, US_PER_S)
    return str(whole) if frac == 0 else f"{whole}.{frac:06d}".rstrip("0")


def format_row(row: SampleRow) -> str:
    return ",".join((
        fmt_time(row.t),
        fmt_sig(row.delay_s),
        f"{row.throughput_bps:.3f}",
        f"{row.load_bps:.3f}",
        fmt_sig(row.e2e_delay_s),
    ))


def series_to_csv(series: list[SampleRow]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for row in series:
        buf.write(format_row(row) + "\n")
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, float]]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError("not a metric CSV (header mismatch)")
    keys = CSV_HEADER.split(",")
    return [dict(zip(keys, map(float, ln.split(",")))) for ln in lines[1:]]
