"""Scenario runner: wires traffic, MACs, channel and metrics onto one engine."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import IO, Iterator

from .channel import Channel, TransmissionRecord
from .config import ScenarioConfig
from .core import Frame, FrameKind, InvariantViolation, NodeId, Role, COORDINATOR
from .engine import Engine, Event, EventKind, RandomStream, RunSummary, mix64
from .mac import Coordinator, DropRecord, EndDevice, ServiceRecord
from .metrics import Metrics, SampleRow, series_to_csv
from .traffic import generate_traffic

TRAFFIC_STREAM_OFFSET = 1 << 32


def backoff_stream_id(node_index: int) -> int:
    return node_index


def traffic_stream_id(node_index: int) -> int:
    return node_index + TRAFFIC_STREAM_OFFSET


def cell_seed(base_seed: int, data_rate_bps: int) -> int:
    """Seed for one sweep cell, a function of the rate alone.

    ACK and no-ACK cells at one rate share it, so a paired comparison sees
    the same arrival phases.
    """
    return mix64(base_seed ^ mix64(data_rate_bps))


class TrafficSource:
    def __init__(self, device: EndDevice, arrivals: Iterator[int], payload_bytes: int,
                 metrics: Metrics, next_frame_id):
        self.device = device
        self.label = device.label
        self.arrivals = arrivals
        self.payload_bytes = payload_bytes
        self.metrics = metrics
        self.next_frame_id = next_frame_id

    def start(self, engine: Engine) -> None:
        self._schedule_next(engine)

    def _schedule_next(self, engine: Engine) -> None:
        t = next(self.arrivals, None)
        if t is not None:
            engine.schedule(t, self, EventKind.PACKET_ARRIVAL)

    def handle(self, ev: Event) -> None:
        dev = self.device
        now = ev.fire_at
        frame = Frame(self.next_frame_id(), FrameKind.DATA, dev.node, COORDINATOR,
                      self.payload_bytes, dev.next_seq, now)
        dev.next_seq += 1
        ev.frame_id = frame.frame_id
        self.metrics.record_submit(frame, now)
        dev.on_packet_from_upper(frame, now)
        self._schedule_next(dev.engine)


@dataclass
class SimulationResult:
    config: ScenarioConfig
    summary: RunSummary
    series: list[SampleRow]
    metrics: Metrics
    drops: list[DropRecord]
    service_log: list[ServiceRecord]
    conservation: dict[str, int]
    channel_log: list[TransmissionRecord] | None = None
    counters: dict[str, int] = field(default_factory=dict)

    def csv(self) -> str:
        return series_to_csv(self.series)

    def completed_services(self) -> list[ServiceRecord]:
        return [s for s in self.service_log if s.dropped is None]

    def mean_service_time_us(self) -> float | None:
        done = self.completed_services()
        if not done:
            return None
        return sum(s.end - s.start for s in done) / len(done)


class Simulation:
    """One isolated run of a scenario.

    ``trace`` receives the tab-separated event log. ``keep_channel_log``
    retains every transmission record for offline collision checks.
    """

    def __init__(self, config: ScenarioConfig, trace: IO[str] | None = None,
                 keep_channel_log: bool = False, keep_service_log: bool = True,
                 keep_delays: bool = False):
        self.config = config
        phy, mac = config.phy, config.mac
        seed = config.run.base_seed
        self.engine = Engine(trace=trace)
        self.channel = Channel(phy, mac, keep_log=keep_channel_log)
        self.metrics = Metrics(phy, mac, accounting=config.run.accounting,
                               keep_delays=keep_delays)
        ids = itertools.count()
        next_id = ids.__next__
        self.coordinator = Coordinator(phy, mac, self.engine, self.channel, self.metrics,
                                       next_id)
        self.devices: list[EndDevice] = []
        self.sources: list[TrafficSource] = []
        end = config.duration_us
        for i in range(1, config.n_end_devices + 1):
            node = NodeId(i, Role.END_DEVICE)
            dev = EndDevice(node, phy, mac, self.engine, self.channel,
                            RandomStream(seed, backoff_stream_id(i)), self.metrics,
                            self.coordinator, keep_service_log=keep_service_log)
            self.devices.append(dev)
            self.coordinator.devices[i] = dev
            arrivals = generate_traffic(config.traffic,
                                        RandomStream(seed, traffic_stream_id(i)), end)
            self.sources.append(TrafficSource(dev, arrivals, config.traffic.payload_bytes,
                                              self.metrics, next_id))

    def run(self) -> SimulationResult:
        cfg = self.config
        end = cfg.duration_us
        step = cfg.sample_interval_us
        for t in range(0, end + 1, step):
            self.engine.schedule(t, self.metrics, EventKind.METRIC_SAMPLE)
        for src in self.sources:
            src.start(self.engine)
        summary = self.engine.run_until(end)
        conservation = self.check_conservation()
        drops = [d for dev in self.devices for d in dev.drops]
        service = [s for dev in self.devices for s in (dev.service_log or ())]
        ch = self.channel
        counters = {
            "tx_started": ch.started,
            "tx_completed": ch.completed,
            "tx_corrupted": ch.corrupted,
            "tx_active": len(ch.active),
            "acks_sent": self.coordinator.acks_sent,
            "duplicates": self.coordinator.duplicates,
        }
        if ch.started != ch.completed + len(ch.active) or ch.corrupted > ch.started:
            raise InvariantViolation(f"channel counters inconsistent: {counters}")
        return SimulationResult(cfg, summary, list(self.metrics.series), self.metrics,
                                drops, service, conservation, ch.log, counters)

    def check_conservation(self) -> dict[str, int]:
        m = self.metrics
        settled = m.delivered_ids | m.lost_ids | m.dropped_ids
        resident = {fid for dev in self.devices for fid in dev.resident_frame_ids()}
        resident -= settled
        book = {
            "generated": m.packets_submitted,
            "delivered": len(m.delivered_ids),
            "dropped_channel_access": m.drops.get("ChannelAccessFailure", 0),
            "dropped_retry": m.drops.get("RetryExhausted", 0),
            "dropped_undelivered": len(m.dropped_ids),
            "lost_collision": len(m.lost_ids),
            "resident": len(resident),
        }
        total = (book["delivered"] + book["dropped_undelivered"] + book["lost_collision"]
                 + book["resident"])
        if total != book["generated"] or len(settled) != (
                book["delivered"] + book["dropped_undelivered"] + book["lost_collision"]):
            raise InvariantViolation(f"packet conservation broken: {book}")
        return book


def simulate(config: ScenarioConfig, **kwargs) -> SimulationResult:
    return Simulation(config, **kwargs).run()
