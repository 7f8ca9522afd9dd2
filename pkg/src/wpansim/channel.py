"""Shared half-duplex medium with overlap-based collisions.

Transmissions occupy half-open intervals ``[tx_start, tx_end)``. Any two
records whose intervals intersect are both corrupted; there is no capture
effect and no noise loss. Propagation delay is zero.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass

from .core import Frame, MacParams, PhyParams, airtime_us, ppdu_bits


class Verdict(enum.Enum):
    IDLE = "idle"
    BUSY = "busy"


@dataclass(slots=True, eq=False)
class TransmissionRecord:
    frame: Frame
    tx_start: int
    tx_end: int
    corrupted: bool = False


@dataclass(frozen=True, slots=True)
class DeliveryOutcome:
    frame: Frame
    delivered: bool
    record: TransmissionRecord


class Channel:
    """In-flight transmission set plus a short history for CCA queries.

    ``retention_us`` bounds how far back :meth:`sense` can look; it must be
    at least the longest sensing window used against this channel.
    ``keep_log`` retains every finished record (for offline checks).
    """

    def __init__(self, phy: PhyParams, mac: MacParams, retention_us: int | None = None,
                 keep_log: bool = False):
        self.phy = phy
        self.mac = mac
        self.retention_us = mac.cca_duration_us if retention_us is None else retention_us
        self.active: list[TransmissionRecord] = []
        self._recent: deque[TransmissionRecord] = deque()
        self.log: list[TransmissionRecord] | None = [] if keep_log else None
        self.started = 0
        self.completed = 0
        self.corrupted = 0

    def begin_tx(self, frame: Frame, now: int) -> TransmissionRecord:
        duration = airtime_us(ppdu_bits(frame, self.phy, self.mac), self.phy)
        rec = TransmissionRecord(frame, now, now + duration)
        for other in self.active:
            if other.tx_end > now:
                rec.corrupted = True
                other.corrupted = True
        self.active.append(rec)
        self.started += 1
        return rec

    def sense(self, window_start: int, window_end: int) -> Verdict:
        if window_end <= window_start:
            raise ValueError("empty sensing window")
        for rec in self.active:
            if rec.tx_start < window_end and rec.tx_end > window_start:
                return Verdict.BUSY
        for rec in self._recent:
            if rec.tx_start < window_end and rec.tx_end > window_start:
                return Verdict.BUSY
        return Verdict.IDLE

    def end_tx(self, record: TransmissionRecord, now: int) -> DeliveryOutcome:
        if now != record.tx_end:
            raise ValueError(f"end_tx at {now}, record ends at {record.tx_end}")
        self.active.remove(record)
        self.completed += 1
        if record.corrupted:
            self.corrupted += 1
        recent = self._recent
        recent.append(record)
        horizon = now - self.retention_us
        while recent and recent[0].tx_end <= horizon:
            recent.popleft()
        if self.log is not None:
            self.log.append(record)
        return DeliveryOutcome(record.frame, not record.corrupted, record)


def overlap_groups(records: list[TransmissionRecord]) -> list[list[TransmissionRecord]]:
    """Partition records into maximal chains of pairwise-overlapping intervals."""
    groups: list[list[TransmissionRecord]] = []
    reach = -1
    for rec in sorted(records, key=lambda r: (r.tx_start, r.tx_end)):
        if groups and rec.tx_start < reach:
            groups[-1].append(rec)
            reach = max(reach, rec.tx_end)
        else:
            groups.append([rec])
            reach = rec.tx_end
    return groups
