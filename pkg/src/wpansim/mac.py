"""Unslotted CSMA/CA MAC for end devices and the star coordinator.

One CSMA attempt: NB=0 and BE=macMinBE, wait a uniform number of backoff
units in [0, 2**BE - 1], sense the channel for the CCA window, transmit if
idle. A busy verdict increments NB and BE (BE capped at macMaxBE) and backs
off again; NB beyond ``max_csma_backoffs`` drops the frame.

In ACK mode the sender waits ``ack_wait_us`` after its transmission; each
timeout restarts CSMA from macMinBE until ``max_retx`` retransmissions are
spent. ACKs are sent by the coordinator one turnaround after a clean data
frame, without CSMA.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable

from .channel import Channel, DeliveryOutcome, Verdict
from .core import (
    COORDINATOR,
    Frame,
    FrameKind,
    InvariantViolation,
    MacParams,
    NodeId,
    PhyParams,
    backoff_unit_duration,
)
from .engine import Engine, Event, EventKind, RandomStream, draw_backoff_slots

if TYPE_CHECKING:
    from .metrics import Metrics


class MacState(enum.Enum):
    IDLE = "Idle"
    BACKOFF = "Backoff"
    CCA = "Cca"
    TRANSMITTING = "Transmitting"
    AWAITING_ACK = "AwaitingAck"
    INTERFRAME_SPACE = "InterframeSpace"


class DropReason(enum.Enum):
    CHANNEL_ACCESS_FAILURE = "ChannelAccessFailure"
    RETRY_EXHAUSTED = "RetryExhausted"


@dataclass(frozen=True, slots=True)
class DropRecord:
    frame_id: int
    reason: DropReason
    at: int
    src: int = -1


@dataclass(frozen=True, slots=True)
class ServiceRecord:
    """One frame's stay at the head of its MAC queue."""

    frame_id: int
    start: int
    end: int
    backoff_slots: tuple[int, ...]
    transmissions: int
    dropped: DropReason | None


class EndDevice:
    """CSMA/CA state machine plus an unbounded FIFO transmit queue."""

    def __init__(self, node: NodeId, phy: PhyParams, mac: MacParams, engine: Engine,
                 channel: Channel, stream: RandomStream, metrics: "Metrics",
                 coordinator: "Coordinator", keep_service_log: bool = True):
        self.node = node
        self.label = node.label
        self.phy = phy
        self.mac = mac
        self.engine = engine
        self.channel = channel
        self.stream = stream
        self.metrics = metrics
        self.coordinator = coordinator
        self.unit_us = backoff_unit_duration(phy, mac)

        self.queue: deque[Frame] = deque()
        self.state = MacState.IDLE
        self.nb = 0
        self.be = mac.mac_min_be
        self.retx_count = 0
        self.current_frame: Frame | None = None
        self.cca_window_start = -1
        self.drops: list[DropRecord] = []
        self.service_log: list[ServiceRecord] | None = [] if keep_service_log else None
        self._ack_timer: Event | None = None
        self._service_start = 0
        self._draws: list[int] = []
        self._tx_count = 0
        self.next_seq = 0

    # upper-layer entry

    def on_packet_from_upper(self, frame: Frame, now: int) -> None:
        if frame.kind is not FrameKind.DATA:
            raise ValueError("only data frames come from the upper layer")
        frame.mac_enqueued_at = now
        self.queue.append(frame)
        if self.state is MacState.IDLE:
            self._advance(now)

    # event dispatch

    def handle(self, ev: Event) -> None:
        kind = ev.kind
        now = ev.fire_at
        if kind is EventKind.BACKOFF_EXPIRED:
            self.on_backoff_expired(now)
        elif kind is EventKind.CCA_COMPLETE:
            self.on_cca_complete(self.channel.sense(self.cca_window_start, now), now)
        elif kind is EventKind.TX_COMPLETE:
            outcome = self.channel.end_tx(ev.payload, now)
            self.coordinator.on_receive(outcome, now)
            self.on_tx_complete(outcome, now)
        elif kind is EventKind.ACK_TIMEOUT:
            self.on_ack_timeout(now)
        elif kind is EventKind.IFS_COMPLETE:
            self.on_ifs_complete(now)
        else:
            raise InvariantViolation(f"{self.label}: unexpected event {kind.value}")

    # CSMA/CA

    def start_csma(self, now: int) -> None:
        if self.current_frame is None:
            raise InvariantViolation(f"{self.label}: start_csma without a frame")
        self.nb = 0
        self.be = self.mac.mac_min_be
        self._schedule_backoff(now)

    def _schedule_backoff(self, now: int) -> None:
        slots = draw_backoff_slots(self.stream, self.be)
        self._draws.append(slots)
        self.state = MacState.BACKOFF
        self.engine.schedule(now + slots * self.unit_us, self, EventKind.BACKOFF_EXPIRED,
                             frame_id=self.current_frame.frame_id)

    def on_backoff_expired(self, now: int) -> None:
        self._expect(MacState.BACKOFF)
        self.state = MacState.CCA
        self.cca_window_start = now
        self.engine.schedule(now + self.mac.cca_duration_us, self, EventKind.CCA_COMPLETE,
                             frame_id=self.current_frame.frame_id)

    def on_cca_complete(self, verdict: Verdict, now: int) -> None:
        self._expect(MacState.CCA)
        mac = self.mac
        if verdict is Verdict.BUSY:
            self.nb += 1
            if self.be < mac.mac_max_be:
                self.be += 1
            if self.nb > mac.max_csma_backoffs:
                self._drop(DropReason.CHANNEL_ACCESS_FAILURE, now)
            else:
                self._schedule_backoff(now)
            return
        rec = self.channel.begin_tx(self.current_frame, now)
        self._tx_count += 1
        self.state = MacState.TRANSMITTING
        self.engine.schedule(rec.tx_end, self, EventKind.TX_COMPLETE, rec,
                             frame_id=rec.frame.frame_id)

    def on_tx_complete(self, outcome: DeliveryOutcome, now: int) -> None:
        self._expect(MacState.TRANSMITTING)
        if self.mac.ack_enabled:
            self.state = MacState.AWAITING_ACK
            self._ack_timer = self.engine.schedule(
                now + self.mac.ack_wait_us, self, EventKind.ACK_TIMEOUT,
                frame_id=outcome.frame.frame_id)
        else:
            self._begin_ifs(now)

    # acknowledgements

    def on_receive(self, outcome: DeliveryOutcome, now: int) -> None:
        frame = outcome.frame
        if not outcome.delivered or frame.kind is not FrameKind.ACK:
            return
        if (self.state is MacState.AWAITING_ACK and self.current_frame is not None
                and frame.seq == self.current_frame.seq):
            self.on_ack_received(now)

    def on_ack_received(self, now: int) -> None:
        self._expect(MacState.AWAITING_ACK)
        if self._ack_timer is not None:
            self._ack_timer.stale = True
            self._ack_timer = None
        self._begin_ifs(now)

    def on_ack_timeout(self, now: int) -> None:
        self._expect(MacState.AWAITING_ACK)
        self._ack_timer = None
        self.retx_count += 1
        if self.retx_count > self.mac.max_retx:
            self._drop(DropReason.RETRY_EXHAUSTED, now)
        else:
            self.start_csma(now)

    # transaction bookkeeping

    def _begin_ifs(self, now: int) -> None:
        self.state = MacState.INTERFRAME_SPACE
        self.engine.schedule(now + self.mac.ifs_us, self, EventKind.IFS_COMPLETE,
                             frame_id=self.current_frame.frame_id)

    def on_ifs_complete(self, now: int) -> None:
        self._expect(MacState.INTERFRAME_SPACE)
        self._close_service(now, None)
        self._advance(now)

    def _drop(self, reason: DropReason, now: int) -> None:
        frame = self.current_frame
        if reason is DropReason.RETRY_EXHAUSTED and not self.mac.ack_enabled:
            raise InvariantViolation(f"{self.label}: retry drop in no-ACK mode")
        rec = DropRecord(frame.frame_id, reason, now, self.node.index)
        self.drops.append(rec)
        self.metrics.record_drop(rec)
        self._close_service(now, reason)
        self._advance(now)

    def _close_service(self, now: int, dropped: DropReason | None) -> None:
        if self.service_log is not None:
            self.service_log.append(ServiceRecord(
                self.current_frame.frame_id, self._service_start, now,
                tuple(self._draws), self._tx_count, dropped))

    def _advance(self, now: int) -> None:
        if not self.queue:
            self.current_frame = None
            self.state = MacState.IDLE
            return
        self.current_frame = self.queue.popleft()
        self.retx_count = 0
        self._service_start = now
        self._draws = []
        self._tx_count = 0
        self.start_csma(now)

    def _expect(self, state: MacState) -> None:
        if self.state is not state:
            raise InvariantViolation(
                f"{self.label}: in {self.state.value}, expected {state.value}")
        if state is MacState.BACKOFF or state is MacState.CCA:
            mac = self.mac
            if not (mac.mac_min_be <= self.be <= mac.mac_max_be):
                raise InvariantViolation(f"{self.label}: be={self.be} out of range")
            if not (0 <= self.nb <= mac.max_csma_backoffs):
                raise InvariantViolation(f"{self.label}: nb={self.nb} out of range")
        if self.retx_count > self.mac.max_retx:
            raise InvariantViolation(f"{self.label}: retx_count={self.retx_count}")

    def resident_frame_ids(self) -> list[int]:
        ids = [f.frame_id for f in self.queue]
        if self.current_frame is not None:
            ids.append(self.current_frame.frame_id)
        return ids


class Coordinator:
    """Star sink: hands clean data to the upper layer and returns ACKs."""

    def __init__(self, phy: PhyParams, mac: MacParams, engine: Engine, channel: Channel,
                 metrics: "Metrics", next_frame_id: Callable[[], int],
                 node: NodeId = COORDINATOR):
        self.node = node
        self.label = node.label
        self.phy = phy
        self.mac = mac
        self.engine = engine
        self.channel = channel
        self.metrics = metrics
        self.next_frame_id = next_frame_id
        self.devices: dict[int, EndDevice] = {}
        self._last_seq: dict[int, int] = {}
        self.acks_sent = 0
        self.duplicates = 0

    def on_receive(self, outcome: DeliveryOutcome, now: int) -> None:
        frame = outcome.frame
        if frame.kind is not FrameKind.DATA or frame.dst != self.node:
            return
        if not outcome.delivered:
            if not self.mac.ack_enabled:
                # the sender never learns of the loss
                self.metrics.record_loss(frame)
            return
        src = frame.src.index
        if self._last_seq.get(src, -1) < frame.seq:
            self._last_seq[src] = frame.seq
            self.metrics.record_deliver(frame, now)
        else:
            self.duplicates += 1
        if self.mac.ack_enabled:
            ack = Frame(self.next_frame_id(), FrameKind.ACK, self.node, frame.src, 0,
                        frame.seq, now)
            self.engine.schedule(now + self.mac.turnaround_us, self, EventKind.ACK_TX_START,
                                 ack, frame_id=ack.frame_id)

    def handle(self, ev: Event) -> None:
        if ev.kind is EventKind.ACK_TX_START:
            rec = self.channel.begin_tx(ev.payload, ev.fire_at)
            self.acks_sent += 1
            self.engine.schedule(rec.tx_end, self, EventKind.TX_COMPLETE, rec,
                                 frame_id=rec.frame.frame_id)
        elif ev.kind is EventKind.TX_COMPLETE:
            outcome = self.channel.end_tx(ev.payload, ev.fire_at)
            dev = self.devices.get(outcome.frame.dst.index)
            if dev is not None:
                dev.on_receive(outcome, ev.fire_at)
        else:
            raise InvariantViolation(f"{self.label}: unexpected event {ev.kind.value}")
