"""Deterministic discrete-event scheduler and seeded random streams.

Events are ordered by ``(fire_at, insertion_seq)``; simultaneous events run
in the order they were scheduled. Random numbers come from SplitMix64, one
independent stream per ``(base_seed, stream_id)`` pair, so the same
configuration reproduces the same trace on any platform.
"""

from __future__ import annotations

import enum
import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import IO, Any, Protocol

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


class SchedulingInPast(RuntimeError):
    pass


class EventKind(enum.Enum):
    PACKET_ARRIVAL = "PacketArrival"
    BACKOFF_EXPIRED = "BackoffExpired"
    CCA_COMPLETE = "CcaComplete"
    TX_COMPLETE = "TxComplete"
    ACK_TX_START = "AckTxStart"
    ACK_TIMEOUT = "AckTimeout"
    IFS_COMPLETE = "IfsComplete"
    METRIC_SAMPLE = "MetricSample"


class Target(Protocol):
    label: str

    def handle(self, event: "Event") -> None: ...


class Event:
    __slots__ = ("fire_at", "seq", "target", "kind", "payload", "frame_id", "stale")

    def __init__(self, fire_at, seq, target, kind, payload=None, frame_id=None):
        self.fire_at = fire_at
        self.seq = seq
        self.target = target
        self.kind = kind
        self.payload = payload
        self.frame_id = frame_id
        self.stale = False

    def trace_line(self) -> str:
        fid = "-" if self.frame_id is None else str(self.frame_id)
        return f"{self.fire_at}\t{self.seq}\t{self.target.label}\t{self.kind.value}\t{fid}"

    def __repr__(self):
        return f"Event({self.trace_line()!r})"


class EventQueue:
    """Min-heap keyed on ``(fire_at, insertion_seq)``."""

    def __init__(self):
        self._heap: list[tuple[int, int, Event]] = []
        self._next_seq = 0

    def __len__(self):
        return len(self._heap)

    def push(self, fire_at: int, target, kind: EventKind, payload=None,
             frame_id=None) -> Event:
        ev = Event(fire_at, self._next_seq, target, kind, payload, frame_id)
        self._next_seq += 1
        heapq.heappush(self._heap, (fire_at, ev.seq, ev))
        return ev

    def peek_time(self) -> int | None:
        return self._heap[0][0] if self._heap else None

    def pop(self) -> Event:
        return heapq.heappop(self._heap)[2]


@dataclass(frozen=True)
class RunSummary:
    events_processed: int
    stale_skipped: int
    final_time: int
    pending: int


class Engine:
    """Single-threaded simulation clock.

    ``trace`` is an optional text stream receiving one tab-separated line per
    processed event. The last ``history`` lines are always retained so a
    failing run can dump its recent past.
    """

    def __init__(self, trace: IO[str] | None = None, history: int = 200):
        self.now = 0
        self.queue = EventQueue()
        self.trace = trace
        self.recent: deque[Event] = deque(maxlen=history)
        self.events_processed = 0
        self.stale_skipped = 0
        self._last_key = (-1, -1)

    def schedule(self, fire_at: int, target, kind: EventKind, payload: Any = None,
                 frame_id: int | None = None) -> Event:
        if fire_at < self.now:
            raise SchedulingInPast(
                f"{kind.value} for {target.label} at {fire_at} < now {self.now}")
        return self.queue.push(fire_at, target, kind, payload, frame_id)

    def schedule_in(self, delay: int, target, kind: EventKind, payload: Any = None,
                    frame_id: int | None = None) -> Event:
        return self.schedule(self.now + delay, target, kind, payload, frame_id)

    def run_until(self, end: int) -> RunSummary:
        heap = self.queue._heap
        trace = self.trace
        recent = self.recent
        while heap and heap[0][0] <= end:
            fire_at, seq, ev = heapq.heappop(heap)
            if ev.stale:
                self.stale_skipped += 1
                continue
            if (fire_at, seq) < self._last_key:
                raise AssertionError(f"out-of-order event {ev!r}")
            self._last_key = (fire_at, seq)
            self.now = fire_at
            self.events_processed += 1
            recent.append(ev)
            ev.target.handle(ev)
            if trace is not None:
                # after handling, so arrivals carry the frame id they created
                trace.write(ev.trace_line())
                trace.write("\n")
        self.now = max(self.now, end)
        return RunSummary(self.events_processed, self.stale_skipped, self.now, len(heap))

    def dump_recent(self) -> str:
        return "\n".join(ev.trace_line() for ev in self.recent)


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (a 64-bit bijection)."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class SplitMix64:
    """Vigna's SplitMix64 generator; state advances by the golden gamma."""

    __slots__ = ("state",)

    def __init__(self, state: int):
        self.state = state & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        return mix64(self.state)


class RandomStream:
    """Per-node random stream.

    The starting state is ``base_seed XOR mix64(stream_id + GOLDEN_GAMMA)``,
    so streams for different ids are decorrelated and adding a node never
    changes another node's draws.
    """

    def __init__(self, base_seed: int, stream_id: int):
        self.base_seed = base_seed & MASK64
        self.stream_id = stream_id & MASK64
        self._gen = SplitMix64(self.base_seed ^ mix64(self.stream_id + GOLDEN_GAMMA))

    def next_u64(self) -> int:
        return self._gen.next_u64()

    def bits(self, k: int) -> int:
        """Top ``k`` bits of the next output; uniform on ``[0, 2**k)``."""
        if k == 0:
            # still consume a value so the stream position depends only on call count
            self._gen.next_u64()
            return 0
        return self._gen.next_u64() >> (64 - k)

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` by multiply-shift (bias < n / 2**64)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self._gen.next_u64() * n) >> 64

    def uniform(self) -> float:
        """Double in ``[0, 1)`` with 53 random bits."""
        return (self._gen.next_u64() >> 11) * (1.0 / (1 << 53))

    def exponential(self, mean: float) -> float:
        return -mean * math.log1p(-self.uniform())


def draw_backoff_slots(stream: RandomStream, be: int) -> int:
    """Uniform backoff count in ``[0, 2**be - 1]``."""
    if be < 0:
        raise ValueError("be must be >= 0")
    return stream.bits(be)
