"""Shared domain types and protocol constants.

All simulated time is kept as integer microseconds. Every default duration
(16 us symbol, 320 us backoff unit, 0.1 s CCA, 0.045 s interarrival) is an
exact multiple of 1 us, so the event queue never sees float drift.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

US_PER_S = 1_000_000

RATES_BPS = (20_000, 40_000, 250_000)


class InvariantViolation(RuntimeError):
    """A protocol or accounting invariant was broken during a run."""


class Role(enum.Enum):
    COORDINATOR = "coordinator"
    END_DEVICE = "end_device"


class FrameKind(enum.Enum):
    DATA = "data"
    ACK = "ack"


@dataclass(frozen=True)
class NodeId:
    index: int
    role: Role

    @property
    def label(self) -> str:
        return f"n{self.index}"


COORDINATOR = NodeId(0, Role.COORDINATOR)


@dataclass(frozen=True)
class PhyParams:
    data_rate_bps: int = 250_000
    symbol_period_us: int = 16
    phy_header_bytes: int = 6
    band_label: str = "2.4 GHz"

    def __post_init__(self):
        if self.data_rate_bps <= 0:
            raise ValueError("data_rate_bps must be > 0")
        if self.symbol_period_us <= 0:
            raise ValueError("symbol_period_us must be > 0")
        if self.phy_header_bytes < 1:
            raise ValueError("phy_header_bytes must be >= 1")


@dataclass(frozen=True)
class MacParams:
    mac_min_be: int = 3
    mac_max_be: int = 5
    max_csma_backoffs: int = 5
    backoff_unit_symbols: int = 20
    cca_duration_us: int = 100_000
    turnaround_us: int = 192
    ack_wait_us: int = 50_000
    max_retx: int = 5
    mac_header_bytes: int = 9
    mac_footer_bytes: int = 2
    ack_mac_header_bytes: int = 3
    ifs_us: int = 640
    ack_enabled: bool = False

    def __post_init__(self):
        if self.mac_min_be < 0:
            raise ValueError("mac_min_be must be >= 0")
        if self.mac_min_be > self.mac_max_be:
            raise ValueError("mac_min_be must not exceed mac_max_be")
        if self.max_csma_backoffs < 0:
            raise ValueError("max_csma_backoffs must be >= 0")
        if self.max_retx < 0:
            raise ValueError("max_retx must be >= 0")
        for name in ("backoff_unit_symbols", "cca_duration_us", "turnaround_us",
                     "ack_wait_us", "ifs_us"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        for name in ("mac_header_bytes", "mac_footer_bytes", "ack_mac_header_bytes"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")


@dataclass(slots=True, eq=False)
class Frame:
    """A data or ACK unit. Timestamps are integer microseconds."""

    frame_id: int
    kind: FrameKind
    src: NodeId
    dst: NodeId
    payload_bytes: int
    seq: int
    created_at: int
    mac_enqueued_at: int = field(default=-1)

    def __post_init__(self):
        if self.kind is FrameKind.ACK and self.payload_bytes != 0:
            raise ValueError("ACK frames carry no payload")
        if self.kind is FrameKind.DATA and self.payload_bytes <= 0:
            # zero-payload data would be indistinguishable from an ACK
            raise ValueError("data frames need a positive payload")
        if self.mac_enqueued_at < 0:
            self.mac_enqueued_at = self.created_at
        if self.mac_enqueued_at < self.created_at:
            raise ValueError("mac_enqueued_at precedes created_at")


def data_ppdu_bits(payload_bytes: int, phy: PhyParams, mac: MacParams) -> int:
    return 8 * (phy.phy_header_bytes + mac.mac_header_bytes + payload_bytes
                + mac.mac_footer_bytes)


def ack_ppdu_bits(phy: PhyParams, mac: MacParams) -> int:
    return 8 * (phy.phy_header_bytes + mac.ack_mac_header_bytes + mac.mac_footer_bytes)


def ppdu_bits(frame: Frame, phy: PhyParams, mac: MacParams) -> int:
    """Bits on the air for ``frame``, PHY header included."""
    if frame.kind is FrameKind.ACK:
        return ack_ppdu_bits(phy, mac)
    return data_ppdu_bits(frame.payload_bytes, phy, mac)


def backoff_unit_duration(phy: PhyParams, mac: MacParams) -> int:
    """One backoff period in microseconds."""
    return mac.backoff_unit_symbols * phy.symbol_period_us


def airtime_us(bits: int, phy: PhyParams) -> int:
    """Transmission time of ``bits`` in whole microseconds, rounded up."""
    return -(-bits * US_PER_S // phy.data_rate_bps)
