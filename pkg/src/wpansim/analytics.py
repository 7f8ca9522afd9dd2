"""Closed-form transaction timing and channel-access probabilities.

Times are returned in seconds as floats. The staged delay expressions use
one fixed reading of the backoff stages: starting at exponent ``be`` the
first stage covers slots ``0 .. 2**be - 1``, and each later stage ``k`` up
to ``be_max`` covers ``2**(k-1) .. 2**k - 1`` with weight ``1 / 2**k``.
For the default ``be=3, be_max=5`` that gives the ranges 0-7, 8-15, 16-31.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    US_PER_S,
    MacParams,
    PhyParams,
    ack_ppdu_bits,
    backoff_unit_duration,
    data_ppdu_bits,
)


class DomainError(ValueError):
    """Inputs fall outside where the closed-form model is defined."""


@dataclass(frozen=True)
class TimingBreakdown:
    t_bo: float
    t_data: float
    t_ta: float
    t_ack: float
    t_ifs: float

    @property
    def total(self) -> float:
        return self.t_bo + self.t_data + self.t_ta + self.t_ack + self.t_ifs


@dataclass(frozen=True)
class ContentionModel:
    d_devices: int
    be: int = 3

    def __post_init__(self):
        if self.d_devices < 1:
            raise DomainError("d_devices must be >= 1")

    @property
    def p(self) -> float:
        return 1.0 / self.d_devices


def t_data(payload_bytes: int, phy: PhyParams, mac: MacParams) -> float:
    if payload_bytes < 0:
        raise DomainError("payload_bytes must be >= 0")
    return data_ppdu_bits(payload_bytes, phy, mac) / phy.data_rate_bps


def t_bo(bo_slots: float, phy: PhyParams, mac: MacParams) -> float:
    if bo_slots < 0:
        raise DomainError("bo_slots must be >= 0")
    return bo_slots * backoff_unit_duration(phy, mac) / US_PER_S


def t_ack(phy: PhyParams, mac: MacParams) -> float:
    return ack_ppdu_bits(phy, mac) / phy.data_rate_bps


def transaction_delay(bo_slots: float, payload_bytes: int, ack_enabled: bool,
                      phy: PhyParams, mac: MacParams) -> TimingBreakdown:
    """Backoff + data + turnaround + ACK + IFS; no-ACK zeroes the ACK terms."""
    return TimingBreakdown(
        t_bo=t_bo(bo_slots, phy, mac),
        t_data=t_data(payload_bytes, phy, mac),
        t_ta=mac.turnaround_us / US_PER_S if ack_enabled else 0.0,
        t_ack=t_ack(phy, mac) if ack_enabled else 0.0,
        t_ifs=mac.ifs_us / US_PER_S,
    )


def mean_backoff_slots(be: int) -> float:
    return ((1 << be) - 1) / 2


def expected_service_time(payload_bytes: int, phy: PhyParams, mac: MacParams) -> float:
    """Mean head-of-queue service time of a lone sender on an idle channel.

    The transaction delay at the mean first-stage backoff, plus one CCA
    window, which the transaction formula itself leaves out.
    """
    br = transaction_delay(mean_backoff_slots(mac.mac_min_be), payload_bytes,
                           mac.ack_enabled, phy, mac)
    return br.total + mac.cca_duration_us / US_PER_S


def p_backoff_period(be: int) -> float:
    if be < 0:
        raise DomainError("be must be >= 0")
    return 1.0 / (1 << be)


def p_success_slot(model: ContentionModel) -> float:
    if model.be < 2:
        raise DomainError(f"be={model.be}: exponent be-2 is negative")
    p = model.p
    return p * (1.0 - p) ** (model.be - 2)


def _p_of(model_or_p) -> float:
    if isinstance(model_or_p, ContentionModel):
        return model_or_p.p
    p = float(model_or_p)
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p={p} is not a probability")
    return p


def _stages(be: int, be_max: int) -> list[tuple[int, int, int]]:
    if be < 0 or be_max < be:
        raise DomainError(f"need 0 <= be <= be_max, got be={be}, be_max={be_max}")
    stages = [(0, (1 << be) - 1, be)]
    for k in range(be + 1, be_max + 1):
        stages.append((1 << (k - 1), (1 << k) - 1, k))
    return stages


def _slot_sum(lo: int, hi: int) -> int:
    return (lo + hi) * (hi - lo + 1) // 2


def p_time_delay_event(model_or_p, be: int = 3, be_max: int = 5,
                       decay: bool = False) -> float:
    """Staged expected-slot weight; ``21 p`` for the default stages.

    With ``decay=True`` every stage also carries ``(1 - p) ** (be - 2)``.
    """
    if isinstance(model_or_p, ContentionModel):
        be = model_or_p.be
    p = _p_of(model_or_p)
    factor = p * (1.0 - p) ** (be - 2) if decay else p
    weight = sum(_slot_sum(lo, hi) / (1 << k) for lo, hi, k in _stages(be, be_max))
    return weight * factor


def single_stage_weight(model_or_p, be: int = 3) -> float:
    """First-stage sum, slots ``0 .. 2**be - 1`` with the per-slot success factor."""
    if isinstance(model_or_p, ContentionModel):
        be = model_or_p.be
    p = _p_of(model_or_p)
    if be < 2:
        raise DomainError(f"be={be}: exponent be-2 is negative")
    return _slot_sum(0, (1 << be) - 1) / (1 << be) * p * (1.0 - p) ** (be - 2)


def expected_time_delay(model_or_p, be: int = 3, be_max: int = 5,
                        decay: bool = False) -> float:
    """Ratio of the staged sum to the first-stage sum, in backoff slots.

    Equals ``6 / (1 - p)`` for the default stages.
    """
    if isinstance(model_or_p, ContentionModel):
        be = model_or_p.be
    p = _p_of(model_or_p)
    if p >= 1.0:
        raise DomainError("p=1 makes the denominator vanish")
    if p <= 0.0:
        raise DomainError("p=0 makes the ratio 0/0")
    return (p_time_delay_event(p, be, be_max, decay) / single_stage_weight(p, be))
