import pytest
from hypothesis import given, strategies as st

from wpansim.core import (
    COORDINATOR,
    Frame,
    FrameKind,
    MacParams,
    NodeId,
    PhyParams,
    Role,
    airtime_us,
    backoff_unit_duration,
    data_ppdu_bits,
    ppdu_bits,
)

DEV = NodeId(1, Role.END_DEVICE)


def data(payload):
    return Frame(0, FrameKind.DATA, DEV, COORDINATOR, payload, 0, 0)


def test_ppdu_bits_data_default():
    # (6 + 9 + 114 + 2) bytes
    assert ppdu_bits(data(114), PhyParams(), MacParams()) == 1048


def test_ppdu_bits_zero_payload():
    assert data_ppdu_bits(0, PhyParams(), MacParams()) == 136


def test_ppdu_bits_ack():
    ack = Frame(1, FrameKind.ACK, COORDINATOR, DEV, 0, 0, 0)
    assert ppdu_bits(ack, PhyParams(), MacParams()) == 88


@pytest.mark.parametrize("symbols,ts,expected", [(20, 16, 320), (1, 16, 16), (20, 4, 80)])
def test_backoff_unit(symbols, ts, expected):
    phy = PhyParams(symbol_period_us=ts)
    mac = MacParams(backoff_unit_symbols=symbols)
    assert backoff_unit_duration(phy, mac) == expected


@given(st.integers(min_value=1, max_value=126))
def test_ppdu_bits_strictly_monotone(payload):
    phy, mac = PhyParams(), MacParams()
    assert ppdu_bits(data(payload + 1), phy, mac) > ppdu_bits(data(payload), phy, mac)


def test_airtime_exact_and_rounded_up():
    assert airtime_us(1048, PhyParams(data_rate_bps=250_000)) == 4192
    assert airtime_us(1048, PhyParams(data_rate_bps=20_000)) == 52_400
    assert airtime_us(1, PhyParams(data_rate_bps=3)) == 333_334


def test_default_durations_are_whole_microseconds():
    phy, mac = PhyParams(), MacParams()
    for rate in (20_000, 40_000, 250_000):
        bits = data_ppdu_bits(114, phy, mac)
        assert bits * 1_000_000 % rate == 0


def test_frame_invariants():
    with pytest.raises(ValueError):
        Frame(0, FrameKind.ACK, COORDINATOR, DEV, 3, 0, 0)
    with pytest.raises(ValueError):
        Frame(0, FrameKind.DATA, DEV, COORDINATOR, 0, 0, 0)
    with pytest.raises(ValueError):
        Frame(0, FrameKind.DATA, DEV, COORDINATOR, 10, 0, created_at=5, mac_enqueued_at=4)


@pytest.mark.parametrize("kwargs", [
    {"mac_min_be": 6}, {"max_csma_backoffs": -1}, {"max_retx": -1},
    {"cca_duration_us": 0}, {"ifs_us": 0},
])
def test_mac_params_validation(kwargs):
    with pytest.raises(ValueError):
        MacParams(**kwargs)


@pytest.mark.parametrize("kwargs", [
    {"data_rate_bps": 0}, {"symbol_period_us": 0}, {"phy_header_bytes": 0},
])
def test_phy_params_validation(kwargs):
    with pytest.raises(ValueError):
        PhyParams(**kwargs)
