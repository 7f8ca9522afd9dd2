"""Closed-form model against direct summation."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from wpansim import analytics as an
from wpansim.core import MacParams, PhyParams

PHY = PhyParams()
MAC = MacParams()


# independent oracles: plain loops over exact rationals

def oracle_staged(p, be=3, be_max=5, decay=False):
    p = Fraction(p)
    total = Fraction(0)
    factor = p * (1 - p) ** (be - 2) if decay else p
    for n in range(0, 2 ** be):
        total += n * Fraction(1, 2 ** be) * factor
    for k in range(be + 1, be_max + 1):
        for n in range(2 ** (k - 1), 2 ** k):
            total += n * Fraction(1, 2 ** k) * factor
    return total


def oracle_first_stage(p, be=3):
    p = Fraction(p)
    return sum(n * Fraction(1, 2 ** be) * p * (1 - p) ** (be - 2) for n in range(2 ** be))


def test_t_data_examples():
    assert an.t_data(114, PHY, MAC) == pytest.approx(0.004192, rel=1e-12)
    assert an.t_data(114, PhyParams(data_rate_bps=20_000), MAC) == pytest.approx(0.0524, rel=1e-12)
    assert an.t_data(0, PHY, MAC) == pytest.approx(0.000544, rel=1e-12)


@pytest.mark.parametrize("slots,expected", [(3, 960e-6), (0, 0.0), (7, 2240e-6)])
def test_t_bo(slots, expected):
    assert an.t_bo(slots, PHY, MAC) == pytest.approx(expected, rel=1e-12, abs=0)


def test_t_ack_examples():
    assert an.t_ack(PHY, MAC) == pytest.approx(0.000352, rel=1e-12)
    assert an.t_ack(PhyParams(data_rate_bps=20_000), MAC) == pytest.approx(0.0044, rel=1e-12)
    assert an.t_ack(PHY, MacParams(ack_mac_header_bytes=9)) == pytest.approx(0.000544, rel=1e-12)


def test_transaction_delay_examples():
    ack = an.transaction_delay(3, 114, True, PHY, MAC)
    assert ack.total == pytest.approx(0.00096 + 0.004192 + 0.000192 + 0.000352 + 0.00064,
                                      rel=1e-12)
    assert ack.total == pytest.approx(0.006336, rel=1e-12)
    noack = an.transaction_delay(3, 114, False, PHY, MAC)
    assert noack.t_ta == noack.t_ack == 0
    assert noack.total == pytest.approx(0.005792, rel=1e-12)


def test_transaction_delay_all_zero():
    br = an.TimingBreakdown(0.0, 0.0, 0.0, 0.0, 0.0)
    assert br.total == 0


@given(st.floats(0, 64), st.integers(0, 127), st.booleans(),
       st.sampled_from([20_000, 40_000, 250_000]))
def test_breakdown_additivity(bo, payload, ack, rate):
    br = an.transaction_delay(bo, payload, ack, PhyParams(data_rate_bps=rate), MAC)
    assert br.total == br.t_bo + br.t_data + br.t_ta + br.t_ack + br.t_ifs
    assert min(br.t_bo, br.t_data, br.t_ta, br.t_ack, br.t_ifs) >= 0


@pytest.mark.parametrize("be,expected", [(3, 0.125), (0, 1.0), (5, 0.03125)])
def test_p_backoff_period(be, expected):
    assert an.p_backoff_period(be) == expected


@pytest.mark.parametrize("be", range(6))
def test_uniform_pmf_complete(be):
    assert sum(Fraction(1, 2 ** be) for _ in range(2 ** be)) == 1
    assert an.p_backoff_period(be) * 2 ** be == 1.0


@pytest.mark.parametrize("d,be,expected", [(10, 3, 0.09), (1, 2, 1.0), (10, 5, 0.0729)])
def test_p_success_slot(d, be, expected):
    assert an.p_success_slot(an.ContentionModel(d, be)) == pytest.approx(expected, rel=1e-12)


def test_p_success_slot_domain():
    with pytest.raises(an.DomainError):
        an.p_success_slot(an.ContentionModel(10, 1))
    with pytest.raises(an.DomainError):
        an.ContentionModel(0, 3)


def test_p_time_delay_event_examples():
    assert an.p_time_delay_event(0.1) == pytest.approx(2.1, rel=1e-12)
    assert an.p_time_delay_event(0.0) == 0.0
    assert an.p_time_delay_event(1.0) == pytest.approx(21.0, rel=1e-12)
    assert float(oracle_staged(1)) == 21.0
    # 28/8 + 92/16 + 376/32
    assert Fraction(28, 8) + Fraction(92, 16) + Fraction(376, 32) == 21


def test_expected_time_delay_examples():
    assert an.expected_time_delay(0.1) == pytest.approx(6.666666666666667, rel=1e-12)
    ratio = oracle_staged(Fraction(1, 10)) / oracle_first_stage(Fraction(1, 10))
    assert an.expected_time_delay(0.1) == pytest.approx(float(ratio), rel=1e-12)
    assert an.expected_time_delay(0.5) == pytest.approx(12.0, rel=1e-12)
    assert an.expected_time_delay(1e-9) == pytest.approx(6.0, rel=1e-8)


def test_expected_time_delay_domain():
    with pytest.raises(an.DomainError):
        an.expected_time_delay(1.0)
    with pytest.raises(an.DomainError):
        an.expected_time_delay(an.ContentionModel(1, 3))


def test_decay_variant_matches_oracle():
    got = an.p_time_delay_event(0.2, decay=True)
    assert got == pytest.approx(float(oracle_staged(Fraction(1, 5), decay=True)), rel=1e-12)


def test_expected_service_time():
    mac = MacParams()
    expected = 3.5 * 320e-6 + 0.1 + 0.004192 + 0.00064
    assert an.expected_service_time(114, PHY, mac) == pytest.approx(expected, rel=1e-12)
