import pytest
from hypothesis import given, strategies as st

from wpansim.config import (
    ParseError,
    ScenarioConfig,
    ValidationError,
    bundled_scenario,
    load_config,
    parse_config,
    write_config,
)
from wpansim.core import MacParams


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    cfg = load_config(p)
    assert cfg == ScenarioConfig()
    assert cfg.n_end_devices == 10
    assert cfg.mac.mac_min_be == 3 and cfg.mac.max_csma_backoffs == 5
    assert cfg.mac.cca_duration_us == 100_000 and cfg.mac.ack_wait_us == 50_000
    assert cfg.mac.max_retx == 5
    assert cfg.traffic.payload_bytes == 114 and cfg.traffic.interarrival_us == 45_000
    assert cfg.network.beacon_order == 6 and cfg.network.max_depth == 5
    assert cfg.duration_us == 3_600_000_000 and cfg.sample_interval_us == 300_000_000


def test_zero_rate_rejected():
    with pytest.raises(ValidationError) as exc:
        parse_config("[phy]\ndata_rate_bps = 0\n")
    assert exc.value.key == "data_rate_bps"


def test_paper_match_interarrival_accepted():
    cfg = parse_config("[traffic]\ninterarrival_s = 0.8787\n")
    assert cfg.traffic.interarrival_us == 878_700
    offered = 10 * 912 / 0.8787
    assert offered == pytest.approx(10379, rel=1e-3)


def test_unknown_key_named():
    with pytest.raises(ValidationError) as exc:
        parse_config("[mac]\nmac_min_bee = 3\n")
    assert exc.value.key == "mac_min_bee"


def test_unknown_section():
    with pytest.raises(ValidationError):
        parse_config("[radio]\nx = 1\n")


def test_malformed_value_is_parse_error():
    with pytest.raises(ParseError) as exc:
        parse_config("[mac]\nmax_retx = lots\n")
    assert exc.value.key == "max_retx"


def test_malformed_file_is_parse_error():
    with pytest.raises(ParseError):
        parse_config("max_retx = 4\n")


def test_beacon_mode_rejected():
    with pytest.raises(ValidationError):
        parse_config("[network]\nbeacon_enabled = true\n")


def test_duration_shorter_than_interval_rejected():
    with pytest.raises(ValidationError):
        parse_config("[run]\nduration_s = 10\nsample_interval_s = 300\n")


def test_be_order_validated():
    with pytest.raises(ValidationError) as exc:
        parse_config("[mac]\nmac_min_be = 6\n")
    assert exc.value.key == "mac_min_be"


@pytest.mark.parametrize("name", ["table3", "paper-match"])
def test_bundled_scenarios_load(name):
    cfg = bundled_scenario(name)
    assert cfg.n_end_devices == 10 and cfg.traffic.payload_bytes == 114


def test_bundled_paper_match_values():
    cfg = bundled_scenario("paper-match")
    assert cfg.traffic.interarrival_s == 0.8787
    assert cfg.mac.cca_duration_us == 128
    t3 = bundled_scenario("table3")
    assert t3.traffic.interarrival_s == 0.045 and t3.mac.cca_duration_us == 100_000
    assert t3.traffic.interarrival_model == "constant"


configs = st.builds(
    lambda rate, be, nb, ack, n, payload, ia, model, seed, acc, dur: ScenarioConfig().replace(
        phy={"data_rate_bps": rate},
        mac={"mac_min_be": be, "max_csma_backoffs": nb, "ack_enabled": ack},
        network={"n_end_devices": n},
        traffic={"payload_bytes": payload, "interarrival_s": ia, "interarrival_model": model},
        run={"base_seed": seed, "accounting": acc, "duration_s": dur, "sample_interval_s": dur / 4},
    ),
    st.integers(1, 10**6), st.integers(0, 5), st.integers(0, 8), st.booleans(),
    st.integers(1, 64), st.integers(1, 127),
    st.floats(1e-3, 100, allow_nan=False), st.sampled_from(["constant", "exponential"]),
    st.integers(0, 2**64 - 1), st.sampled_from(["payload", "ppdu"]),
    st.floats(1, 1e4, allow_nan=False),
)


@given(configs)
def test_config_round_trip(cfg):
    assert parse_config(write_config(cfg)) == cfg


def test_replace_rejects_bad_values():
    with pytest.raises(ValidationError):
        ScenarioConfig().replace(mac={"max_retx": -1})
    assert ScenarioConfig().replace(mac={"max_retx": 2}).mac == MacParams(max_retx=2)
