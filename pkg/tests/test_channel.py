from hypothesis import given, strategies as st

from wpansim.channel import Channel, Verdict, overlap_groups
from wpansim.core import COORDINATOR, Frame, FrameKind, MacParams, NodeId, PhyParams, Role

PHY = PhyParams(data_rate_bps=250_000)
MAC = MacParams()


def frame(i, payload=114):
    return Frame(i, FrameKind.DATA, NodeId(i + 1, Role.END_DEVICE), COORDINATOR, payload, 0, 0)


def test_single_frame_duration_and_clean():
    ch = Channel(PHY, MAC)
    rec = ch.begin_tx(frame(0), 1000)
    assert rec.tx_end - rec.tx_start == 4192
    out = ch.end_tx(rec, rec.tx_end)
    assert out.delivered and not rec.corrupted


def test_simultaneous_start_collides():
    ch = Channel(PHY, MAC)
    a = ch.begin_tx(frame(0), 0)
    b = ch.begin_tx(frame(1), 0)
    assert a.corrupted and b.corrupted


def test_one_microsecond_overlap_collides():
    ch = Channel(PHY, MAC)
    a = ch.begin_tx(frame(0), 0)
    b = ch.begin_tx(frame(1), a.tx_end - 1)
    assert a.corrupted and b.corrupted


def test_back_to_back_does_not_collide():
    ch = Channel(PHY, MAC)
    a = ch.begin_tx(frame(0), 0)
    ch.end_tx(a, a.tx_end)
    b = ch.begin_tx(frame(1), a.tx_end)
    assert not a.corrupted and not b.corrupted


def test_three_way_overlap_all_corrupted():
    ch = Channel(PHY, MAC)
    recs = [ch.begin_tx(frame(i), i * 1000) for i in range(3)]
    outs = [ch.end_tx(r, r.tx_end) for r in recs]
    assert not any(o.delivered for o in outs)


def test_ack_overlap_corrupts_data():
    ch = Channel(PHY, MAC)
    data = ch.begin_tx(frame(0), 0)
    ack = Frame(9, FrameKind.ACK, COORDINATOR, NodeId(5, Role.END_DEVICE), 0, 0, 0)
    ack_rec = ch.begin_tx(ack, 100)
    assert not ch.end_tx(ack_rec, ack_rec.tx_end).delivered
    assert not ch.end_tx(data, data.tx_end).delivered


def test_sense_cases():
    ch = Channel(PHY, MAC)
    assert ch.sense(0, 128) is Verdict.IDLE
    rec = ch.begin_tx(frame(0), 0)
    assert ch.sense(100, 200) is Verdict.BUSY
    ch.end_tx(rec, rec.tx_end)
    # ended exactly at the window start: half-open, so idle
    assert ch.sense(rec.tx_end, rec.tx_end + 128) is Verdict.IDLE
    # retained history still counts within the window
    assert ch.sense(rec.tx_end - 1, rec.tx_end + 128) is Verdict.BUSY


def test_sense_respects_window_end():
    ch = Channel(PHY, MAC)
    ch.begin_tx(frame(0), 500)
    assert ch.sense(372, 500) is Verdict.IDLE
    assert ch.sense(373, 501) is Verdict.BUSY


@given(st.lists(st.tuples(st.integers(0, 20_000), st.integers(1, 127)), min_size=1,
                max_size=25))
def test_conservation_and_corruption_totality(starts):
    ch = Channel(PHY, MAC, keep_log=True)
    pending = []
    events = sorted((t, i, p) for i, (t, p) in enumerate(starts))
    for t, i, p in events:
        for rec in sorted((r for r in pending if r.tx_end <= t), key=lambda r: r.tx_end):
            ch.end_tx(rec, rec.tx_end)
            pending.remove(rec)
        pending.append(ch.begin_tx(frame(i, p), t))
        assert ch.started == ch.completed + len(ch.active)
    for rec in sorted(pending, key=lambda r: r.tx_end):
        ch.end_tx(rec, rec.tx_end)
    assert ch.corrupted <= ch.started
    for group in overlap_groups(ch.log):
        if len(group) > 1:
            assert all(r.corrupted for r in group)
        else:
            assert not group[0].corrupted
