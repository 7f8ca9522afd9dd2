import itertools

import pytest

from wpansim.channel import Channel
from wpansim.core import COORDINATOR, Frame, FrameKind, MacParams, NodeId, PhyParams, Role
from wpansim.engine import Engine, RandomStream
from wpansim.mac import Coordinator, EndDevice
from wpansim.metrics import Metrics


class Star:
    """Hand-wired star network without a traffic generator."""

    def __init__(self, n=1, phy=None, mac=None, seed=7, trace=None, streams=None):
        self.phy = phy or PhyParams()
        self.mac = mac or MacParams()
        self.engine = Engine(trace=trace)
        self.channel = Channel(self.phy, self.mac, keep_log=True)
        self.metrics = Metrics(self.phy, self.mac)
        self.ids = itertools.count()
        self.coordinator = Coordinator(self.phy, self.mac, self.engine, self.channel,
                                       self.metrics, self.ids.__next__)
        self.devices = []
        for i in range(1, n + 1):
            stream = streams[i - 1] if streams else RandomStream(seed, i)
            dev = EndDevice(NodeId(i, Role.END_DEVICE), self.phy, self.mac, self.engine,
                            self.channel, stream, self.metrics, self.coordinator)
            self.devices.append(dev)
            self.coordinator.devices[i] = dev

    def frame(self, dev, payload=114, at=None):
        now = self.engine.now if at is None else at
        f = Frame(next(self.ids), FrameKind.DATA, dev.node, COORDINATOR, payload,
                  dev.next_seq, now)
        dev.next_seq += 1
        return f

    def send(self, dev, payload=114):
        f = self.frame(dev, payload)
        self.metrics.record_submit(f, self.engine.now)
        dev.on_packet_from_upper(f, self.engine.now)
        return f


class RecordingStream:
    """Wraps a RandomStream and remembers every exponent asked for."""

    def __init__(self, inner, forced=None):
        self.inner = inner
        self.forced = forced
        self.exponents = []

    def bits(self, k):
        self.exponents.append(k)
        value = self.inner.bits(k)
        if self.forced is not None:
            return min(self.forced, (1 << k) - 1)
        return value


@pytest.fixture
def star():
    return Star
