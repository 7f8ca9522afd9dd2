"""Per-node packet arrival processes."""

from __future__ import annotations

import math
from typing import Iterator

from .config import TrafficSpec
from .core import US_PER_S
from .engine import RandomStream


def generate_traffic(spec: TrafficSpec, stream: RandomStream, end_us: int) -> Iterator[int]:
    """Arrival instants (us) in ``[0, end_us]``.

    The first arrival sits at a uniform random phase in ``[0, interarrival)``.
    After that, gaps are either the constant interarrival or i.i.d.
    exponential with that mean, rounded to the nearest microsecond.
    """
    gap_us = spec.interarrival_us
    t = stream.below(gap_us)
    if spec.interarrival_model == "constant":
        while t <= end_us:
            yield t
            t += gap_us
        return
    mean_s = spec.interarrival_s
    while t <= end_us:
        yield t
        t += math.floor(stream.exponential(mean_s) * US_PER_S + 0.5)
