"""Per-cluster-head adaptive sampling controller.

Every round a CH buffers its own reading and whatever its children sent.  Only
when ``cycle_counter`` reaches ``period_c`` does it decide: if the buffered
window is quiet (variance <= T) it re-sends its previous aggregate and
lengthens the period; otherwise it processes the window, sends a fresh
aggregate and drops back to period 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Tuple, Union

from adhs_sim.field import Reading, variance

CHILD = -1  # source id for child values passed without a Reading


@dataclass(frozen=True)
class AdhsParams:
    t_threshold: float
    l_limit: float
    literal_mode: bool = False
    quiet_transmit: str = "stale"
    variance_kind: str = "population"

    def validate(self):
        if not self.t_threshold >= 0:
            raise ValueError(f"t_threshold must be >= 0, got {self.t_threshold}")
        if not self.l_limit >= 1:
            raise ValueError(f"l_limit must be >= 1, got {self.l_limit}")
        if self.l_limit != math.inf and self.l_limit != int(self.l_limit):
            raise ValueError(f"l_limit must be an integer or inf, got {self.l_limit}")
        if self.quiet_transmit not in ("stale", "suppress"):
            raise ValueError(f"quiet_transmit must be 'stale' or 'suppress', got {self.quiet_transmit!r}")
        if self.variance_kind not in ("population", "sample"):
            raise ValueError(f"variance_kind must be 'population' or 'sample', got {self.variance_kind!r}")


@dataclass(frozen=True)
class ChState:
    period_c: int = 1
    cycle_counter: int = 1
    window_buffer: Tuple[Reading, ...] = ()
    last_aggregate: Optional[float] = None
    last_variance: float = 1.0


@dataclass(frozen=True)
class BufferOnly:
    name = "BufferOnly"


@dataclass(frozen=True)
class TransmitLast:
    name = "TransmitLast"


@dataclass(frozen=True)
class ProcessAndTransmit:
    """``flushed_units``: readings removed from the window.

    ``processed_units``: readings that cost processing this round.  Own samples
    are processed in the round they are taken, so a variance-triggered flush
    pays for every buffered child reading plus the current own sample, while a
    quiet window closed by the period cap only pays for the current round; its
    older, redundant child readings are dropped unprocessed.
    """

    flushed_units: int
    processed_units: int
    reason: str = "variance"  # "initial" | "variance" | "cap"
    name = "ProcessAndTransmit"


ChAction = Union[BufferOnly, TransmitLast, ProcessAndTransmit]


def adhs_init(params: AdhsParams) -> ChState:
    params.validate()
    return ChState()


def aggregate(values: Sequence[float]) -> float:
    if not values:
        raise ValueError("aggregate of an empty list")
    return math.fsum(values) / len(values)


def _growth_allowed(c: int, params: AdhsParams) -> bool:
    if params.literal_mode:
        return c <= params.l_limit
    return c < params.l_limit


def adhs_step(
    state: ChState,
    own_reading: Reading,
    child_values: Sequence[Union[float, Reading]],
    params: AdhsParams,
) -> Tuple[ChState, ChAction]:
    fresh = [own_reading] + [
        v if isinstance(v, Reading) else Reading(CHILD, own_reading.round, float(v)) for v in child_values
    ]
    window = state.window_buffer + tuple(fresh)

    if state.cycle_counter < state.period_c:
        return replace(state, cycle_counter=state.cycle_counter + 1, window_buffer=window), BufferOnly()

    c = state.period_c
    v = variance([r.value for r in window], params.variance_kind)
    latest = aggregate([r.value for r in fresh])
    n_now = len(fresh) - 1

    if state.last_aggregate is None:
        # nothing to re-send yet
        action = ProcessAndTransmit(len(window), n_now + 1, "initial")
        new_c = 1
    elif v > params.t_threshold:
        n_children = sum(1 for r in window if r.source != own_reading.source)
        action = ProcessAndTransmit(len(window), n_children + 1, "variance")
        new_c = 1
    elif _growth_allowed(c, params):
        new = ChState(c + 1, 1, window, state.last_aggregate, v)
        return new, TransmitLast()
    else:
        action = ProcessAndTransmit(len(window), n_now + 1, "cap")
        new_c = 1 if params.literal_mode else c
    return ChState(new_c, 1, (), latest, v), action
