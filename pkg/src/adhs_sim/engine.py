"""Synchronous round loop over a built hierarchy."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from adhs_sim.adhs import AdhsParams, BufferOnly, ChState, ProcessAndTransmit, adhs_init, adhs_step
from adhs_sim.energy import (
    ZERO,
    EnergyBreakdown,
    EnergyParams,
    ch_transmit_energy,
    process_energy,
    receive_energy,
    transmit_energy,
)
from adhs_sim.field import Field, Reading, sample_field
from adhs_sim.hcc import ClusterHierarchy
from adhs_sim.topology import Role, SensorNode, euclidean_distance


@dataclass
class Network:
    nodes: List[SensorNode]
    hierarchy: ClusterHierarchy

    def __post_init__(self):
        self.by_id = {nd.id: nd for nd in self.nodes}
        self.bs = self.hierarchy.bs
        self.d_up = {
            nd.id: euclidean_distance(nd.pos, self.by_id[nd.parent].pos)
            for nd in self.nodes
            if nd.parent is not None
        }
        depth = {self.bs: 0}

        def _depth(v):
            if v not in depth:
                depth[v] = _depth(self.by_id[v].parent) + 1
            return depth[v]

        for nd in self.nodes:
            _depth(nd.id)
        self.depth = depth
        self.chs = sorted((nd.id for nd in self.nodes if nd.role == Role.CH), key=lambda i: (-depth[i], i))
        self.nchs = sorted(nd.id for nd in self.nodes if nd.role == Role.NCH)

    def role(self, node: int) -> Role:
        return self.by_id[node].role


@dataclass(frozen=True)
class NodeRound:
    energy: EnergyBreakdown
    battery: float
    action: Optional[str] = None
    variance: Optional[float] = None
    period_c: Optional[int] = None
    processed_units: int = 0
    flushed_units: int = 0


@dataclass
class RoundReport:
    round: int
    per_node: Dict[int, NodeRound]
    bs_received: List[Tuple[int, float]]
    delivered: Dict[int, float]
    e_tot_round: float
    lost_readings: int = 0
    deaths: List[int] = field(default_factory=list)


@dataclass
class SimReport:
    rounds: List[RoundReport]
    lifetime_rounds: Optional[int]
    death_round: Dict[int, int]
    totals: Dict[int, EnergyBreakdown]
    network_total: EnergyBreakdown
    lost_readings: int
    final_states: Dict[int, ChState]
    fidelity: Dict[str, float] = field(default_factory=dict)


class Simulation:
    def __init__(
        self,
        network: Network,
        fld: Field,
        adhs: AdhsParams,
        energy: EnergyParams,
        battery_j: float = math.inf,
    ):
        adhs.validate()
        energy.validate()
        self.net = network
        self.field = fld
        self.adhs = adhs
        self.energy = energy
        self.round = 0
        self.battery = {nd.id: battery_j for nd in network.nodes if nd.id != network.bs}
        self.alive = set(self.battery)
        self.states = {ch: adhs_init(adhs) for ch in network.chs}
        self.death_round: Dict[int, int] = {}
        self.lifetime: Optional[int] = None

    def _sense(self, node: int) -> float:
        return sample_field(self.field, self.net.by_id[node].pos, self.round)

    def run_round(self) -> RoundReport:
        net, p, t = self.net, self.energy, self.round
        inbox: Dict[int, List[Reading]] = {ch: [] for ch in net.chs}
        per_node: Dict[int, NodeRound] = {}
        bs_received: List[Tuple[int, float]] = []
        delivered: Dict[int, float] = {}
        deaths: List[int] = []
        lost = 0

        def die(v):
            self.alive.discard(v)
            self.death_round[v] = t
            deaths.append(v)
            per_node[v] = NodeRound(ZERO, self.battery[v], "dead")

        def send(v, value):
            nonlocal lost
            parent = net.by_id[v].parent
            if parent == net.bs:
                bs_received.append((v, value))
                delivered[v] = value
            elif parent in self.alive:
                inbox[parent].append(Reading(v, t, value))
                delivered[v] = value
            else:
                lost += 1

        for v in net.nchs:
            if v not in self.alive:
                per_node[v] = NodeRound(ZERO, self.battery[v], "dead")
                continue
            cost = transmit_energy(p, p.bits_per_message, net.d_up[v])
            if self.battery[v] < cost:
                die(v)
                continue
            self.battery[v] -= cost
            per_node[v] = NodeRound(EnergyBreakdown(transmit=cost), self.battery[v])
            send(v, self._sense(v))

        for ch in net.chs:
            if ch not in self.alive:
                per_node[ch] = NodeRound(ZERO, self.battery[ch], "dead")
                continue
            msgs = inbox[ch]
            state = self.states[ch]
            new_state, action = adhs_step(state, Reading(ch, t, self._sense(ch)), msgs, self.adhs)
            receive = receive_energy(p, len(msgs) * p.bits_per_message)
            if isinstance(action, ProcessAndTransmit):
                process = process_energy(p, action.processed_units)
                out_value = new_state.last_aggregate
            else:
                process = process_energy(p, 1)
                out_value = state.last_aggregate if self.adhs.quiet_transmit == "stale" else None
            transmit = ch_transmit_energy(p, net.d_up[ch]) if out_value is not None else 0.0
            cost = EnergyBreakdown(receive, process, transmit)
            if self.battery[ch] < cost.total:
                die(ch)
                lost += len(msgs)
                if self.lifetime is None:
                    self.lifetime = t
                continue
            self.battery[ch] -= cost.total
            self.states[ch] = new_state
            decided = not isinstance(action, BufferOnly)
            per_node[ch] = NodeRound(
                cost,
                self.battery[ch],
                action.name,
                new_state.last_variance if decided else None,
                new_state.period_c,
                action.processed_units if isinstance(action, ProcessAndTransmit) else 1,
                action.flushed_units if isinstance(action, ProcessAndTransmit) else 0,
            )
            if out_value is not None:
                send(ch, out_value)

        e_tot = math.fsum(nr.energy.total for nr in per_node.values())
        self.round += 1
        return RoundReport(t, per_node, bs_received, delivered, e_tot, lost, deaths)

    def chs_alive(self) -> bool:
        return any(ch in self.alive for ch in self.net.chs)

    def run(self, rounds: int) -> SimReport:
        if rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {rounds}")
        reports = []
        for _ in range(rounds):
            reports.append(self.run_round())
            if self.net.chs and not self.chs_alive():
                break
        totals = {v: ZERO for v in self.battery}
        for rr in reports:
            for v, nr in rr.per_node.items():
                totals[v] = totals[v] + nr.energy
        network_total = ZERO
        for v in sorted(totals):
            network_total = network_total + totals[v]
        report = SimReport(
            reports,
            self.lifetime,
            dict(self.death_round),
            totals,
            network_total,
            sum(rr.lost_readings for rr in reports),
            dict(self.states),
        )
        report.fidelity = fidelity(report, self.field, self.net)
        return report


def round_energy_split(rr: RoundReport, net: Network) -> Tuple[float, float]:
    """(sum of NCH transmit energy, sum of CH receive+process+transmit) for one round."""
    e_nch = math.fsum(rr.per_node[v].energy.transmit for v in net.nchs)
    e_ch = math.fsum(
        rr.per_node[v].energy.receive + rr.per_node[v].energy.process + rr.per_node[v].energy.transmit
        for v in net.chs
    )
    return e_nch, e_ch


def fidelity(report: SimReport, fld: Field, net: Network) -> Dict[str, float]:
    """Error of the value held upstream for each cluster against ground truth.

    For every CH and round after its first successful delivery, the held value
    is the latest value that arrived at its uplink (stale values persist).  The
    truth is the error-free mean-of-means of the CH's subtree for that round.
    """
    held: Dict[int, float] = {}
    errors: List[float] = []
    exact = 0
    for rr in report.rounds:
        for v, val in rr.delivered.items():
            held[v] = val
        truth: Dict[int, float] = {}

        def true_value(v):
            if v not in truth:
                own = sample_field(fld, net.by_id[v].pos, rr.round)
                kids = net.by_id[v].children
                if kids:
                    truth[v] = math.fsum([own] + [true_value(c) for c in kids]) / (len(kids) + 1)
                else:
                    truth[v] = own
            return truth[v]

        for ch in net.chs:
            if ch in held:
                tv = true_value(ch)
                err = abs(held[ch] - tv)
                errors.append(err)
                if err <= 1e-9 * max(1.0, abs(tv)):
                    exact += 1
    if not errors:
        return {"mean_abs_error": 0.0, "max_abs_error": 0.0, "exact_fraction": 1.0, "samples": 0}
    return {
        "mean_abs_error": math.fsum(errors) / len(errors),
        "max_abs_error": max(errors),
        "exact_fraction": exact / len(errors),
        "samples": len(errors),
    }


def run(cfg) -> SimReport:
    """Build the configured scenario and run it."""
    from adhs_sim.scenarios import build_scenario

    net, fld = build_scenario(cfg)
    sim = Simulation(net, fld, cfg.adhs, cfg.energy, cfg.battery_j)
    return sim.run(cfg.rounds)
