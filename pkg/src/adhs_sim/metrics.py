"""Headline numbers: symbolic CH energy totals, processing savings, summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, List, Optional, Sequence

from adhs_sim.energy import EnergyParams, ch_transmit_energy, process_energy, receive_energy
from adhs_sim.engine import Network, RoundReport, SimReport

_REL = 1e-9


@dataclass(frozen=True)
class SymbolicEnergy:
    """Total written as ``coeff_er*E_r + coeff_ep*E_p + coeff_alpha_et*(alpha*E_t)``, per unit message."""

    coeff_er: Fraction
    coeff_ep: Fraction
    coeff_alpha_et: Fraction

    def evaluate(self, p: EnergyParams, d_up: float) -> float:
        return (
            float(self.coeff_er) * receive_energy(p, p.bits_per_message)
            + float(self.coeff_ep) * process_energy(p, 1)
            + float(self.coeff_alpha_et) * ch_transmit_energy(p, d_up)
        )

    def __str__(self) -> str:
        return f"{_fmt(self.coeff_er)} E_r + {_fmt(self.coeff_ep)} E_p + {_fmt(self.coeff_alpha_et)} αE_t"

    def as_tuple(self):
        return (self.coeff_er, self.coeff_ep, self.coeff_alpha_et)

    def to_json(self) -> Dict[str, float]:
        return {"E_r": float(self.coeff_er), "E_p": float(self.coeff_ep), "alpha_E_t": float(self.coeff_alpha_et)}


def _fmt(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return repr(float(x))


def _exact(x: float) -> Optional[Fraction]:
    f = Fraction(x).limit_denominator(10_000)
    if abs(float(f) - x) <= _REL * max(1.0, abs(x)):
        return f
    return None


def ch_distance_class(net: Network) -> Optional[float]:
    """The common CH uplink distance, or None if CH uplinks differ in length."""
    ds = [net.d_up[ch] for ch in net.chs]
    if not ds:
        return 0.0
    if max(ds) - min(ds) <= _REL * max(1.0, max(ds)):
        return ds[0]
    return None


def symbolic_ch_total(report: RoundReport, net: Network, p: EnergyParams) -> Optional[SymbolicEnergy]:
    """Recover exact unit-cost coefficients of the CHs' energy in one round.

    Returns None when CH uplinks span several distance classes or the
    coefficients are not (close to) small rationals.
    """
    d = ch_distance_class(net)
    if d is None:
        return None
    e_r = math.fsum(report.per_node[ch].energy.receive for ch in net.chs if ch in report.per_node)
    e_p = math.fsum(report.per_node[ch].energy.process for ch in net.chs if ch in report.per_node)
    e_t = math.fsum(report.per_node[ch].energy.transmit for ch in net.chs if ch in report.per_node)
    coeffs = [
        _exact(e_r / receive_energy(p, p.bits_per_message)),
        _exact(e_p / process_energy(p, 1)),
        _exact(e_t / ch_transmit_energy(p, d)),
    ]
    if any(c is None for c in coeffs):
        return None
    return SymbolicEnergy(*coeffs)


def average_symbolic(items: Sequence[Optional[SymbolicEnergy]]) -> Optional[SymbolicEnergy]:
    if not items or any(s is None for s in items):
        return None
    n = len(items)
    return SymbolicEnergy(
        sum((s.coeff_er for s in items), Fraction(0)) / n,
        sum((s.coeff_ep for s in items), Fraction(0)) / n,
        sum((s.coeff_alpha_et for s in items), Fraction(0)) / n,
    )


def ep_savings_ratio(before: SymbolicEnergy, after: SymbolicEnergy) -> Fraction:
    if before.coeff_ep <= 0:
        raise ValueError("baseline processing coefficient must be > 0")
    return (before.coeff_ep - after.coeff_ep) / before.coeff_ep


def steady_window(report: SimReport) -> int:
    """Length of the trailing window used as the steady-state average.

    The least common multiple of the final CH periods, capped at the run length.
    """
    periods = [st.period_c for st in report.final_states.values()] or [1]
    w = reduce(lambda a, b: a * b // math.gcd(a, b), periods, 1)
    return max(1, min(w, len(report.rounds)))


def symbolic_before_after(report: SimReport, net: Network, p: EnergyParams):
    before = symbolic_ch_total(report.rounds[0], net, p)
    w = steady_window(report)
    after = average_symbolic([symbolic_ch_total(rr, net, p) for rr in report.rounds[-w:]])
    return before, after


def summary(report: SimReport, net: Network, p: EnergyParams) -> Dict:
    before, after = symbolic_before_after(report, net, p)
    savings = None
    if before is not None and after is not None and before.coeff_ep > 0:
        savings = float(ep_savings_ratio(before, after))
    ch_total = math.fsum(report.totals[ch].total for ch in net.chs)
    nch_total = math.fsum(report.totals[v].total for v in net.nchs)
    return {
        "rounds_run": len(report.rounds),
        "symbolic_before": None if before is None else before.to_json(),
        "symbolic_after": None if after is None else after.to_json(),
        "steady_window": steady_window(report),
        "ep_savings": savings,
        "lifetime_rounds": report.lifetime_rounds,
        "fidelity": report.fidelity,
        "lost_readings": report.lost_readings,
        "energy": {
            "total": report.network_total.total,
            "receive": report.network_total.receive,
            "process": report.network_total.process,
            "transmit": report.network_total.transmit,
            "ch_total": ch_total,
            "nch_total": nch_total,
        },
        "counts": {"ch": len(net.chs), "nch": len(net.nchs), "clusters": len(net.hierarchy.clusters)},
        "e_tot_per_round": [rr.e_tot_round for rr in report.rounds],
    }
