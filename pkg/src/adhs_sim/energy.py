"""First-order radio and processing energy model (free-space d^2 amplifier).

A *unit* message is ``bits_per_message`` bits.  Cluster-heads aggregate
completely, so whatever they forward upward is one unit, compressed to
``alpha`` of its bits before transmission.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class EnergyParams:
    e_elec: float = 5e-8  # J/bit, radio electronics (tx and rx)
    e_p: float = 5e-9  # J/bit per processed signal
    eps_fs: float = 1e-10  # J/bit/m^2, free-space amplifier
    alpha: float = 1.0  # compression ratio
    bits_per_message: float = 1.0

    def validate(self):
        for name in ("e_elec", "e_p", "eps_fs", "alpha", "bits_per_message"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.alpha > 1:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")


@dataclass(frozen=True)
class EnergyBreakdown:
    receive: float = 0.0
    process: float = 0.0
    transmit: float = 0.0

    @property
    def total(self) -> float:
        return self.receive + self.process + self.transmit

    def __add__(self, other: "EnergyBreakdown") -> "EnergyBreakdown":
        return EnergyBreakdown(
            self.receive + other.receive,
            self.process + other.process,
            self.transmit + other.transmit,
        )


ZERO = EnergyBreakdown()


def transmit_energy(p: EnergyParams, bits: float, d: float) -> float:
    return bits * (p.e_elec + p.eps_fs * d * d)


def receive_energy(p: EnergyParams, bits: float) -> float:
    return bits * p.e_elec


def process_energy(p: EnergyParams, units: float) -> float:
    return units * p.bits_per_message * p.e_p


def ch_transmit_energy(p: EnergyParams, d_up: float) -> float:
    """One aggregated unit, compressed by alpha, sent ``d_up`` metres."""
    return transmit_energy(p, p.alpha * p.bits_per_message, d_up)


def ch_round_energy_full(p: EnergyParams, n_children: int, d_up: float) -> EnergyBreakdown:
    """CH round that processes its own datum and every child message."""
    return EnergyBreakdown(
        receive_energy(p, n_children * p.bits_per_message),
        process_energy(p, n_children + 1),
        ch_transmit_energy(p, d_up),
    )


def ch_round_energy_quiet(p: EnergyParams, n_children: int, d_up: float) -> EnergyBreakdown:
    """CH round that still receives every child but processes only its own datum."""
    return EnergyBreakdown(
        receive_energy(p, n_children * p.bits_per_message),
        process_energy(p, 1),
        ch_transmit_energy(p, d_up),
    )


def ch_avg_energy(p: EnergyParams, r: float, n_children: int, d_up: float) -> float:
    """Mean per-round CH energy when child data is processed at rate ``r``."""
    if not 0.0 <= r <= 1.0:
        raise ValueError(f"sample rate must be in [0, 1], got {r}")
    return (
        receive_energy(p, n_children * p.bits_per_message)
        + process_energy(p, r * n_children + 1)
        + ch_transmit_energy(p, d_up)
    )
