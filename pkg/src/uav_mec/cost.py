"""Latency and energy bookkeeping for both computing placements.

Per S-UAV, a video chunk is either processed on board and the compressed
result transmitted, or transmitted raw and processed on the relay, which
splits its CPU evenly among the S-UAVs offloading in the same slot. S-UAVs
with no monitored targets carry no video and are excluded from the min-max
objective and the delay-difference metric.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidDecision
from .link import PhysicsConstants, rate, snr_coeff
from .scenario import Association, Position3D, Scenario, SUav


@dataclass(frozen=True)
class LatencyBreakdown:
    suav_id: int
    local_compute_s: float
    local_tx_s: float
    offload_tx_s: float
    ruav_compute_s: float
    total_s: float
    offloaded: bool
    active: bool  # carries video this slot (monitors at least one target)


@dataclass(frozen=True)
class EnergyBreakdown:
    owner: str  # "suav:<id>" or "ruav"
    comm_j: float
    comp_j: float
    hover_j: float

    @property
    def total_j(self) -> float:
        return self.comm_j + self.comp_j + self.hover_j


def effective_chunk_bits(scenario: Scenario, alpha: np.ndarray) -> np.ndarray:
    """Per-S-UAV task size: the chunk size if it monitors anything, else 0."""
    monitored = alpha.sum(axis=0) > 0
    sizes = np.array([s.chunk_bits for s in scenario.suavs])
    return np.where(monitored, sizes, 0.0)


def local_path_latency(suav: SUav, q_m: Position3D, constants: PhysicsConstants,
                       s_bits: float | None = None) -> tuple[float, float]:
    """(on-board compute time, compressed-transmit time)."""
    s = suav.chunk_bits if s_bits is None else s_bits
    if s == 0.0:
        return 0.0, 0.0
    t_loc = s * constants.f0_cycles_per_bit / suav.cpu_hz
    snr = snr_coeff(suav.tx_power_w, constants.rho0, constants.noise_w)
    r = rate(suav.current_pos.array, q_m.array, constants, snr)
    return t_loc, suav.compress_ratio * s / r


def offload_path_latency(suav: SUav, q_m: Position3D, constants: PhysicsConstants,
                         ruav_cpu_hz: float, n_offloaders: int,
                         s_bits: float | None = None) -> tuple[float, float]:
    """(raw-transmit time, fair-share relay compute time)."""
    s = suav.chunk_bits if s_bits is None else s_bits
    if s == 0.0:
        return 0.0, 0.0
    if n_offloaders < 1:
        raise InvalidDecision("offloading S-UAV needs n_offloaders >= 1")
    snr = snr_coeff(suav.tx_power_w, constants.rho0, constants.noise_w)
    r = rate(suav.current_pos.array, q_m.array, constants, snr)
    t_tx = s / r
    t_comp = s * constants.f0_cycles_per_bit * n_offloaders / ruav_cpu_hz
    return t_tx, t_comp


def total_latency(scenario: Scenario, association: Association,
                  beta: np.ndarray, q_m: Position3D) -> list[LatencyBreakdown]:
    """Per-S-UAV latency breakdowns with the decision-selected totals."""
    beta = np.asarray(beta, dtype=int)
    if beta.sum() > scenario.n0_cap:
        raise InvalidDecision("offloader count exceeds the relay cap")
    s_bits = effective_chunk_bits(scenario, association.alpha)
    n_off = int(beta.sum())
    out = []
    for j, suav in enumerate(scenario.suavs):
        s = float(s_bits[j])
        active = s > 0.0
        t_loc, t_tx_loc = local_path_latency(suav, q_m, scenario.constants, s_bits=s)
        if beta[j]:
            t_tx_off, t_comp_ruav = offload_path_latency(
                suav, q_m, scenario.constants, scenario.ruav.cpu_hz, n_off, s_bits=s)
        else:
            t_tx_off, t_comp_ruav = 0.0, 0.0
        total = (t_tx_off + t_comp_ruav) if beta[j] else (t_loc + t_tx_loc)
        out.append(LatencyBreakdown(
            suav_id=suav.id,
            local_compute_s=t_loc if not beta[j] else 0.0,
            local_tx_s=t_tx_loc if not beta[j] else 0.0,
            offload_tx_s=t_tx_off,
            ruav_compute_s=t_comp_ruav,
            total_s=total if active else 0.0,
            offloaded=bool(beta[j]),
            active=active,
        ))
    return out


def suav_energy(suav: SUav, beta_n: int, q_m: Position3D,
                constants: PhysicsConstants, ruav_cpu_hz: float,
                n_offloaders: int = 1, s_bits: float | None = None) -> EnergyBreakdown:
    s = suav.chunk_bits if s_bits is None else s_bits
    if s == 0.0:
        return EnergyBreakdown(f"suav:{suav.id}", 0.0, 0.0, suav.hover_energy_j)
    if beta_n:
        t_tx, _ = offload_path_latency(
            suav, q_m, constants, ruav_cpu_hz, n_offloaders, s_bits=s)
        comp = 0.0
    else:
        _, t_tx = local_path_latency(suav, q_m, constants, s_bits=s)
        comp = suav.cpu_hz**2 * constants.zeta * s * constants.f0_cycles_per_bit
    return EnergyBreakdown(
        owner=f"suav:{suav.id}",
        comm_j=suav.tx_power_w * t_tx,
        comp_j=comp,
        hover_j=suav.hover_energy_j,
    )


def ruav_energy(scenario: Scenario, beta: np.ndarray,
                s_bits: np.ndarray | None = None) -> EnergyBreakdown:
    """Relay compute energy via the fair-share auxiliary xi_n = beta_n * sum(beta)."""
    beta = np.asarray(beta, dtype=float)
    if s_bits is None:
        s_bits = np.array([s.chunk_bits for s in scenario.suavs])
    xi = beta * beta.sum()
    c = scenario.constants
    comp = float(np.sum(xi * scenario.ruav.cpu_hz**2 * c.zeta
                        * c.f0_cycles_per_bit * s_bits))
    return EnergyBreakdown(
        owner="ruav", comm_j=0.0, comp_j=comp,
        hover_j=scenario.ruav.hover_energy_j,
    )


def all_energies(scenario: Scenario, association: Association,
                 beta: np.ndarray, q_m: Position3D) -> list[EnergyBreakdown]:
    beta = np.asarray(beta, dtype=int)
    s_bits = effective_chunk_bits(scenario, association.alpha)
    n_off = max(int(beta.sum()), 1)
    out = [
        suav_energy(suav, int(beta[j]), q_m, scenario.constants,
                    scenario.ruav.cpu_hz, n_offloaders=n_off, s_bits=float(s_bits[j]))
        for j, suav in enumerate(scenario.suavs)
    ]
    out.append(ruav_energy(scenario, beta, s_bits=s_bits))
    return out


def objective_and_spread(latencies: list[LatencyBreakdown]) -> tuple[float, float]:
    """(max latency, population stddev) over S-UAVs that carry video."""
    if not latencies:
        raise ValueError("need at least one latency entry")
    totals = [lb.total_s for lb in latencies if lb.active]
    if not totals:
        return 0.0, 0.0
    arr = np.array(totals)
    return float(arr.max()), float(arr.std())


def evaluate_solution(scenario: Scenario, association: Association,
                      beta: np.ndarray, q_m: Position3D):
    """Exact objective, spread and breakdowns at one (alpha, beta, q_M) point.

    The scenario must already be repositioned under the association.
    """
    lats = total_latency(scenario, association, beta, q_m)
    objective, spread = objective_and_spread(lats)
    energies = all_energies(scenario, association, beta, q_m)
    return objective, spread, lats, energies
