"""Outer alternating loop over (offload, placement, association), plus the
three baseline schemes.

Every block update is wrapped in an accept-only-if-not-worse guard, so the
reported objective trace is non-increasing by construction even when a block
solver is heuristic (budgeted tree search, rounded relaxation).
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import association as assoc_mod
from . import placement as place_mod
from .cost import (EnergyBreakdown, LatencyBreakdown, all_energies,
                   effective_chunk_bits, evaluate_solution)
from .errors import InfeasibleSubproblem, UavMecError
from .offload import solve_sp1
from .scenario import (Association, Position3D, Scenario, fov_rect,
                       feasible_association_mask, repositioned_scenario)

SCHEMES = ("proposed", "suav_only", "ruav_only", "static_suavs")
DEFAULT_TOL_S = 1e-3
DEFAULT_R_MAX = 20
_GUARD_SLACK = 1e-12


@dataclass
class SolverReport:
    scheme: str
    objective_trace: list
    alpha: np.ndarray
    beta: np.ndarray
    q_m: Position3D
    latencies: list[LatencyBreakdown]
    energies: list[EnergyBreakdown]
    delay_stddev_s: float
    iterations: int
    converged: bool
    wall_time: float
    lp_lower_bound: float = float("nan")

    @property
    def objective_s(self) -> float:
        return self.objective_trace[-1]


def convergence_check(trace, tol: float) -> bool:
    if len(trace) < 2:
        return False
    return abs(trace[-1] - trace[-2]) < tol


def nearest_covering_association(scenario: Scenario) -> Association:
    """Each target to its horizontally nearest covering S-UAV (ties: lowest id)."""
    mask = feasible_association_mask(scenario)
    alpha = np.zeros_like(mask)
    for i, target in enumerate(scenario.targets):
        best = None
        for j in np.flatnonzero(mask[i]):
            pos = scenario.suavs[j].initial_pos
            d2 = (pos.x - target.pos.x) ** 2 + (pos.y - target.pos.y) ** 2
            if best is None or (d2, j) < best:
                best = (d2, int(j))
        alpha[i, best[1]] = 1
    return Association(alpha=alpha, feasible_mask=mask)


def check_constraints(scenario: Scenario, association: Association,
                      beta: np.ndarray, q_m: Position3D,
                      static_positions: bool = False) -> list[str]:
    """Independent pass over every problem constraint; returns violations."""
    violations = []
    beta = np.asarray(beta)
    alpha = association.alpha
    if not np.isin(beta, (0, 1)).all():
        violations.append("offload decision is not binary")
    if beta.sum() > scenario.n0_cap:
        violations.append("offloader count exceeds the relay cap")
    lo, hi = scenario.ruav.box_lo.array, scenario.ruav.box_hi.array
    q = q_m.array
    if np.any(q < lo - 1e-9) or np.any(q > hi + 1e-9):
        violations.append("relay position outside its box")
    if not np.isin(alpha, (0, 1)).all():
        violations.append("association is not binary")
    if np.any(alpha.sum(axis=1) < 1):
        violations.append("some target is unmonitored")
    if np.any(alpha > association.feasible_mask):
        violations.append("association violates the coverage mask")
    placed = (scenario if static_positions
              else repositioned_scenario(scenario, alpha))
    for i in range(scenario.n_targets):
        target = scenario.targets[i]
        strictly_inside = False
        for j in np.flatnonzero(alpha[i]):
            rect = fov_rect(placed.suavs[j])
            if (rect.x_lo < target.pos.x < rect.x_hi
                    and rect.y_lo < target.pos.y < rect.y_hi):
                strictly_inside = True
        if not strictly_inside:
            violations.append(
                f"target {i} not strictly inside any assigned footprint")
    energies = all_energies(placed, association, beta.astype(int), q_m)
    for e, suav in zip(energies[:-1], scenario.suavs):
        if e.total_j > suav.energy_budget_j + 1e-9:
            violations.append(f"S-UAV {suav.id} energy budget exceeded")
    if energies[-1].total_j > scenario.ruav.energy_budget_j + 1e-9:
        violations.append("relay energy budget exceeded")
    return violations


def _forced_ruav_only_beta(placed: Scenario, association: Association,
                           q_m: Position3D) -> np.ndarray:
    """Offload every video-carrying S-UAV, largest local latency first,
    until the relay cap binds."""
    from .offload import sp1_terms

    t = sp1_terms(placed, association, q_m)
    active = np.flatnonzero(t.active)
    local = t.t_loc + t.t_tx_loc
    order = sorted(active.tolist(), key=lambda j: (-local[j], j))
    beta = np.zeros(t.n, dtype=int)
    for j in order[:placed.n0_cap]:
        beta[j] = 1
    return beta


def run_scheme(scenario: Scenario, scheme: str,
               tol: float = DEFAULT_TOL_S, r_max: int = DEFAULT_R_MAX,
               node_budget: int = assoc_mod.DEFAULT_NODE_BUDGET,
               time_budget_s: float = assoc_mod.DEFAULT_TIME_BUDGET_S
               ) -> SolverReport:
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    start = time.monotonic()
    static = scheme == "static_suavs"

    association = nearest_covering_association(scenario)
    placed = scenario if static else repositioned_scenario(scenario, association.alpha)
    q_m = place_mod.default_initial_position(placed)
    beta = np.zeros(scenario.n_suavs, dtype=int)
    if scheme == "ruav_only":
        beta = _forced_ruav_only_beta(placed, association, q_m)

    objective, _, _, _ = evaluate_solution(placed, association, beta, q_m)
    trace = [objective]
    lp_bound = float("nan")
    converged = False
    iterations = 0

    for _ in range(r_max):
        iterations += 1
        # Offload block.
        if scheme == "proposed":
            decision = solve_sp1(placed, association, q_m)
            cand, _, _, _ = evaluate_solution(placed, association, decision.beta, q_m)
            if cand <= objective + _GUARD_SLACK:
                beta, objective = decision.beta, cand
                lp_bound = decision.lp_lower_bound
        elif scheme == "ruav_only":
            forced = _forced_ruav_only_beta(placed, association, q_m)
            cand, _, _, _ = evaluate_solution(placed, association, forced, q_m)
            if cand <= objective + _GUARD_SLACK or iterations == 1:
                beta, objective = forced, min(cand, objective) if iterations > 1 else cand
        # suav_only and static_suavs keep their beta rule (zeros / proposed).
        if scheme == "static_suavs":
            decision = solve_sp1(placed, association, q_m)
            cand, _, _, _ = evaluate_solution(placed, association, decision.beta, q_m)
            if cand <= objective + _GUARD_SLACK:
                beta, objective = decision.beta, cand
                lp_bound = decision.lp_lower_bound

        # Placement block.
        iterate, _, _ = place_mod.sca_loop(placed, association, beta, q_m_init=q_m)
        cand, _, _, _ = evaluate_solution(placed, association, beta, iterate.q_m)
        if cand <= objective + _GUARD_SLACK:
            q_m, objective = iterate.q_m, cand

        # Association block.
        new_assoc, _ = assoc_mod.solve_association(
            scenario, beta, q_m, node_budget=node_budget,
            time_budget_s=time_budget_s, warm_alpha=association.alpha,
            static_positions=static)
        new_placed = (scenario if static
                      else repositioned_scenario(scenario, new_assoc.alpha))
        try:
            cand, _, _, _ = evaluate_solution(new_placed, new_assoc, beta, q_m)
        except UavMecError:
            cand = float("inf")
        if cand <= objective + _GUARD_SLACK:
            ruav_e = all_energies(new_placed, new_assoc, beta, q_m)[-1]
            if ruav_e.total_j <= scenario.ruav.energy_budget_j:
                association, placed, objective = new_assoc, new_placed, cand

        trace.append(objective)
        if convergence_check(trace, tol):
            converged = True
            break

    objective, spread, lats, energies = evaluate_solution(
        placed, association, beta, q_m)
    return SolverReport(
        scheme=scheme,
        objective_trace=trace,
        alpha=association.alpha,
        beta=beta,
        q_m=q_m,
        latencies=lats,
        energies=energies,
        delay_stddev_s=spread,
        iterations=iterations,
        converged=converged,
        wall_time=time.monotonic() - start,
        lp_lower_bound=lp_bound,
    )


def run_proposed(scenario: Scenario, tol: float = DEFAULT_TOL_S,
                 r_max: int = DEFAULT_R_MAX, **kwargs) -> SolverReport:
    return run_scheme(scenario, "proposed", tol=tol, r_max=r_max, **kwargs)


def run_baseline(scenario: Scenario, scheme: str, **kwargs) -> SolverReport:
    if scheme == "proposed":
        raise ValueError("use run_proposed for the proposed scheme")
    return run_scheme(scenario, scheme, **kwargs)
