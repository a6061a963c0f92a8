"""Target-to-S-UAV association with fixed offload decision and relay position.

Depth-first branch and bound over one monitoring S-UAV per target (adding a
second monitor can only raise some S-UAV's altitude while its task size is
unchanged, so duplicates never help; the exhaustive oracle in tests confirms
this on every solvable instance). The bound at a node is the exact latency of
every S-UAV whose candidate pool is fully decided, which no completion can
change.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleSubproblem
from .link import rate_at_dist_sq, snr_coeff
from .scenario import (Association, Position3D, Scenario,
                       feasible_association_mask, reposition)

DEFAULT_NODE_BUDGET = 1_000_000
DEFAULT_TIME_BUDGET_S = 10.0


@dataclass(frozen=True)
class BnbNode:
    """Search node: chosen S-UAV per target in branch order, -1 undecided."""

    assigned_prefix: tuple[int, ...]
    lower_bound_s: float
    depth: int


@dataclass
class SearchInfo:
    objective: float
    exact: bool
    nodes: int
    gap: float = 0.0


class _Context:
    """Fixed data plus a latency memo for one association solve."""

    def __init__(self, scenario: Scenario, beta: np.ndarray, q_m: Position3D,
                 static_positions: bool = False):
        self.scenario = scenario
        self.beta = np.asarray(beta, dtype=int)
        self.n_off = int(self.beta.sum())
        self.q_m = q_m.array
        self.static_positions = static_positions
        self.mask = feasible_association_mask(scenario)
        self.cover = [np.flatnonzero(self.mask[i]).tolist()
                      for i in range(scenario.n_targets)]
        self.order = sorted(range(scenario.n_targets),
                            key=lambda i: (len(self.cover[i]), i))
        self._memo: dict[tuple[int, int], tuple[float, bool]] = {}

    def latency(self, suav_index: int, target_bits: int) -> tuple[float, bool]:
        """(exact latency, energy-feasible) for one S-UAV and target bitmask."""
        key = (suav_index, target_bits)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        scenario = self.scenario
        suav = scenario.suavs[suav_index]
        targets = [scenario.targets[i]
                   for i in _bits_to_indices(target_bits)]
        if not targets:
            result = (0.0, True)
            self._memo[key] = result
            return result
        pos = suav.initial_pos if self.static_positions else reposition(suav, targets)
        c = scenario.constants
        snr = snr_coeff(suav.tx_power_w, c.rho0, c.noise_w)
        d2 = max(float(((pos.array - self.q_m) ** 2).sum()), 1.0)
        r = rate_at_dist_sq(d2, c.bandwidth_hz, snr.gamma1)
        s = suav.chunk_bits
        if self.beta[suav_index]:
            total = s / r + s * c.f0_cycles_per_bit * self.n_off / scenario.ruav.cpu_hz
            energy = suav.tx_power_w * s / r + suav.hover_energy_j
        else:
            total = (s * c.f0_cycles_per_bit / suav.cpu_hz
                     + suav.compress_ratio * s / r)
            energy = (suav.tx_power_w * suav.compress_ratio * s / r
                      + suav.cpu_hz**2 * c.zeta * s * c.f0_cycles_per_bit
                      + suav.hover_energy_j)
        result = (total, energy <= suav.energy_budget_j)
        self._memo[key] = result
        return result


def _bits_to_indices(bits: int) -> list[int]:
    out = []
    i = 0
    while bits:
        if bits & 1:
            out.append(i)
        bits >>= 1
        i += 1
    return out


def _alpha_from_choice(ctx: _Context, choice: dict[int, int]) -> np.ndarray:
    alpha = np.zeros_like(ctx.mask)
    for target_index, suav_index in choice.items():
        alpha[target_index, suav_index] = 1
    return alpha


def node_lower_bound(node: BnbNode, ctx: _Context) -> float:
    """Max exact latency over S-UAVs whose candidate pool is fully decided."""
    decided_targets = set()
    assigned_bits = [0] * ctx.scenario.n_suavs
    for depth, suav_index in enumerate(node.assigned_prefix[:node.depth]):
        target_index = ctx.order[depth]
        decided_targets.add(target_index)
        if suav_index >= 0:
            assigned_bits[suav_index] |= 1 << target_index
    bound = 0.0
    for j in range(ctx.scenario.n_suavs):
        pool = {i for i in range(ctx.scenario.n_targets) if ctx.mask[i, j]}
        if pool <= decided_targets:
            t, _ = ctx.latency(j, assigned_bits[j])
            bound = max(bound, t)
    return bound


def greedy_incumbent(scenario: Scenario, beta: np.ndarray,
                     q_m: Position3D,
                     static_positions: bool = False) -> Association:
    """Feasible warm start: most-constrained targets first, each to the
    covering S-UAV whose latency grows the least."""
    ctx = _Context(scenario, beta, q_m, static_positions=static_positions)
    assigned_bits = [0] * scenario.n_suavs
    choice = {}
    for target_index in ctx.order:
        best = None
        for j in ctx.cover[target_index]:
            before, _ = ctx.latency(j, assigned_bits[j])
            after, _ = ctx.latency(j, assigned_bits[j] | (1 << target_index))
            key = (after - before, j)
            if best is None or key < best[0]:
                best = (key, j)
        j = best[1]
        choice[target_index] = j
        assigned_bits[j] |= 1 << target_index
    alpha = _alpha_from_choice(ctx, choice)
    return Association(alpha=alpha, feasible_mask=ctx.mask)


def _evaluate_full(ctx: _Context, alpha: np.ndarray) -> tuple[float, bool]:
    """Exact objective of a complete association, and its energy feasibility."""
    worst = 0.0
    for j in range(ctx.scenario.n_suavs):
        bits = 0
        for i in np.flatnonzero(alpha[:, j]):
            bits |= 1 << int(i)
        t, ok = ctx.latency(j, bits)
        if not ok:
            return worst, False
        worst = max(worst, t)
    return worst, True


def solve_association(scenario: Scenario, beta: np.ndarray, q_m: Position3D,
                      node_budget: int = DEFAULT_NODE_BUDGET,
                      time_budget_s: float = DEFAULT_TIME_BUDGET_S,
                      warm_alpha: np.ndarray | None = None,
                      static_positions: bool = False
                      ) -> tuple[Association, SearchInfo]:
    ctx = _Context(scenario, beta, q_m, static_positions=static_positions)
    n_targets = scenario.n_targets
    n_suavs = scenario.n_suavs

    # Pool sizes per S-UAV: how many still-undecided targets it could monitor.
    remaining = ctx.mask.sum(axis=0).astype(int)

    incumbent_alpha = None
    incumbent_obj = float("inf")
    greedy = greedy_incumbent(scenario, beta, q_m,
                              static_positions=static_positions)
    for alpha in filter(lambda a: a is not None, [warm_alpha, greedy.alpha]):
        obj, ok = _evaluate_full(ctx, alpha)
        if ok and obj < incumbent_obj:
            incumbent_alpha, incumbent_obj = alpha, obj

    assigned_bits = [0] * n_suavs
    choice: dict[int, int] = {}
    state = {"nodes": 0, "aborted": [], "start": time.monotonic()}

    def out_of_budget() -> bool:
        if state["nodes"] >= node_budget:
            return True
        if state["nodes"] % 1024 == 0:
            return time.monotonic() - state["start"] > time_budget_s
        return False

    def dfs(depth: int, bound: float) -> None:
        nonlocal incumbent_alpha, incumbent_obj
        state["nodes"] += 1
        if bound >= incumbent_obj:
            return
        if depth == n_targets:
            incumbent_alpha = _alpha_from_choice(ctx, choice)
            incumbent_obj = bound
            return
        if out_of_budget():
            state["aborted"].append(bound)
            return
        target_index = ctx.order[depth]
        children = []
        for j in ctx.cover[target_index]:
            before, _ = ctx.latency(j, assigned_bits[j])
            after, _ = ctx.latency(j, assigned_bits[j] | (1 << target_index))
            children.append((after - before, j))
        children.sort()
        for _, j in children:
            new_bound = bound
            feasible = True
            for cand in ctx.cover[target_index]:
                remaining[cand] -= 1
            assigned_bits[j] |= 1 << target_index
            for cand in ctx.cover[target_index]:
                if remaining[cand] == 0:  # pool fully decided: bound is exact
                    t, ok = ctx.latency(cand, assigned_bits[cand])
                    if not ok:
                        feasible = False
                        break
                    new_bound = max(new_bound, t)
            if feasible:
                choice[target_index] = j
                dfs(depth + 1, new_bound)
                del choice[target_index]
            assigned_bits[j] &= ~(1 << target_index)
            for cand in ctx.cover[target_index]:
                remaining[cand] += 1

    dfs(0, 0.0)

    if incumbent_alpha is None:
        raise InfeasibleSubproblem(
            "no energy-feasible association covers every target")
    exact = not state["aborted"]
    gap = 0.0 if exact else incumbent_obj - min(state["aborted"])
    info = SearchInfo(objective=incumbent_obj, exact=exact,
                      nodes=state["nodes"], gap=gap)
    return Association(alpha=incumbent_alpha, feasible_mask=ctx.mask), info
