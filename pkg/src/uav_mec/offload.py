"""Offloading decisions with fixed relay position and association.

The binary min-max problem is solved exactly by subset enumeration (the
instance sizes here make that cheap), while its LP relaxation -- with the
fair-share relay time linearized through xi_n = beta_n * sum(beta) -- is
solved alongside and reported as a certified lower bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import simplex
from .cost import effective_chunk_bits
from .errors import CapExceeded, InfeasibleSubproblem, NumericalFailure
from .link import rate_at_dist_sq, snr_coeff
from .scenario import Association, Position3D, Scenario

ENUMERATION_CAP = 20


@dataclass(frozen=True)
class OffloadDecision:
    beta: np.ndarray
    xi: np.ndarray
    slack_s: float
    relaxed: bool
    lp_lower_bound: float


@dataclass
class LinearProgram:
    c: np.ndarray
    a: np.ndarray
    b: np.ndarray
    upper: list
    row_labels: list = field(default_factory=list)
    var_labels: list = field(default_factory=list)

    @property
    def n_constraints(self) -> int:
        return len(self.b)

    def dump(self) -> str:
        """Fixed-format listing for cross-checks against external solvers."""
        lines = ["min " + " + ".join(
            f"{cj:.12g}*{v}" for cj, v in zip(self.c, self.var_labels) if cj)]
        for label, row, rhs in zip(self.row_labels, self.a, self.b):
            terms = " + ".join(f"{aj:.12g}*{v}"
                               for aj, v in zip(row, self.var_labels) if aj)
            lines.append(f"{label}: {terms} <= {rhs:.12g}")
        for u, v in zip(self.upper, self.var_labels):
            if u is not None:
                lines.append(f"bound: {v} <= {u:.12g}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Sp1Terms:
    """Per-S-UAV scalar coefficients of SP1 at fixed positions."""

    s_bits: np.ndarray
    t_loc: np.ndarray
    t_tx_loc: np.ndarray
    t_tx_off: np.ndarray
    k_ruav: np.ndarray       # relay compute seconds per unit of xi
    e_local: np.ndarray      # execution energy of the local branch
    e_offload: np.ndarray    # execution energy of the offload branch
    suav_budget: np.ndarray  # residual energy minus hover
    ruav_budget: float
    w_ruav: np.ndarray       # relay compute energy per unit of xi
    active: np.ndarray

    @property
    def n(self) -> int:
        return self.s_bits.size


def sp1_terms(scenario: Scenario, association: Association,
              q_m: Position3D) -> Sp1Terms:
    c = scenario.constants
    s_bits = effective_chunk_bits(scenario, association.alpha)
    n = scenario.n_suavs
    t_loc = np.zeros(n)
    t_tx_loc = np.zeros(n)
    t_tx_off = np.zeros(n)
    e_local = np.zeros(n)
    e_off = np.zeros(n)
    for j, suav in enumerate(scenario.suavs):
        s = float(s_bits[j])
        if s == 0.0:
            continue
        snr = snr_coeff(suav.tx_power_w, c.rho0, c.noise_w)
        d2 = float(np.sum((suav.current_pos.array - q_m.array) ** 2))
        r = rate_at_dist_sq(max(d2, 1.0), c.bandwidth_hz, snr.gamma1)
        t_loc[j] = s * c.f0_cycles_per_bit / suav.cpu_hz
        t_tx_loc[j] = suav.compress_ratio * s / r
        t_tx_off[j] = s / r
        e_local[j] = (suav.tx_power_w * t_tx_loc[j]
                      + suav.cpu_hz**2 * c.zeta * s * c.f0_cycles_per_bit)
        e_off[j] = suav.tx_power_w * t_tx_off[j]
    k_ruav = s_bits * c.f0_cycles_per_bit / scenario.ruav.cpu_hz
    w_ruav = scenario.ruav.cpu_hz**2 * c.zeta * c.f0_cycles_per_bit * s_bits
    budgets = np.array([s.energy_budget_j - s.hover_energy_j for s in scenario.suavs])
    return Sp1Terms(
        s_bits=s_bits, t_loc=t_loc, t_tx_loc=t_tx_loc, t_tx_off=t_tx_off,
        k_ruav=k_ruav, e_local=e_local, e_offload=e_off, suav_budget=budgets,
        ruav_budget=scenario.ruav.energy_budget_j - scenario.ruav.hover_energy_j,
        w_ruav=w_ruav, active=s_bits > 0.0,
    )


def build_sp1_lp(scenario: Scenario, association: Association,
                 q_m: Position3D) -> LinearProgram:
    """LP relaxation: variables (beta in [0,1]^N, xi >= 0, s >= 0)."""
    t = sp1_terms(scenario, association, q_m)
    n = t.n
    n0 = scenario.n0_cap
    for j in np.flatnonzero(t.active):
        if t.e_local[j] > t.suav_budget[j] and t.e_offload[j] > t.suav_budget[j]:
            raise InfeasibleSubproblem(
                f"energy budget of S-UAV {j} excludes both computing branches")

    nvar = 2 * n + 1  # beta, xi, s
    s_col = 2 * n
    rows, rhs, labels = [], [], []

    def add(row, b, label):
        rows.append(row)
        rhs.append(b)
        labels.append(label)

    for j in range(n):  # xi upper envelope vs beta_j
        row = np.zeros(nvar)
        row[n + j] = 1.0
        row[j] = -n0
        add(row, 0.0, f"xi_cap_beta[{j}]")
    for j in range(n):  # xi upper envelope vs sum(beta)
        row = np.zeros(nvar)
        row[n + j] = 1.0
        row[:n] -= 1.0
        add(row, 0.0, f"xi_cap_sum[{j}]")
    for j in range(n):  # xi lower envelope
        row = np.zeros(nvar)
        row[n + j] = -1.0
        row[:n] += 1.0
        row[j] += n0
        add(row, float(n0), f"xi_floor[{j}]")
    for j in range(n):  # linearized latency under the slack
        row = np.zeros(nvar)
        row[j] = t.t_tx_off[j] - t.t_loc[j] - t.t_tx_loc[j]
        row[n + j] = t.k_ruav[j]
        row[s_col] = -1.0
        add(row, -(t.t_loc[j] + t.t_tx_loc[j]), f"latency[{j}]")
    row = np.zeros(nvar)  # relay energy
    row[n:2 * n] = t.w_ruav
    add(row, t.ruav_budget, "ruav_energy")
    row = np.zeros(nvar)  # relay service cap
    row[:n] = 1.0
    add(row, float(n0), "offloader_cap")
    for j in range(n):  # per-S-UAV energy, linear in beta_j
        row = np.zeros(nvar)
        row[j] = t.e_offload[j] - t.e_local[j]
        add(row, t.suav_budget[j] - t.e_local[j], f"suav_energy[{j}]")

    c = np.zeros(nvar)
    c[s_col] = 1.0
    upper = [1.0] * n + [None] * n + [None]
    var_labels = ([f"beta[{j}]" for j in range(n)]
                  + [f"xi[{j}]" for j in range(n)] + ["s"])
    return LinearProgram(c=c, a=np.array(rows), b=np.array(rhs), upper=upper,
                         row_labels=labels, var_labels=var_labels)


def solve_lp(lp: LinearProgram) -> tuple[np.ndarray, float]:
    result = simplex.solve_lp_arrays(lp.c, lp.a, lp.b, upper=lp.upper)
    if result.status == simplex.INFEASIBLE:
        raise InfeasibleSubproblem("LP relaxation is infeasible")
    if result.status != simplex.OPTIMAL:
        raise NumericalFailure(f"LP solve ended with status {result.status}")
    return result.x, result.objective


def _subset_objective(t: Sp1Terms, members: tuple[int, ...]) -> float | None:
    """Exact min-max latency of one offload subset, or None if infeasible."""
    m = len(members)
    member_set = set(members)
    worst = 0.0
    ruav_e = 0.0
    for j in np.flatnonzero(t.active):
        if j in member_set:
            if t.e_offload[j] > t.suav_budget[j]:
                return None
            lat = t.t_tx_off[j] + t.k_ruav[j] * m
            ruav_e += t.w_ruav[j] * m
        else:
            if t.e_local[j] > t.suav_budget[j]:
                return None
            lat = t.t_loc[j] + t.t_tx_loc[j]
        worst = max(worst, lat)
    if ruav_e > t.ruav_budget:
        return None
    return worst


def enumerate_offload(scenario: Scenario, association: Association,
                      q_m: Position3D,
                      lp_lower_bound: float = float("nan")) -> OffloadDecision:
    """Exact search over all offload subsets within the relay cap."""
    t = sp1_terms(scenario, association, q_m)
    active = np.flatnonzero(t.active)
    if active.size > ENUMERATION_CAP:
        raise CapExceeded(
            f"{active.size} active S-UAVs exceed the enumeration cap "
            f"of {ENUMERATION_CAP}")
    best = None
    for m in range(min(scenario.n0_cap, active.size) + 1):
        for members in itertools.combinations(active.tolist(), m):
            obj = _subset_objective(t, members)
            if obj is None:
                continue
            beta = np.zeros(t.n, dtype=int)
            beta[list(members)] = 1
            key = (obj, tuple(beta))
            if best is None or key < best[0]:
                best = (key, beta)
    if best is None:
        raise InfeasibleSubproblem("no energy-feasible binary offload decision")
    (obj, _), beta = best
    xi = beta.astype(float) * beta.sum()
    return OffloadDecision(beta=beta, xi=xi, slack_s=obj, relaxed=False,
                           lp_lower_bound=lp_lower_bound)


def round_offload(fractional: np.ndarray, scenario: Scenario,
                  association: Association, q_m: Position3D,
                  lp_lower_bound: float = float("nan")) -> OffloadDecision:
    """Recover a feasible binary decision from the relaxed solution.

    Small instances fall through to exact enumeration; larger ones greedily
    offload in descending fractional order while the objective improves.
    """
    t = sp1_terms(scenario, association, q_m)
    active = np.flatnonzero(t.active)
    if active.size <= ENUMERATION_CAP:
        return enumerate_offload(scenario, association, q_m,
                                 lp_lower_bound=lp_lower_bound)
    frac_beta = np.asarray(fractional[:t.n], dtype=float)
    members: list[int] = []
    current = _subset_objective(t, ())
    if current is None:
        raise InfeasibleSubproblem("all-local decision violates energy budgets")
    order = sorted(active.tolist(), key=lambda j: (-frac_beta[j], j))
    for j in order:
        if len(members) >= scenario.n0_cap:
            break
        trial = tuple(sorted(members + [j]))
        obj = _subset_objective(t, trial)
        if obj is not None and obj < current:
            members.append(j)
            current = obj
    beta = np.zeros(t.n, dtype=int)
    beta[members] = 1
    xi = beta.astype(float) * beta.sum()
    return OffloadDecision(beta=beta, xi=xi, slack_s=current, relaxed=False,
                           lp_lower_bound=lp_lower_bound)


def solve_sp1(scenario: Scenario, association: Association,
              q_m: Position3D) -> OffloadDecision:
    """Default SP1 path: LP relaxation for the bound, enumeration for the point."""
    lp = build_sp1_lp(scenario, association, q_m)
    x, lower = solve_lp(lp)
    return round_offload(x, scenario, association, q_m, lp_lower_bound=lower)
