"""Relay placement with fixed offload decision and association.

The non-convex min-max placement is handled by successive convexification:
around the current point the rate of every transmitting S-UAV is replaced by
its concave quadratic lower bound, the worst-case common rate lambda is
maximized over the flight box, and the expansion point moves to the new
optimum until the surrogate objective stalls.

The inner concave max-min is a 3-D smooth program solved by SLSQP (with an
analytic Jacobian); a projected-subgradient fallback covers solver failures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import InfeasibleSubproblem, NumericalFailure
from .cost import effective_chunk_bits
from .link import rate_at_dist_sq, snr_coeff
from .scenario import Association, Position3D, Scenario

SCA_TOL_S = 1e-4
SCA_MAX_ITER = 50
FEAS_TOL_M2 = 1e-6
SUBGRADIENT_ITERS = 500


@dataclass(frozen=True)
class PlacementIterate:
    q_m: Position3D
    lambda_m: float
    slack_s: float
    iteration: int


@dataclass(frozen=True)
class PlacementTerms:
    """Per transmitting S-UAV: geometry and the latency affine pieces.

    Worst-case-rate latency is tx_bits / lambda + fixed_s; the exact latency
    replaces lambda with the S-UAV's own rate.
    """

    q: np.ndarray         # (n, 3) repositioned S-UAV locations
    gamma1: np.ndarray    # (n,) SNR coefficients
    tx_bits: np.ndarray   # (n,) bits actually transmitted (compressed or raw)
    fixed_s: np.ndarray   # (n,) compute time independent of the link
    lam_floor: float      # smallest common rate the energy budgets allow
    bandwidth_hz: float


def placement_terms(scenario: Scenario, association: Association,
                    beta: np.ndarray) -> PlacementTerms:
    c = scenario.constants
    beta = np.asarray(beta, dtype=int)
    s_bits = effective_chunk_bits(scenario, association.alpha)
    m = int(beta.sum())
    rows_q, g1, tx, fixed, floors = [], [], [], [], [0.0]
    for j, suav in enumerate(scenario.suavs):
        s = float(s_bits[j])
        if s == 0.0:
            continue
        rows_q.append(suav.current_pos.array)
        g1.append(snr_coeff(suav.tx_power_w, c.rho0, c.noise_w).gamma1)
        if beta[j]:
            tx.append(s)
            fixed.append(s * c.f0_cycles_per_bit * m / scenario.ruav.cpu_hz)
            e_comp = 0.0
        else:
            tx.append(suav.compress_ratio * s)
            fixed.append(s * c.f0_cycles_per_bit / suav.cpu_hz)
            e_comp = suav.cpu_hz**2 * c.zeta * s * c.f0_cycles_per_bit
        denom = suav.energy_budget_j - suav.hover_energy_j - e_comp
        if denom <= 0.0:
            raise InfeasibleSubproblem(
                f"S-UAV {j} has no energy headroom for any transmission")
        floors.append(suav.tx_power_w * tx[-1] / denom)
    return PlacementTerms(
        q=np.array(rows_q).reshape(-1, 3),
        gamma1=np.array(g1), tx_bits=np.array(tx), fixed_s=np.array(fixed),
        lam_floor=max(floors), bandwidth_hz=c.bandwidth_hz,
    )


def exact_objective(terms: PlacementTerms, points: np.ndarray) -> np.ndarray:
    """Exact min-max latency at one or many candidate relay positions."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if terms.q.shape[0] == 0:
        return np.zeros(pts.shape[0])
    d2 = np.maximum(((pts[:, None, :] - terms.q[None, :, :]) ** 2).sum(axis=2), 1.0)
    rates = terms.bandwidth_hz * np.log2(1.0 + terms.gamma1[None, :] / d2)
    lat = terms.tx_bits[None, :] / rates + terms.fixed_s[None, :]
    return lat.max(axis=1)


def _box(scenario: Scenario) -> tuple[np.ndarray, np.ndarray]:
    return scenario.ruav.box_lo.array, scenario.ruav.box_hi.array


def _surrogate_coeffs(terms: PlacementTerms, q_ref: np.ndarray):
    """(a, slope, d2_ref) rows of the rate lower bound expanded at q_ref."""
    d2r = np.maximum(((terms.q - q_ref[None, :]) ** 2).sum(axis=1), 1.0)
    a = terms.bandwidth_hz * np.log2(1.0 + terms.gamma1 / d2r)
    slope = (terms.bandwidth_hz * terms.gamma1 * math.log2(math.e)
             / (d2r * (d2r + terms.gamma1)))
    return a, slope, d2r


def surrogate_rates(terms: PlacementTerms, q_ref: np.ndarray,
                    points: np.ndarray) -> np.ndarray:
    """Surrogate rate of every S-UAV at one or many candidate positions."""
    a, slope, d2r = _surrogate_coeffs(terms, q_ref)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    d2 = ((pts[:, None, :] - terms.q[None, :, :]) ** 2).sum(axis=2)
    return a[None, :] - slope[None, :] * (d2 - d2r[None, :])


def _maximin_subgradient(terms: PlacementTerms, q_ref: np.ndarray,
                         lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Projected supergradient ascent on min_n of the surrogate rates."""
    a, slope, d2r = _surrogate_coeffs(terms, q_ref)
    span = float(np.linalg.norm(hi - lo))
    step0 = max(span / 4.0, 1.0)
    q = np.clip(q_ref.copy(), lo, hi)
    best_q, best_val = q.copy(), -np.inf
    for t in range(1, SUBGRADIENT_ITERS + 1):
        d2 = ((q[None, :] - terms.q) ** 2).sum(axis=1)
        vals = a - slope * (d2 - d2r)
        k = int(np.argmin(vals))
        if vals[k] > best_val:
            best_val, best_q = vals[k], q.copy()
        g = -2.0 * slope[k] * (q - terms.q[k])
        norm = np.linalg.norm(g)
        if norm < 1e-15:
            break
        q = np.clip(q + (step0 / math.sqrt(t)) * g / norm, lo, hi)
    return best_q


def _maximin_surrogate(terms: PlacementTerms, q_ref: np.ndarray,
                       scenario: Scenario) -> tuple[np.ndarray, float]:
    """argmax over the box of min_n surrogate rate, and the attained value."""
    lo, hi = _box(scenario)
    a, slope, d2r = _surrogate_coeffs(terms, q_ref)
    b = terms.bandwidth_hz

    def cons_f(z):
        d2 = ((z[None, :3] - terms.q) ** 2).sum(axis=1)
        return (a - slope * (d2 - d2r)) / b - z[3]

    def cons_jac(z):
        jac = np.empty((terms.q.shape[0], 4))
        jac[:, :3] = -2.0 * (slope / b)[:, None] * (z[None, :3] - terms.q)
        jac[:, 3] = -1.0
        return jac

    z0 = np.empty(4)
    z0[:3] = np.clip(q_ref, lo, hi)
    z0[3] = cons_f(np.append(z0[:3], 0.0)).min()
    lam_hi = math.log2(1.0 + terms.gamma1.max())  # rate/B at the 1 m guard
    bounds = [(lo[i], hi[i]) for i in range(3)] + [(0.0, lam_hi)]
    res = minimize(
        lambda z: -z[3], z0, jac=lambda z: np.array([0.0, 0.0, 0.0, -1.0]),
        bounds=bounds,
        constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_jac}],
        method="SLSQP", options={"maxiter": 200, "ftol": 1e-12},
    )
    q = np.clip(res.x[:3], lo, hi) if res.success else None
    if q is None:
        q = _maximin_subgradient(terms, q_ref, lo, hi)
    # Polish from the subgradient point too if SLSQP made no progress.
    lam = float(surrogate_rates(terms, q_ref, q).min(axis=1)[0])
    q_alt = _maximin_subgradient(terms, q_ref, lo, hi)
    lam_alt = float(surrogate_rates(terms, q_ref, q_alt).min(axis=1)[0])
    if lam_alt > lam:
        q, lam = q_alt, lam_alt
    return q, lam


def default_initial_position(scenario: Scenario) -> Position3D:
    lo, hi = _box(scenario)
    xy = np.mean([s.current_pos.array[:2] for s in scenario.suavs], axis=0)
    q = np.clip(np.array([xy[0], xy[1], 0.5 * (lo[2] + hi[2])]), lo, hi)
    return Position3D(*q)


def solve_sp2_2(scenario: Scenario, association: Association, beta: np.ndarray,
                q_m_ref: Position3D, iteration: int = 0) -> PlacementIterate:
    """One convexified placement solve around the expansion point q_m_ref."""
    terms = placement_terms(scenario, association, beta)
    if terms.q.shape[0] == 0:
        return PlacementIterate(q_m=q_m_ref, lambda_m=float("inf"),
                                slack_s=0.0, iteration=iteration)
    q, lam = _maximin_surrogate(terms, q_m_ref.array, scenario)
    if lam < terms.lam_floor:
        raise InfeasibleSubproblem(
            "energy budgets demand a common rate the geometry cannot deliver")
    if lam <= 0.0:
        raise NumericalFailure("surrogate rate collapsed to zero")
    slack = float(np.max(terms.tx_bits / lam + terms.fixed_s))
    return PlacementIterate(q_m=Position3D(*q), lambda_m=lam,
                            slack_s=slack, iteration=iteration)


def feasibility_check(lam: float, scenario: Scenario, association: Association,
                      beta: np.ndarray, q_m_ref: Position3D):
    """Is there a box position whose surrogate rate meets lam for every S-UAV?

    Returns (feasible, witness). Each rate row translates to a ball around its
    S-UAV; feasibility is emptiness of max_n (||q - q_n||^2 - radius_n^2) <= 0
    over the box, a min-max of convex quadratics.
    """
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    terms = placement_terms(scenario, association, beta)
    if terms.q.shape[0] == 0:
        return True, q_m_ref
    a, slope, d2r = _surrogate_coeffs(terms, q_m_ref.array)
    rho = d2r + (a - lam) / slope  # allowed squared distance per S-UAV
    if np.any(rho < 0.0):
        return False, None
    lo, hi = _box(scenario)

    def cons_f(z):
        return z[3] - (((z[None, :3] - terms.q) ** 2).sum(axis=1) - rho)

    def cons_jac(z):
        jac = np.empty((terms.q.shape[0], 4))
        jac[:, :3] = -2.0 * (z[None, :3] - terms.q)
        jac[:, 3] = 1.0
        return jac

    z0 = np.empty(4)
    z0[:3] = np.clip(q_m_ref.array, lo, hi)
    z0[3] = (((z0[None, :3] - terms.q) ** 2).sum(axis=1) - rho).max()
    span2 = float(((hi - lo) ** 2).sum())
    bounds = [(lo[i], hi[i]) for i in range(3)] + [(None, None)]
    res = minimize(
        lambda z: z[3], z0, jac=lambda z: np.array([0.0, 0.0, 0.0, 1.0]),
        bounds=bounds,
        constraints=[{"type": "ineq", "fun": cons_f, "jac": cons_jac}],
        method="SLSQP", options={"maxiter": 200, "ftol": 1e-12},
    )
    candidates = [np.clip(res.x[:3], lo, hi)] if res.success else []
    q_sub = _maximin_subgradient(
        PlacementTerms(q=terms.q, gamma1=terms.gamma1, tx_bits=terms.tx_bits,
                       fixed_s=terms.fixed_s, lam_floor=0.0,
                       bandwidth_hz=terms.bandwidth_hz),
        q_m_ref.array, lo, hi)
    candidates.append(q_sub)
    best_q, best_g = None, np.inf
    for q in candidates:
        g = float((((q[None, :] - terms.q) ** 2).sum(axis=1) - rho).max())
        if g < best_g:
            best_q, best_g = q, g
    if best_g <= FEAS_TOL_M2:
        return True, Position3D(*best_q)
    return False, None


def sca_loop(scenario: Scenario, association: Association, beta: np.ndarray,
             q_m_init: Position3D | None = None,
             tol: float = SCA_TOL_S, max_iter: int = SCA_MAX_ITER):
    """Successive convexification until the surrogate objective stalls.

    Returns (best iterate, surrogate trace, exact objective at the final
    point). A solve that worsens the exact objective is discarded, making the
    descent property hold even under inner-solver noise.
    """
    terms = placement_terms(scenario, association, beta)
    if q_m_init is None:
        q_m_init = default_initial_position(scenario)
    if terms.q.shape[0] == 0:
        it = PlacementIterate(q_m=q_m_init, lambda_m=float("inf"),
                              slack_s=0.0, iteration=0)
        return it, [0.0], 0.0

    current = PlacementIterate(
        q_m=q_m_init,
        lambda_m=float(np.min(
            [rate_at_dist_sq(max(float(((q_m_init.array - terms.q[i]) ** 2).sum()), 1.0),
                             terms.bandwidth_hz, terms.gamma1[i])
             for i in range(terms.q.shape[0])])),
        slack_s=float(exact_objective(terms, q_m_init.array)[0]),
        iteration=0,
    )
    trace = [current.slack_s]
    for r in range(1, max_iter + 1):
        try:
            nxt = solve_sp2_2(scenario, association, beta, current.q_m, iteration=r)
        except NumericalFailure:
            break
        exact = float(exact_objective(terms, nxt.q_m.array)[0])
        if exact <= trace[-1] + 1e-12:
            current = PlacementIterate(q_m=nxt.q_m, lambda_m=nxt.lambda_m,
                                       slack_s=exact, iteration=r)
            trace.append(exact)
        else:
            trace.append(trace[-1])  # reject the move, keep the point
        if len(trace) >= 2 and abs(trace[-2] - trace[-1]) < tol:
            break
    return current, trace, trace[-1]
