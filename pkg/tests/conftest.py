"""Shared fixtures and hand-built scenario helpers."""

from __future__ import annotations

import math

import numpy as np
import pytest

from uav_mec.config import KB_BITS, ExperimentConfig
from uav_mec.link import PhysicsConstants
from uav_mec.scenario import (Association, CameraSpec, Position3D, RUav,
                              Scenario, SUav, Target,
                              feasible_association_mask, generate_scenario)

DEFAULT_CAMERA = CameraSpec(
    phi_h=math.radians(58.4), phi_v=math.radians(40.0), gamma=30.0)
DEFAULT_CONSTANTS = ExperimentConfig().constants


def make_scenario(suav_xy, target_xy, *, altitude=500.0, chunk_bits=None,
                  camera=DEFAULT_CAMERA, constants=DEFAULT_CONSTANTS,
                  cpu_suav_hz=0.2e9, cpu_ruav_hz=2e9, tx_power_w=0.8,
                  mu=0.1, energy_budget_j=1e3, n0_cap=None,
                  box=(0.0, 0.0, 100.0, 1000.0, 1000.0, 1000.0)) -> Scenario:
    """Scenario with explicit S-UAV hover points and target locations."""
    n = len(suav_xy)
    if chunk_bits is None:
        chunk_bits = [250.0 * KB_BITS] * n
    suavs = tuple(
        SUav(id=j,
             initial_pos=Position3D(x, y, altitude),
             current_pos=Position3D(x, y, altitude),
             camera=camera, cpu_hz=cpu_suav_hz, tx_power_w=tx_power_w,
             chunk_bits=float(chunk_bits[j]), compress_ratio=mu,
             energy_budget_j=energy_budget_j, hover_energy_j=0.0,
             chunk_bits_list=(float(chunk_bits[j]),))
        for j, (x, y) in enumerate(suav_xy))
    targets = tuple(Target(id=i, pos=Position3D(x, y, 0.0))
                    for i, (x, y) in enumerate(target_xy))
    lo, hi = Position3D(*box[:3]), Position3D(*box[3:])
    ruav = RUav(pos=Position3D(*(0.5 * (lo.array + hi.array))),
                cpu_hz=cpu_ruav_hz, box_lo=lo, box_hi=hi,
                energy_budget_j=1e3, hover_energy_j=0.0)
    return Scenario(suavs=suavs, targets=targets, ruav=ruav,
                    constants=constants,
                    n0_cap=n0_cap if n0_cap is not None else max(1, n // 2),
                    seed=0)


def full_association(scenario: Scenario) -> Association:
    """Every target to its first covering S-UAV."""
    mask = feasible_association_mask(scenario)
    alpha = np.zeros_like(mask)
    for i in range(scenario.n_targets):
        alpha[i, int(np.flatnonzero(mask[i])[0])] = 1
    return Association(alpha=alpha, feasible_mask=mask)


def identity_association(scenario: Scenario) -> Association:
    """Target i to S-UAV i (valid when targets sit at the S-UAV nadirs)."""
    mask = feasible_association_mask(scenario)
    alpha = np.zeros_like(mask)
    for i in range(scenario.n_targets):
        alpha[i, min(i, scenario.n_suavs - 1)] = 1
    return Association(alpha=alpha, feasible_mask=mask)


@pytest.fixture(scope="session")
def default_config() -> ExperimentConfig:
    return ExperimentConfig()


@pytest.fixture(scope="session")
def small_config() -> ExperimentConfig:
    from dataclasses import replace
    return replace(ExperimentConfig(), n_suavs=4, n_targets=5)


@pytest.fixture(scope="session")
def scenario0(default_config) -> Scenario:
    return generate_scenario(default_config, 0)
