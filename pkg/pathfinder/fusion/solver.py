"""Closed-form fusion of per-plane global estimates.

Every objective is a linear least-squares problem in ``theta = (X', V')``;
rows are stacked as ``A theta = y`` and solved through the normal equations.

``reflection``
    Mirror images of the propagated state across each lower-ranked plane
    must land on the largest plane's estimate, plus ``lam * |V' - V_bar|^2``.
``consensus``
    Area-weighted squared distance between every plane's estimate and the
    propagated state, plus the same velocity anchor.
``average``
    Unweighted mean of positions and velocities.

``reflection`` reads only the planes of the lower-ranked estimates, never
their positions, so its output does not move toward the single-plane
fallback as those estimates approach the largest plane's. ``consensus`` does:
with ``dt = 0`` its residual shrinks monotonically to 0 and ``X'`` reaches
the fallback exactly.
"""
import logging
from dataclasses import dataclass

import numpy as np

from pathfinder.config import PathfinderConfig
from pathfinder.errors import ConfigurationError, ContractError, NumericalDegeneracy, PipelineStall

Logger = logging.getLogger('pathfinder.fusion.solver')

OBJECTIVES = ('reflection', 'consensus', 'average')


@dataclass(frozen=True, eq=False)
class FusedState:
    position: np.ndarray
    velocity: np.ndarray
    residual: float
    planes_used: int
    objective: str = 'reflection'


def reflection_system(n, offset):
    """``(A, c)`` with ``F_g(p) = A p + c`` for planar points mirrored across the wall."""
    n = np.asarray(n, dtype=np.float64)[:2]
    return np.eye(2) - 2.0 * np.outer(n, n), 2.0 * offset * n


def area_weighted_velocity(estimates):
    weights = np.array([e.area for e in estimates], dtype=np.float64)
    if weights.sum() <= 0:
        weights = np.ones_like(weights)
    velocities = np.array([e.velocity[:2] for e in estimates])
    return weights @ velocities / weights.sum()


def _velocity_anchor(estimates, lam):
    rows = np.hstack([np.zeros((2, 2)), np.sqrt(lam) * np.eye(2)])
    return rows, np.sqrt(lam) * area_weighted_velocity(estimates)


def _reflection_rows(ranked, dt):
    anchor = ranked[0].position[:2]
    blocks, targets = [], []
    for estimate in ranked[1:]:
        A, c = reflection_system(estimate.normal, estimate.offset)
        blocks.append(np.hstack([A, A * dt]))
        targets.append(anchor - c)
    return blocks, targets


def _consensus_rows(ranked, dt):
    weights = np.array([e.area for e in ranked], dtype=np.float64)
    weights = weights / weights.sum() if weights.sum() > 0 else np.full(len(ranked), 1.0 / len(ranked))
    blocks, targets = [], []
    for w, estimate in zip(weights, ranked):
        blocks.append(np.sqrt(w) * np.hstack([np.eye(2), dt * np.eye(2)]))
        targets.append(np.sqrt(w) * estimate.position[:2])
    return blocks, targets


def least_squares_system(ranked, dt, lam, objective):
    if objective == 'reflection':
        blocks, targets = _reflection_rows(ranked, dt)
    else:
        blocks, targets = _consensus_rows(ranked, dt)
    anchor_rows, anchor_target = _velocity_anchor(ranked, lam)
    return np.vstack(blocks + [anchor_rows]), np.concatenate(targets + [anchor_target])


def objective_value(A, y, theta):
    r = A @ theta - y
    return float(r @ r)


def rank_estimates(estimates):
    ranked = sorted(estimates, key=lambda e: e.rank)
    ranks = [e.rank for e in ranked]
    if len(set(ranks)) != len(ranks):
        raise ContractError('area ranks must be distinct, got %s' % ranks)
    return ranked


def fuse(estimates, dt, lam=None, objective=None, condition_limit=None):
    """Fuse the example planes of one frame into ``(X', V')``.

    With one plane the largest plane's estimate is returned unchanged.
    """
    config = PathfinderConfig()
    lam = float(config.PATHFINDER_FUSION_LAMBDA if lam is None else lam)
    objective = objective or 'reflection'
    if objective not in OBJECTIVES:
        raise ConfigurationError('unknown fusion objective %r' % objective, key='objective')
    if condition_limit is None:
        condition_limit = float(config.PATHFINDER_DEGENERACY_CONDITION)
    if not estimates:
        raise PipelineStall('nothing to fuse')
    ranked = rank_estimates(estimates)
    if len(ranked) == 1:
        first = ranked[0]
        return FusedState(first.position[:2].copy(), first.velocity[:2].copy(), 0.0, 1, objective)
    if objective == 'average':
        x = np.mean([e.position[:2] for e in ranked], axis=0)
        v = np.mean([e.velocity[:2] for e in ranked], axis=0)
        spread = float(sum(np.sum((e.position[:2] - x) ** 2) for e in ranked))
        return FusedState(x, v, spread, len(ranked), objective)

    A, y = least_squares_system(ranked, dt, lam, objective)
    normal = A.T @ A
    condition = np.linalg.cond(normal)
    if not np.isfinite(condition) or condition > condition_limit:
        raise NumericalDegeneracy('normal equations are singular', {
            'condition': '%.3g' % condition, 'objective': objective, 'planes': len(ranked), 'lambda': lam,
        })
    theta = np.linalg.solve(normal, A.T @ y)
    residual = objective_value(A, y, theta)
    Logger.debug('Fused %d planes (%s): residual %.3g' % (len(ranked), objective, residual))
    return FusedState(theta[:2], theta[2:], residual, len(ranked), objective)
