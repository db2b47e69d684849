"""Derivative-free ascent engine shared by the region evaluators.

Gradients are estimated by central differences and every candidate point in an
iteration (all restarts' perturbations, then all line-search trials) is pushed
through the objective as one batched call, so objectives can vectorize their
linear algebra across candidates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the restart/penalty sweep machinery.

    ``penalty_scales`` is the increasing schedule used to enforce the common
    rate constraint during frontier sweeps; ``matrix_budget`` bounds the dense
    dimension product a region evaluator may allocate before warning/refusing.
    """

    restarts: int = 16
    max_iters: int = 300
    step_init: float = 0.25
    step_grow: float = 1.3
    step_shrink: float = 0.5
    step_min: float = 1e-7
    tol: float = 1e-9
    seed: int = 7
    r_grid: int = 33
    fd_step: float = 1e-5
    penalty_scales: tuple = (1e2, 1e4, 1e6)
    matrix_budget: int = 4096

    def __post_init__(self):
        for name in ("restarts", "max_iters", "step_init", "step_grow", "step_shrink", "step_min", "tol", "fd_step", "r_grid"):
            if getattr(self, name) <= 0:
                raise ValueError(f"OptimizerConfig.{name} must be positive")


_LADDER = 4  # trial step sizes evaluated per line search


def maximize_batch(batch_fn, inits: np.ndarray, cfg: OptimizerConfig):
    """Ascend every row of ``inits`` independently; returns (thetas, values, info).

    ``batch_fn`` maps an (m, n) parameter block to m objective values.  Each
    iteration evaluates 2n central-difference perturbations per active restart
    in one call, then a geometric ladder of trial steps in a second call.
    Restarts deactivate when their step collapses below ``cfg.step_min`` or the
    gradient norm drops under ``cfg.tol``.
    """
    thetas = np.array(inits, dtype=float)
    if thetas.ndim != 2:
        raise ValueError(f"inits must be 2-d (restarts, params), got shape {thetas.shape}")
    m, n = thetas.shape
    values = np.asarray(batch_fn(thetas), dtype=float)
    steps = np.full(m, cfg.step_init)
    active = np.ones(m, dtype=bool)
    h = cfg.fd_step
    signed = np.zeros((2 * n, n))
    signed[0::2] = np.eye(n) * h
    signed[1::2] = -np.eye(n) * h
    ladder = cfg.step_shrink ** np.arange(_LADDER)
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        sub = thetas[idx]
        pert = (sub[:, None, :] + signed[None, :, :]).reshape(idx.size * 2 * n, n)
        gvals = np.asarray(batch_fn(pert), dtype=float).reshape(idx.size, 2 * n)
        grad = (gvals[:, 0::2] - gvals[:, 1::2]) / (2.0 * h)
        gnorm = np.linalg.norm(grad, axis=1)
        flat = gnorm < cfg.tol
        if flat.any():
            active[idx[flat]] = False
            keep = ~flat
            idx, sub, grad, gnorm = idx[keep], sub[keep], grad[keep], gnorm[keep]
            if idx.size == 0:
                continue
        dirs = grad / gnorm[:, None]
        trial_steps = steps[idx][:, None] * ladder[None, :]
        trials = sub[:, None, :] + trial_steps[:, :, None] * dirs[:, None, :]
        tvals = np.asarray(batch_fn(trials.reshape(idx.size * _LADDER, n)), dtype=float).reshape(idx.size, _LADDER)
        best_j = np.argmax(tvals, axis=1)
        rows = np.arange(idx.size)
        best_v = tvals[rows, best_j]
        improved = best_v > values[idx]
        good = idx[improved]
        if good.size:
            jj = best_j[improved]
            thetas[good] = trials[improved, jj]
            values[good] = best_v[improved]
            steps[good] = trial_steps[improved, jj] * cfg.step_grow
        bad = idx[~improved]
        if bad.size:
            steps[bad] *= cfg.step_shrink ** _LADDER
            dead = steps[bad] < cfg.step_min
            active[bad[dead]] = False
    info = {"iterations": iters, "converged": bool(not active.any())}
    return thetas, values, info


def softmax(logits: np.ndarray, axis: int = -1) -> np.ndarray:
    z = logits - logits.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def seeded_rng(*path: int) -> np.random.Generator:
    """Deterministic generator from an integer path (seed, grid point, restart...)."""
    return np.random.default_rng(np.random.SeedSequence([int(p) & 0xFFFFFFFF for p in path]))
