"""Exhaustive reference frontiers over discretized distribution grids.

Everything here recomputes entropies from scratch (spectra for the cq oracle,
probability tables for the classical one) so the oracle path shares no entropy
code with the main engine.  Joint distributions p(t, x) are enumerated as
integer compositions of the mesh over t_size * |X| cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import CqBroadcastChannel
from .errors import BudgetError, ValidationError
from .regions import Frontier, RatePoint

MAX_CANDIDATES = 2_000_000
_CHUNK = 65536
_CLAMP = 1e-12


def mesh_tolerance(mesh: int) -> float:
    """Frontier slack attributable to the grid: 1.5 / mesh (0.15 at mesh 10)."""
    return 1.5 / float(mesh)


def composition_count(total: int, parts: int) -> int:
    """Stars-and-bars count of nonnegative integer compositions."""
    return math.comb(total + parts - 1, parts - 1)


def compositions(total: int, parts: int):
    """Yield all nonnegative integer tuples of the given length summing to total."""
    if parts < 1:
        raise ValidationError("compositions needs at least one part")
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in compositions(total - head, parts - 1):
            yield (head,) + rest


def _enumerate_joints(mesh: int, t_size: int, n_x: int, max_candidates: int) -> np.ndarray:
    cells = t_size * n_x
    count = composition_count(mesh, cells)
    if count > max_candidates:
        raise BudgetError(
            f"grid enumeration would need {count} candidates (limit {max_candidates}); "
            f"reduce mesh or t_size"
        )
    arr = np.array(list(compositions(mesh, cells)), dtype=np.int64)
    if arr.shape[0] != count:
        raise RuntimeError(f"enumeration produced {arr.shape[0]} joints, stars-and-bars says {count}")
    return arr.reshape(count, t_size, n_x).astype(float) / float(mesh)


def _spectra_entropy(mats: np.ndarray) -> np.ndarray:
    evals = np.linalg.eigvalsh(mats)
    evals = np.clip(evals, 0.0, None)
    logs = np.where(evals > _CLAMP, np.log2(np.maximum(evals, _CLAMP)), 0.0)
    return -(evals * logs).sum(axis=-1)


def _table_entropy(table: np.ndarray) -> np.ndarray:
    """Shannon entropy of probability tables flattened over all but the first axis."""
    flat = table.reshape(table.shape[0], -1)
    logs = np.where(flat > _CLAMP, np.log2(np.maximum(flat, _CLAMP)), 0.0)
    return -(flat * logs).sum(axis=-1)


def _pareto_points(commons: np.ndarray, personals: np.ndarray, joints: np.ndarray,
                   meta: dict, r_grid: int | None) -> Frontier:
    order = np.lexsort((-personals, -commons))
    kept = []
    run = -np.inf
    for i in order:
        if personals[i] > run + 1e-12:
            kept.append(i)
            run = personals[i]
    kept.reverse()  # commons ascending
    points = [
        RatePoint(float(commons[i]), float(personals[i]), {"joint": joints[i].tolist()})
        for i in kept
    ]
    frontier = Frontier(points, meta)
    if r_grid is not None:
        rs = np.linspace(0.0, frontier.max_common(), int(r_grid))
        resampled = []
        for r in rs:
            hit = next((pt for pt in points if pt.common_rate >= r - 1e-12), None)
            if hit is None:
                resampled.append(RatePoint(float(r), 0.0, {}))
            else:
                resampled.append(RatePoint(float(r), hit.personal_rate, hit.witness))
        frontier = Frontier(resampled, dict(meta, resampled=True))
    return frontier


def grid_cq_frontier(w: CqBroadcastChannel, t_size: int, mesh: int, r_grid: int | None = None,
                     max_candidates: int = MAX_CANDIDATES) -> Frontier:
    """Exact Pareto frontier of (min label-Holevo, conditional label-Holevo to B)
    over every mesh-grid joint distribution p(t, x).

    The nominal budget envelope is |X| <= 3, t_size <= 4, mesh <= 12; anything
    whose stars-and-bars count stays under ``max_candidates`` is accepted.
    """
    if not isinstance(w, CqBroadcastChannel):
        raise ValidationError("grid oracle expects a cq broadcast channel")
    if t_size < 1 or mesh < 1:
        raise ValidationError("t_size and mesh must be positive")
    n_x = w.n_symbols
    joints = _enumerate_joints(mesh, t_size, n_x, max_candidates)
    b_stack = np.stack(w.marginal_conditionals(w.b_label))
    c_stack = np.stack(w.marginal_conditionals(w.c_label))
    h_b_x = _spectra_entropy(b_stack)
    n = joints.shape[0]
    commons = np.empty(n)
    personals = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        joint = joints[lo:hi]
        p_t = joint.sum(axis=2)
        p_x = joint.sum(axis=1)
        scale = np.where(p_t > 0, p_t, 1.0)[:, :, None, None]
        rho_bt = np.einsum("ntx,xij->ntij", joint, b_stack, optimize=True) / scale
        rho_ct = np.einsum("ntx,xij->ntij", joint, c_stack, optimize=True) / scale
        h_bt = np.where(p_t > 0, _spectra_entropy(rho_bt), 0.0)
        h_ct = np.where(p_t > 0, _spectra_entropy(rho_ct), 0.0)
        rho_b = np.einsum("nx,xij->nij", p_x, b_stack, optimize=True)
        rho_c = np.einsum("nx,xij->nij", p_x, c_stack, optimize=True)
        i_tb = _spectra_entropy(rho_b) - (p_t * h_bt).sum(axis=1)
        i_tc = _spectra_entropy(rho_c) - (p_t * h_ct).sum(axis=1)
        commons[lo:hi] = np.minimum(i_tb, i_tc)
        personals[lo:hi] = (p_t * h_bt).sum(axis=1) - p_x @ h_b_x
    commons = np.maximum(commons, 0.0)
    personals = np.maximum(personals, 0.0)
    meta = {"mode": "oracle-grid", "t_size": t_size, "mesh": mesh, "candidates": int(n)}
    return _pareto_points(commons, personals, joints, meta, r_grid)


@dataclass
class CardinalityReport:
    """Effect of enlarging the label alphabet past its nominal bound."""

    bound: int
    extra: int
    mesh: int
    improvement: float
    at_common: float
    reach_gain: float
    base: Frontier
    extended: Frontier


def cardinality_probe(w: CqBroadcastChannel, bound: int, extra: int, mesh: int,
                      max_candidates: int = MAX_CANDIDATES) -> CardinalityReport:
    """Compare grid frontiers at t_size = bound and bound + extra.

    ``improvement`` is the largest personal-rate gain over the base frontier's
    common rates (the extended enumeration strictly contains the base one, so
    the gain is nonnegative); ``reach_gain`` is the gain in maximal common rate.
    """
    base = grid_cq_frontier(w, bound, mesh, max_candidates=max_candidates)
    extended = grid_cq_frontier(w, bound + extra, mesh, max_candidates=max_candidates)
    improvement = 0.0
    at_common = 0.0
    for pt in base.points:
        gain = extended.value_at(pt.common_rate, slack=1e-12) - pt.personal_rate
        if gain > improvement:
            improvement = gain
            at_common = pt.common_rate
    reach = extended.max_common() - base.max_common()
    return CardinalityReport(bound, extra, mesh, float(improvement), float(at_common),
                             float(max(reach, 0.0)), base, extended)


def classical_degraded_region(p_y_given_x: np.ndarray, p_z_given_y: np.ndarray, mesh: int,
                              t_size: int | None = None,
                              max_candidates: int = MAX_CANDIDATES) -> Frontier:
    """Exhaustive (I(T;Z), I(X;Y|T)) frontier for a classical cascade X -> Y -> Z.

    Pure probability-table computation, independent of the matrix machinery.
    ``t_size`` defaults to one more than the smallest alphabet involved.
    """
    p1 = np.asarray(p_y_given_x, dtype=float)
    p2 = np.asarray(p_z_given_y, dtype=float)
    for name, mat in (("p_y_given_x", p1), ("p_z_given_y", p2)):
        if mat.ndim != 2:
            raise ValidationError(f"{name} must be a matrix")
        if mat.min() < 0:
            raise ValidationError(f"{name} has negative entries")
        if np.abs(mat.sum(axis=0) - 1.0).max() > 1e-12:
            raise ValidationError(f"{name} columns must sum to 1 within 1e-12")
    ny, n_x = p1.shape
    nz = p2.shape[0]
    if p2.shape[1] != ny:
        raise ValidationError(f"cascade mismatch: p_z_given_y expects {p2.shape[1]} inputs, Y has {ny}")
    if t_size is None:
        t_size = min(n_x, ny, nz) + 1
    if t_size < 1 or mesh < 1:
        raise ValidationError("t_size and mesh must be positive")
    pz_x = p2 @ p1
    joints = _enumerate_joints(mesh, t_size, n_x, max_candidates)
    n = joints.shape[0]
    commons = np.empty(n)
    personals = np.empty(n)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        joint = joints[lo:hi]
        p_t = joint.sum(axis=2)
        p_tz = np.einsum("ntx,zx->ntz", joint, pz_x, optimize=True)
        p_ty = np.einsum("ntx,yx->nty", joint, p1, optimize=True)
        p_txy = np.einsum("ntx,yx->ntxy", joint, p1, optimize=True)
        h_t = _table_entropy(p_t)
        h_z = _table_entropy(p_tz.sum(axis=1))
        h_tz = _table_entropy(p_tz)
        h_ty = _table_entropy(p_ty)
        h_tx = _table_entropy(joint)
        h_txy = _table_entropy(p_txy)
        commons[lo:hi] = h_t + h_z - h_tz
        personals[lo:hi] = h_tx + h_ty - h_txy - h_t
    commons = np.maximum(commons, 0.0)
    personals = np.maximum(personals, 0.0)
    meta = {"mode": "oracle-classical", "t_size": int(t_size), "mesh": mesh, "candidates": int(n)}
    return _pareto_points(commons, personals, joints, meta, None)
