"""Achievable-rate-region frontiers for broadcast channels.

Each region evaluator turns optimizer parameters into a (common, personal)
rate pair; a penalty sweep over a grid of common-rate targets traces the upper
boundary and stores the achieving parameters as a re-evaluatable witness.
Closed-form and entropy-oracle evaluators for the small worked cases live at
the bottom.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import BroadcastChannel, CqBroadcastChannel, degradedness_residual
from .errors import BudgetError, ValidationError
from .optimize import OptimizerConfig, maximize_batch, seeded_rng, softmax
from .quantities import coherent_information
from .states import ENTROPY_CLAMP, PureState, binary_entropy

RATE_CLIP = -1e-9


@dataclass
class RatePoint:
    """One achievable frontier point with its certifying parameters."""

    common_rate: float
    personal_rate: float
    witness: dict = field(default_factory=dict)


@dataclass
class Frontier:
    """Pareto-ordered rate points: common strictly increasing, personal non-increasing."""

    points: list
    metadata: dict = field(default_factory=dict)

    def value_at(self, common: float, slack: float = 1e-9) -> float:
        """Largest personal rate the frontier certifies at the given common rate."""
        for pt in self.points:
            if pt.common_rate >= common - slack:
                return pt.personal_rate
        return 0.0

    def max_common(self) -> float:
        return max((pt.common_rate for pt in self.points), default=0.0)

    def as_array(self) -> np.ndarray:
        return np.array([[pt.common_rate, pt.personal_rate] for pt in self.points], dtype=float)

    def __len__(self):
        return len(self.points)


@dataclass
class MergingRates:
    """Quantum-cost bound and receiver-pair distillation rate for state merging."""

    q_c_bound: float
    bc_distill: float
    feasible: bool

    def __iter__(self):
        yield self.q_c_bound
        yield self.bc_distill


@dataclass
class IndependentRates:
    """Per-receiver entanglement-generation rates from a shared input state."""

    rate_b: float
    rate_c: float
    feasible_b: bool
    feasible_c: bool

    def __iter__(self):
        yield self.rate_b
        yield self.rate_c


def _clip_rate(x: float) -> float:
    return 0.0 if x < 0.0 else float(x)


def batched_entropy(mats: np.ndarray) -> np.ndarray:
    """Base-2 entropy over the last two axes of a stack of Hermitian matrices."""
    evals = np.linalg.eigvalsh(mats)
    evals = np.clip(evals, 0.0, None)
    safe = np.maximum(evals, ENTROPY_CLAMP)
    logs = np.where(evals > ENTROPY_CLAMP, np.log2(safe), 0.0)
    return -(evals * logs).sum(axis=-1)


def _prob_entropy(p: np.ndarray) -> np.ndarray:
    """Shannon entropy along the last axis."""
    safe = np.maximum(p, ENTROPY_CLAMP)
    logs = np.where(p > ENTROPY_CLAMP, np.log2(safe), 0.0)
    return -(p * logs).sum(axis=-1)


def _pareto_cleanup(rows) -> list:
    best = {}
    for c, p, w in rows:
        key = round(c, 12)
        if key not in best or p > best[key][1]:
            best[key] = (c, p, w)
    pts = sorted(best.values(), key=lambda t: t[0])
    kept = []
    run = -np.inf
    for c, p, w in reversed(pts):
        if p > run + 1e-12:
            kept.append(RatePoint(c, p, w))
            run = p
    return list(reversed(kept))


def _budget_check(dense_load: int, cfg: OptimizerConfig, what: str):
    if dense_load > 16 * cfg.matrix_budget:
        raise BudgetError(
            f"{what}: dense load {dense_load} exceeds 16x matrix budget {cfg.matrix_budget}"
        )
    if dense_load > cfg.matrix_budget:
        warnings.warn(f"{what}: dense load {dense_load} exceeds matrix budget {cfg.matrix_budget}")


# ---------------------------------------------------------------------------
# evaluators


class _CqEvaluator:
    """Classical common + classical personal rates from joint distributions p(t, x).

    Rates are per channel use: common = min over receivers of the label/receiver
    Holevo quantity (or the degraded receiver only, in certified mode), personal
    = the conditional Holevo quantity of the input given the label at receiver B.
    """

    def __init__(self, w: CqBroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                 t_size: int | None = None, common: str = "min"):
        cfg = cfg or OptimizerConfig()
        if not isinstance(w, CqBroadcastChannel):
            raise ValidationError("cq frontier expects a CqBroadcastChannel")
        wk = w.tensor_power(k)
        self.k = k
        self.common_kind = common
        self.symbols = list(wk.symbols)
        self.b_stack = np.stack(wk.marginal_conditionals(wk.b_label))
        self.c_stack = np.stack(wk.marginal_conditionals(wk.c_label))
        self.h_b_x = batched_entropy(self.b_stack)
        n_x = len(self.symbols)
        db, dc = self.b_stack.shape[1], self.c_stack.shape[1]
        if common == "c":
            bound = min(n_x, db * db)
        else:
            bound = min(n_x, db * db + dc * dc - 1)
        self.t_size = int(t_size) if t_size is not None else bound
        if self.t_size < 1:
            raise ValidationError("t_size must be at least 1")
        self.n_x = n_x
        self.n_params = self.t_size + self.t_size * n_x
        _budget_check(db * dc * self.t_size, cfg, "cq frontier")

    def decode(self, thetas: np.ndarray):
        t = self.t_size
        p_t = softmax(thetas[:, :t])
        cond = softmax(thetas[:, t:].reshape(thetas.shape[0], t, self.n_x), axis=-1)
        return p_t, cond

    def rates_from_dists(self, p_t: np.ndarray, cond: np.ndarray):
        rho_bt = np.einsum("mtx,xij->mtij", cond, self.b_stack, optimize=True)
        rho_ct = np.einsum("mtx,xij->mtij", cond, self.c_stack, optimize=True)
        h_bt = batched_entropy(rho_bt)
        h_ct = batched_entropy(rho_ct)
        rho_b = np.einsum("mt,mtij->mij", p_t, rho_bt, optimize=True)
        rho_c = np.einsum("mt,mtij->mij", p_t, rho_ct, optimize=True)
        i_tb = batched_entropy(rho_b) - (p_t * h_bt).sum(axis=1)
        i_tc = batched_entropy(rho_c) - (p_t * h_ct).sum(axis=1)
        p_x = np.einsum("mt,mtx->mx", p_t, cond, optimize=True)
        personal = (p_t * h_bt).sum(axis=1) - p_x @ self.h_b_x
        common = i_tc if self.common_kind == "c" else np.minimum(i_tb, i_tc)
        return common / self.k, personal / self.k

    def batch_rates(self, thetas: np.ndarray):
        return self.rates_from_dists(*self.decode(thetas))

    def inits(self, n_restarts: int, path, warm: np.ndarray | None) -> np.ndarray:
        rows = []
        for r in range(n_restarts):
            if r == 0 and warm is not None:
                rows.append(np.array(warm))
                continue
            if r == 1 or (r == 0 and warm is None):
                logits = np.zeros(self.n_params)
                for t in range(self.t_size):
                    logits[self.t_size + t * self.n_x + (t % self.n_x)] = 8.0
                rows.append(logits)
                continue
            rng = seeded_rng(*path, r)
            rows.append(rng.standard_normal(self.n_params) * 2.0)
        return np.stack(rows)

    def witness_params(self, theta: np.ndarray) -> dict:
        p_t, cond = self.decode(theta[None])
        return {"p_t": p_t[0].tolist(), "p_x_given_t": cond[0].tolist()}

    def rates_from_witness(self, params: dict):
        p_t = np.asarray(params["p_t"], dtype=float)[None]
        cond = np.asarray(params["p_x_given_t"], dtype=float)[None]
        c, p = self.rates_from_dists(p_t, cond)
        return float(c[0]), float(p[0])


class _DephasingEvaluator:
    """Classical common + quantum personal rates for generalized dephasing channels.

    Parameters are joint distributions p(t, x) over the dephasing basis; the
    personal rate is the input entropy given the label minus the leaked
    environment entropy, the common rate is the label/receiver-C Holevo
    quantity.
    """

    def __init__(self, u: BroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                 t_size: int | None = None):
        cfg = cfg or OptimizerConfig()
        if not isinstance(u, BroadcastChannel) or u.dephasing is None:
            raise ValidationError("dephasing frontier requires a channel built from a DephasingSpec")
        uk = u.tensor_power(k)
        spec = uk.dephasing
        self.k = k
        self.spec = spec
        n_x = spec.n_in
        vecs = spec.images
        self.ce_stack = np.einsum("xi,xj->xij", vecs, vecs.conj())
        self.c_stack = spec.c_states()
        self.t_size = int(t_size) if t_size is not None else n_x
        self.n_x = n_x
        self.n_params = self.t_size + self.t_size * n_x
        db, dc = uk.out_layout.dims
        _budget_check(db * dc * self.t_size, cfg, "dephasing frontier")

    def decode(self, thetas: np.ndarray):
        t = self.t_size
        p_t = softmax(thetas[:, :t])
        cond = softmax(thetas[:, t:].reshape(thetas.shape[0], t, self.n_x), axis=-1)
        return p_t, cond

    def rates_from_dists(self, p_t: np.ndarray, cond: np.ndarray):
        sig_ce = np.einsum("mtx,xij->mtij", cond, self.ce_stack, optimize=True)
        sig_c = np.einsum("mtx,xij->mtij", cond, self.c_stack, optimize=True)
        h_ce = batched_entropy(sig_ce)
        h_c = batched_entropy(sig_c)
        h_x_t = _prob_entropy(cond)
        personal = (p_t * (h_x_t - h_ce)).sum(axis=1)
        sig_c_avg = np.einsum("mt,mtij->mij", p_t, sig_c, optimize=True)
        common = batched_entropy(sig_c_avg) - (p_t * h_c).sum(axis=1)
        return common / self.k, personal / self.k

    def batch_rates(self, thetas: np.ndarray):
        return self.rates_from_dists(*self.decode(thetas))

    inits = _CqEvaluator.inits
    witness_params = _CqEvaluator.witness_params
    rates_from_witness = _CqEvaluator.rates_from_witness


class _EnsembleEvaluator:
    """Classical common + coherent-information personal rates from pure-state ensembles.

    Parameters are a label distribution p(t) plus one reference/input pure state
    per label; the channel acts on the input half, the personal rate is the
    label-averaged coherent information to receiver B with the label kept.
    """

    def __init__(self, n: BroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                 t_size: int | None = None):
        cfg = cfg or OptimizerConfig()
        if not isinstance(n, BroadcastChannel):
            raise ValidationError("ensemble frontier expects a BroadcastChannel")
        nk = n.tensor_power(k)
        self.k = k
        self.kraus = np.stack(nk.ops)  # (ne, dout, din)
        self.db, self.dc = nk.out_layout.dims
        self.din = nk.in_dim
        self.dref = self.din
        bound = min(self.din * self.din, self.db * self.db + self.dc * self.dc - 1)
        self.t_size = int(t_size) if t_size is not None else bound
        self.state_len = 2 * self.dref * self.din
        self.n_params = self.t_size + self.t_size * self.state_len
        _budget_check(self.db * self.dc * self.t_size, cfg, "ensemble frontier")

    def decode(self, thetas: np.ndarray):
        m = thetas.shape[0]
        t = self.t_size
        p_t = softmax(thetas[:, :t])
        raw = thetas[:, t:].reshape(m, t, 2, self.dref * self.din)
        phi = raw[:, :, 0] + 1j * raw[:, :, 1]
        norms = np.linalg.norm(phi, axis=-1, keepdims=True)
        phi = phi / np.maximum(norms, 1e-15)
        return p_t, phi.reshape(m, t, self.dref, self.din)

    def rates_from_dists(self, p_t: np.ndarray, phi: np.ndarray):
        amp = np.einsum("eoi,mtri->mtroe", self.kraus, phi, optimize=True)
        m, t = amp.shape[0], amp.shape[1]
        amp = amp.reshape(m, t, self.dref, self.db, self.dc, self.kraus.shape[0])
        rho_b = np.einsum("mtrbce,mtrdce->mtbd", amp, amp.conj(), optimize=True)
        rho_c = np.einsum("mtrbce,mtrbde->mtcd", amp, amp.conj(), optimize=True)
        rho_ab = np.einsum("mtrbce,mtsdce->mtrbsd", amp, amp.conj(), optimize=True)
        rho_ab = rho_ab.reshape(m, t, self.dref * self.db, self.dref * self.db)
        h_b = batched_entropy(rho_b)
        h_c = batched_entropy(rho_c)
        h_ab = batched_entropy(rho_ab)
        personal = (p_t * (h_b - h_ab)).sum(axis=1)
        avg_b = np.einsum("mt,mtbd->mbd", p_t, rho_b, optimize=True)
        avg_c = np.einsum("mt,mtcd->mcd", p_t, rho_c, optimize=True)
        i_tb = batched_entropy(avg_b) - (p_t * h_b).sum(axis=1)
        i_tc = batched_entropy(avg_c) - (p_t * h_c).sum(axis=1)
        common = np.minimum(i_tb, i_tc)
        return common / self.k, personal / self.k

    def batch_rates(self, thetas: np.ndarray):
        return self.rates_from_dists(*self.decode(thetas))

    def inits(self, n_restarts: int, path, warm: np.ndarray | None) -> np.ndarray:
        ent = np.eye(self.dref, self.din, dtype=complex).reshape(-1)
        ent = ent / np.linalg.norm(ent)
        rows = []
        for r in range(n_restarts):
            if r == 0 and warm is not None:
                rows.append(np.array(warm))
                continue
            rng = seeded_rng(*path, r)
            if r == 1 or (r == 0 and warm is None):
                theta = np.zeros(self.n_params)
                for t in range(self.t_size):
                    vec = ent + 0.02 * (rng.standard_normal(ent.shape) + 1j * rng.standard_normal(ent.shape))
                    base = self.t_size + t * self.state_len
                    theta[base:base + self.state_len // 2] = vec.real
                    theta[base + self.state_len // 2:base + self.state_len] = vec.imag
                rows.append(theta)
                continue
            rows.append(rng.standard_normal(self.n_params))
        return np.stack(rows)

    def witness_params(self, theta: np.ndarray) -> dict:
        p_t, phi = self.decode(theta[None])
        flat = phi[0].reshape(self.t_size, -1)
        states = [[[float(z.real), float(z.imag)] for z in row] for row in flat]
        return {"p_t": p_t[0].tolist(), "states": states}

    def rates_from_witness(self, params: dict):
        p_t = np.asarray(params["p_t"], dtype=float)[None]
        states = np.asarray(params["states"], dtype=float)
        phi = (states[..., 0] + 1j * states[..., 1]).reshape(1, len(params["p_t"]), self.dref, self.din)
        c, p = self.rates_from_dists(p_t, phi)
        return float(c[0]), float(p[0])


# ---------------------------------------------------------------------------
# frontier sweep


def _sweep(ev, cfg: OptimizerConfig, r_values=None, metadata: dict | None = None) -> Frontier:
    inits = ev.inits(cfg.restarts, (cfg.seed, 0xC0FFEE), warm=None)
    _, common_vals, _ = maximize_batch(lambda th: ev.batch_rates(th)[0], inits, cfg)
    r_max = max(float(common_vals.max()), 0.0)
    if r_values is None:
        r_values = np.linspace(0.0, r_max, cfg.r_grid)
    else:
        r_values = np.asarray(r_values, dtype=float)
    rows = []
    warm = None
    for pi, r_target in enumerate(r_values):
        thetas = ev.inits(cfg.restarts, (cfg.seed, pi), warm)
        vals, info = None, {"converged": False}
        for mu in cfg.penalty_scales:
            def objective(th, mu=mu, r=r_target):
                c, p = ev.batch_rates(th)
                gap = np.maximum(0.0, r - c)
                return p - mu * gap * gap
            thetas, vals, info = maximize_batch(objective, thetas, cfg)
        best = int(np.flatnonzero(vals >= vals.max() - 1e-12)[0])
        theta = thetas[best]
        c_arr, p_arr = ev.batch_rates(theta[None])
        raw_c, raw_p = float(c_arr[0]), float(p_arr[0])
        witness = {
            "params": ev.witness_params(theta),
            "restart": best,
            "r_target": float(r_target),
            "raw_common": raw_c,
            "raw_personal": raw_p,
            "converged": bool(info["converged"]),
        }
        rows.append((_clip_rate(min(r_target, raw_c)), _clip_rate(raw_p), witness))
        warm = theta
    meta = dict(metadata or {})
    meta.update({
        "k": ev.k,
        "t_size": ev.t_size,
        "seed": cfg.seed,
        "restarts": cfg.restarts,
        "grid": int(len(r_values)),
        "r_max": r_max,
    })
    return Frontier(_pareto_cleanup(rows), meta)


def cq_broadcast_frontier(w: CqBroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                          r_values=None, t_size: int | None = None) -> Frontier:
    """Frontier of (common, personal) classical rates for a cq broadcast channel.

    Optimizes joint input distributions p(t, x^k) over the k-use channel; the
    common rate must be decodable by both receivers, the personal rate goes to
    receiver B on top of it.
    """
    cfg = cfg or OptimizerConfig()
    ev = _CqEvaluator(w, k=k, cfg=cfg, t_size=t_size)
    return _sweep(ev, cfg, r_values=r_values, metadata={"mode": "cq", "rates": ("R", "R_B")})


@dataclass
class CqCertification:
    """Outcome of the single-letter optimality check for a cq broadcast channel."""

    commuting: bool
    residual: float
    certified: bool
    method: str
    frontier: Frontier | None


def certify_single_letter_cq(w: CqBroadcastChannel, cfg: OptimizerConfig | None = None,
                             r_values=None) -> CqCertification:
    """Check the degraded/commuting hypotheses and, when they hold, re-solve.

    Certification needs (i) pairwise commuting B-conditionals and (ii) a
    degrading map from B to C with residual at or below 1e-6.  The certified
    frontier uses the tighter label-alphabet bound and constrains the common
    rate through receiver C alone (the binding receiver under degradedness).
    """
    cfg = cfg or OptimizerConfig()
    commuting = w.commuting_b()
    report = degradedness_residual(w, cfg=cfg)
    certified = bool(commuting and report.certified)
    frontier = None
    if certified:
        ev = _CqEvaluator(w, k=1, cfg=cfg, common="c")
        frontier = _sweep(ev, cfg, r_values=r_values,
                          metadata={"mode": "cq-certified", "rates": ("R", "R_B"),
                                    "residual": report.residual})
    return CqCertification(commuting, report.residual, certified, report.method, frontier)


def cq_entanglement_frontier(n: BroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                             r_values=None, t_size: int | None = None) -> Frontier:
    """Frontier of common classical rate vs entanglement-generation rate with B.

    Optimizes ensembles of bipartite pure states fed through the k-use channel;
    the personal rate is the label-averaged coherent information to B.
    """
    cfg = cfg or OptimizerConfig()
    ev = _EnsembleEvaluator(n, k=k, cfg=cfg, t_size=t_size)
    return _sweep(ev, cfg, r_values=r_values, metadata={"mode": "cq-eg", "rates": ("R", "Q")})


def dephasing_cq_frontier(u: BroadcastChannel, cfg: OptimizerConfig | None = None,
                          r_values=None, k: int = 1, t_size: int | None = None) -> Frontier:
    """Frontier of common classical rate vs quantum rate for dephasing channels.

    The channel must carry its DephasingSpec; the optimization is over joint
    distributions p(t, x) on the dephasing basis only.
    """
    cfg = cfg or OptimizerConfig()
    ev = _DephasingEvaluator(u, k=k, cfg=cfg, t_size=t_size)
    return _sweep(ev, cfg, r_values=r_values, metadata={"mode": "dephasing", "rates": ("R", "Q_B")})


def qq_frontier(u: BroadcastChannel, k: int = 1, cfg: OptimizerConfig | None = None,
                r_values=None, t_size: int | None = None) -> Frontier:
    """Frontier of common quantum rate vs personal quantum rate for isometric channels.

    For channels carrying a DephasingSpec the computation delegates to the
    dephasing evaluator (same region with the common rate read as quantum);
    otherwise it runs the pure-state-ensemble evaluator with quantum labels.
    """
    cfg = cfg or OptimizerConfig()
    if not isinstance(u, BroadcastChannel):
        raise ValidationError("qq frontier expects a BroadcastChannel")
    if not u.is_isometric():
        raise ValidationError("qq frontier requires an isometric channel (single Kraus, V†V = I)")
    if u.dephasing is not None:
        ev = _DephasingEvaluator(u, k=k, cfg=cfg, t_size=t_size)
        fr = _sweep(ev, cfg, r_values=r_values,
                    metadata={"mode": "qq-dephasing", "rates": ("Q", "Q_B")})
        return fr
    ev = _EnsembleEvaluator(u, k=k, cfg=cfg, t_size=t_size)
    return _sweep(ev, cfg, r_values=r_values, metadata={"mode": "qq", "rates": ("Q", "Q_B")})


def pinching_boundary(p: float) -> RatePoint:
    """Closed-form outer-boundary point of the pinching-channel region.

    Parameterized by p in [0, 1]: personal rate p, common rate 1 for p <= 1/2
    and the binary entropy of p beyond.
    """
    if not (-1e-12 <= p <= 1 + 1e-12):
        raise ValidationError(f"boundary parameter {p} outside [0, 1]")
    p = min(max(float(p), 0.0), 1.0)
    common = 1.0 if p <= 0.5 else binary_entropy(p)
    return RatePoint(common, p, {"kind": "closed-form", "p": p})


def merging_rates(n: BroadcastChannel, psi_in: PureState) -> MergingRates:
    """Entropic merging rates for a pure input pushed through a broadcast channel.

    The last layout label of ``psi_in`` is the channel input; the rest is the
    retained reference.  Returns the quantum-cost bound I(ref > BC), the
    receiver-pair distillation rate I(B > C), and feasibility (the latter
    positive).
    """
    lay = psi_in.layout
    if len(lay.parts) < 2:
        raise ValidationError("merging input needs a reference label plus the channel input label")
    in_label = lay.labels[-1]
    if lay.dims[-1] != n.in_dim:
        raise ValidationError(
            f"input subsystem {in_label!r} has dimension {lay.dims[-1]}, channel expects {n.in_dim}"
        )
    refs = set(lay.labels[:-1])
    sigma = n.apply_to(psi_in.to_density(), in_label)
    q_c = coherent_information(sigma, refs, {n.b_label, n.c_label})
    bc = coherent_information(sigma, {n.b_label}, {n.c_label})
    return MergingRates(float(q_c), float(bc), bool(bc > 1e-9))


def independent_rates(n: BroadcastChannel, psi_in: PureState) -> IndependentRates:
    """Per-receiver entanglement rates (I(ref_B > B), I(ref_C > C)).

    ``psi_in`` carries two reference labels then the channel input label, in
    that order.  Negative values are reported as-is and flagged infeasible.
    """
    lay = psi_in.layout
    if len(lay.parts) < 3:
        raise ValidationError("independent-rate input needs two reference labels plus the channel input")
    in_label = lay.labels[-1]
    if lay.dims[-1] != n.in_dim:
        raise ValidationError(
            f"input subsystem {in_label!r} has dimension {lay.dims[-1]}, channel expects {n.in_dim}"
        )
    ref_b, ref_c = lay.labels[0], lay.labels[1]
    sigma = n.apply_to(psi_in.to_density(), in_label)
    rate_b = float(coherent_information(sigma, {ref_b}, {n.b_label}))
    rate_c = float(coherent_information(sigma, {ref_c}, {n.c_label}))
    return IndependentRates(rate_b, rate_c, rate_b > 1e-9, rate_c > 1e-9)


# ---------------------------------------------------------------------------
# witness re-evaluation


def build_evaluator(mode: str, channel, k: int = 1, t_size: int | None = None,
                    cfg: OptimizerConfig | None = None):
    """Reconstruct the evaluator a witness was produced by."""
    cfg = cfg or OptimizerConfig()
    if mode == "cq":
        return _CqEvaluator(channel, k=k, cfg=cfg, t_size=t_size)
    if mode == "cq-certified":
        return _CqEvaluator(channel, k=k, cfg=cfg, t_size=t_size, common="c")
    if mode in ("dephasing", "qq-dephasing"):
        return _DephasingEvaluator(channel, k=k, cfg=cfg, t_size=t_size)
    if mode in ("cq-eg", "qq"):
        return _EnsembleEvaluator(channel, k=k, cfg=cfg, t_size=t_size)
    raise ValidationError(f"unknown frontier mode {mode!r}")


def evaluate_witness(mode: str, channel, params: dict, k: int = 1) -> tuple[float, float]:
    """Recompute (common, personal) from stored witness parameters."""
    t_size = len(params["p_t"])
    ev = build_evaluator(mode, channel, k=k, t_size=t_size)
    return ev.rates_from_witness(params)
