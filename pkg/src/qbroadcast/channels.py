"""Channels in Kraus form, Stinespring extensions, and broadcast-channel models.

A broadcast channel is a CPTP map from one input to a two-receiver output
B (x) C; marginals, complementary channels, and generalized dephasing
constructors are derived from the Kraus representation.  The degrading-map
search at the bottom certifies (numerically) whether one receiver's marginal
can be post-processed into the other's.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .states import (
    CqState,
    DensityMatrix,
    PureState,
    SystemLayout,
    TRACE_TOL,
    _hermitize,
    layout,
    trace_distance,
)

KRAUS_TOL = 1e-9
COMMUTE_TOL = 1e-9
CERTIFY_THRESHOLD = 1e-6


class KrausChannel:
    """CPTP map given by Kraus operators; sum K†K = I within 1e-9."""

    __slots__ = ("ops", "in_dim", "out_layout")

    def __init__(self, ops: Sequence[np.ndarray], out_layout: SystemLayout, validate: bool = True):
        ops = [np.asarray(k, dtype=complex) for k in ops]
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        out_dim, in_dim = ops[0].shape
        for k in ops:
            if k.shape != (out_dim, in_dim):
                raise ValidationError(f"inconsistent Kraus shapes: {k.shape} vs {(out_dim, in_dim)}")
        if out_layout.dim != out_dim:
            raise ValidationError(
                f"output layout dimension {out_layout.dim} does not match Kraus rows {out_dim}"
            )
        if validate:
            gram = sum(k.conj().T @ k for k in ops)
            dev = np.abs(gram - np.eye(in_dim)).max()
            if dev > KRAUS_TOL:
                raise ValidationError(f"Kraus set is not trace preserving: |sum K†K - I| = {dev:.3e}")
        self.ops = [np.ascontiguousarray(k) for k in ops]
        self.in_dim = in_dim
        self.out_layout = out_layout

    @property
    def out_dim(self) -> int:
        return self.out_layout.dim

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """Channel action sum_i K_i rho K_i†, Hermitized."""
        if rho.dim != self.in_dim:
            raise ValidationError(f"input dimension {rho.dim} does not match channel input {self.in_dim}")
        out = np.zeros((self.out_dim, self.out_dim), dtype=complex)
        for k in self.ops:
            out += k @ rho.matrix @ k.conj().T
        return DensityMatrix(_hermitize(out), self.out_layout, validate=False)

    def apply_to(self, rho: DensityMatrix, label: str) -> DensityMatrix:
        """Apply the channel to one subsystem, leaving the others untouched.

        The target label is replaced by the channel's output labels (which must
        not collide with the remaining labels).
        """
        rest = [name for name in rho.layout.labels if name != label]
        collide = set(self.out_layout.labels) & set(rest)
        if collide:
            raise ValidationError(f"channel output labels collide with state labels: {sorted(collide)}")
        r = rho.reorder([label] + rest)
        din = r.layout.dims[0]
        if din != self.in_dim:
            raise ValidationError(f"subsystem {label!r} has dimension {din}, channel expects {self.in_dim}")
        d_rest = r.layout.dim // din
        block = r.matrix.reshape(din, d_rest, din, d_rest)
        dout = self.out_dim
        out = np.zeros((dout, d_rest, dout, d_rest), dtype=complex)
        for k in self.ops:
            out += np.einsum("oi,irjs,pj->orps", k, block, k.conj(), optimize=True)
        new_layout = SystemLayout(self.out_layout.parts + tuple(r.layout.parts[1:]))
        full = out.reshape(dout * d_rest, dout * d_rest)
        return DensityMatrix(_hermitize(full), new_layout, validate=False)

    def apply_to_pure_isometric(self, psi: PureState, label: str) -> PureState:
        """Isometric channels only: push a pure state through V on one subsystem."""
        if len(self.ops) != 1:
            raise ValidationError("pure-state push-through requires a single-Kraus (isometric) channel")
        v = self.ops[0]
        rest = [name for name in psi.layout.labels if name != label]
        collide = set(self.out_layout.labels) & set(rest)
        if collide:
            raise ValidationError(f"channel output labels collide with state labels: {sorted(collide)}")
        perm = [psi.layout.index(label)] + [psi.layout.index(n) for n in rest]
        dims = psi.layout.dims
        vec = psi.amplitudes.reshape(dims).transpose(perm).reshape(self.in_dim, -1)
        out = v @ vec
        parts = tuple(self.out_layout.parts) + tuple(psi.layout.parts[p] for p in perm[1:])
        return PureState(out.reshape(-1), SystemLayout(parts), validate=False)

    def tensor(self, other: "KrausChannel") -> "KrausChannel":
        overlap = set(self.out_layout.labels) & set(other.out_layout.labels)
        if overlap:
            raise ValidationError(f"tensor channel label collision: {sorted(overlap)}")
        ops = [np.kron(a, b) for a in self.ops for b in other.ops]
        return KrausChannel(ops, self.out_layout.concat(other.out_layout), validate=False)

    def is_isometric(self, tol: float = KRAUS_TOL) -> bool:
        if len(self.ops) != 1:
            return False
        v = self.ops[0]
        return bool(np.abs(v.conj().T @ v - np.eye(self.in_dim)).max() <= tol)

    def __repr__(self):
        return f"KrausChannel(in={self.in_dim}, out={self.out_layout.labels}, n_kraus={len(self.ops)})"


class IsometricExtension:
    """Stinespring isometry V: input -> output (x) environment."""

    __slots__ = ("matrix", "in_dim", "out_layout", "env_layout")

    def __init__(self, matrix: np.ndarray, out_layout: SystemLayout, env_layout: SystemLayout, validate: bool = True):
        matrix = np.asarray(matrix, dtype=complex)
        in_dim = matrix.shape[1]
        if matrix.shape[0] != out_layout.dim * env_layout.dim:
            raise ValidationError("isometry rows must equal output dim times environment dim")
        if validate:
            dev = np.abs(matrix.conj().T @ matrix - np.eye(in_dim)).max()
            if dev > KRAUS_TOL:
                raise ValidationError(f"V†V deviates from identity by {dev:.3e}")
        self.matrix = matrix
        self.in_dim = in_dim
        self.out_layout = out_layout
        self.env_layout = env_layout

    @property
    def full_layout(self) -> SystemLayout:
        return self.out_layout.concat(self.env_layout)

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        """V rho V† on output (x) environment."""
        if rho.dim != self.in_dim:
            raise ValidationError(f"input dimension {rho.dim} does not match isometry input {self.in_dim}")
        out = self.matrix @ rho.matrix @ self.matrix.conj().T
        return DensityMatrix(_hermitize(out), self.full_layout, validate=False)

    def as_channel(self) -> KrausChannel:
        return KrausChannel([self.matrix], self.full_layout, validate=False)


def isometric_extension(ch: KrausChannel, env_label: str = "E") -> IsometricExtension:
    """Canonical extension V = sum_i K_i (x) |i>^E in the given Kraus order."""
    while env_label in ch.out_layout.labels:
        env_label = "_" + env_label
    n_env = len(ch.ops)
    v = np.zeros((ch.out_dim * n_env, ch.in_dim), dtype=complex)
    for e, k in enumerate(ch.ops):
        v[e::n_env, :] = k  # row index o*n_env + e
    return IsometricExtension(v, ch.out_layout, layout((env_label, n_env)), validate=False)


def complementary(ch: KrausChannel, env_label: str = "E") -> KrausChannel:
    """Channel to the environment of the canonical isometric extension."""
    while env_label in ch.out_layout.labels:
        env_label = "_" + env_label
    n_env = len(ch.ops)
    stack = np.stack(ch.ops)  # (env, out, in)
    ops = [stack[:, o, :] for o in range(ch.out_dim)]  # L_o[e, i] = K_e[o, i]
    return KrausChannel(ops, layout((env_label, n_env)), validate=False)


def completely_dephase(rho: DensityMatrix, basis_label: str) -> DensityMatrix:
    """Zero all off-diagonal elements in the computational basis of one subsystem."""
    axis = rho.layout.index(basis_label)
    dims = rho.layout.dims
    d = dims[axis]
    n = len(dims)
    tensor = np.array(rho.matrix.reshape(dims + dims))
    moved = np.moveaxis(tensor, (axis, axis + n), (0, 1))
    mask = np.eye(d, dtype=bool)
    moved[~mask] = 0.0
    return DensityMatrix(tensor.reshape(rho.dim, rho.dim), rho.layout, validate=False)


def make_completely_dephasing(dim: int, out_label: str = "B") -> KrausChannel:
    """The qubit/qudit map that keeps only computational-basis diagonal entries."""
    ops = []
    for x in range(dim):
        k = np.zeros((dim, dim), dtype=complex)
        k[x, x] = 1.0
        ops.append(k)
    return KrausChannel(ops, layout((out_label, dim)), validate=False)


def make_identity_channel(dim: int, out_label: str = "B") -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)], layout((out_label, dim)), validate=False)


class BroadcastChannel(KrausChannel):
    """Single-input channel whose output layout is exactly the two receiver labels.

    ``dephasing`` optionally records the generalized-dephasing structure the
    channel was built from; region evaluators use it for the classical-input
    reduction.
    """

    __slots__ = ("dephasing",)

    def __init__(self, ops, out_layout: SystemLayout, dephasing: "DephasingSpec | None" = None, validate: bool = True):
        if len(out_layout.parts) != 2:
            raise ValidationError(
                f"broadcast output must carry exactly two receiver labels, got {out_layout.labels}"
            )
        super().__init__(ops, out_layout, validate=validate)
        self.dephasing = dephasing

    @property
    def b_label(self) -> str:
        return self.out_layout.labels[0]

    @property
    def c_label(self) -> str:
        return self.out_layout.labels[1]

    def marginal(self, label: str) -> KrausChannel:
        """Marginal channel to one receiver, by slicing Kraus operators."""
        idx = self.out_layout.index(label)
        db, dc = self.out_layout.dims
        kept_dim = (db, dc)[idx]
        ops = []
        for k in self.ops:
            block = k.reshape(db, dc, self.in_dim)
            if idx == 0:
                ops.extend(block[:, c, :] for c in range(dc))
            else:
                ops.extend(block[b, :, :] for b in range(db))
        part = self.out_layout.parts[idx]
        return KrausChannel(ops, SystemLayout((part,)), validate=False)

    def marginals(self) -> tuple[KrausChannel, KrausChannel]:
        """(channel to B, channel to C)."""
        return self.marginal(self.b_label), self.marginal(self.c_label)

    def tensor_power(self, k: int) -> "BroadcastChannel":
        """k parallel uses, with the B factors and C factors each merged."""
        if k < 1:
            raise ValidationError(f"tensor power needs k >= 1, got {k}")
        if k == 1:
            return self
        db, dc = self.out_layout.dims
        acc_ops = [op.reshape(db, dc, self.in_dim) for op in self.ops]
        acc_b, acc_c, acc_in = db, dc, self.in_dim
        for _ in range(k - 1):
            nxt = []
            for a in acc_ops:
                for op in self.ops:
                    b = op.reshape(db, dc, self.in_dim)
                    # kron on each of the three indices, keeping (B..., C..., in) grouping
                    prod = np.einsum("xyi,uvj->xuyvij", a, b, optimize=True)
                    nxt.append(prod.reshape(acc_b * db, acc_c * dc, acc_in * self.in_dim))
            acc_ops = nxt
            acc_b, acc_c, acc_in = acc_b * db, acc_c * dc, acc_in * self.in_dim
        out = SystemLayout(((self.b_label, acc_b), (self.c_label, acc_c)))
        spec = self.dephasing.tensor_power(k) if self.dephasing is not None else None
        return BroadcastChannel([op.reshape(acc_b * acc_c, acc_in) for op in acc_ops], out, dephasing=spec, validate=False)


class CqBroadcastChannel:
    """Classical-input broadcast channel: each symbol prepares a state on B (x) C."""

    __slots__ = ("symbols", "conditionals", "out_layout")

    def __init__(self, conditionals: dict, validate: bool = True):
        if not conditionals:
            raise ValidationError("cq broadcast channel needs at least one input symbol")
        symbols = list(conditionals)
        ref = conditionals[symbols[0]].layout
        if len(ref.parts) != 2:
            raise ValidationError(
                f"cq broadcast conditionals must live on exactly two receiver labels, got {ref.labels}"
            )
        for x, rho in conditionals.items():
            if rho.layout != ref:
                raise ValidationError(f"conditional for symbol {x!r} is on a different layout")
            if validate:
                tr = rho.matrix.trace().real
                if abs(tr - 1.0) > TRACE_TOL:
                    raise ValidationError(f"conditional for symbol {x!r} has trace {tr}, not 1 within 1e-9")
        self.symbols = symbols
        self.conditionals = dict(conditionals)
        self.out_layout = ref

    @property
    def n_symbols(self) -> int:
        return len(self.symbols)

    @property
    def b_label(self) -> str:
        return self.out_layout.labels[0]

    @property
    def c_label(self) -> str:
        return self.out_layout.labels[1]

    def b_dim(self) -> int:
        return self.out_layout.dims[0]

    def c_dim(self) -> int:
        return self.out_layout.dims[1]

    def marginal_conditionals(self, label: str) -> list[np.ndarray]:
        """Per-symbol reduced states on one receiver, in symbol order."""
        from .states import partial_trace

        return [partial_trace(self.conditionals[x], {label}).matrix for x in self.symbols]

    def output_cq(self, weights) -> CqState:
        """Ensemble {p(x), rho_x^{BC}} for a distribution over the input alphabet."""
        if not isinstance(weights, dict):
            arr = np.asarray(weights, dtype=float).reshape(-1)
            if arr.shape[0] != self.n_symbols:
                raise ValidationError(f"weight vector length {arr.shape[0]} != alphabet size {self.n_symbols}")
            weights = {x: float(w) for x, w in zip(self.symbols, arr)}
        return CqState(weights, {x: self.conditionals[x] for x in self.symbols})

    def commuting_b(self, tol: float = COMMUTE_TOL) -> bool:
        """Whether all B-marginal conditionals pairwise commute."""
        mats = self.marginal_conditionals(self.b_label)
        for i in range(len(mats)):
            for j in range(i + 1, len(mats)):
                if np.abs(mats[i] @ mats[j] - mats[j] @ mats[i]).max() > tol:
                    return False
        return True

    def tensor_power(self, k: int) -> "CqBroadcastChannel":
        """k parallel uses: tuple symbols, B factors and C factors each merged."""
        if k < 1:
            raise ValidationError(f"tensor power needs k >= 1, got {k}")
        if k == 1:
            return self
        from .states import tensor_product

        base = {(x,): rho for x, rho in self.conditionals.items()}
        bl, cl = self.b_label, self.c_label
        for _ in range(k - 1):
            nxt = {}
            for xs, acc in base.items():
                a = DensityMatrix(acc.matrix, SystemLayout((("b0", acc.layout.dims[0]), ("c0", acc.layout.dims[1]))), validate=False)
                for x, rho in self.conditionals.items():
                    b = DensityMatrix(rho.matrix, SystemLayout((("b1", rho.layout.dims[0]), ("c1", rho.layout.dims[1]))), validate=False)
                    prod = tensor_product(a, b).merge_labels([(bl, ["b0", "b1"]), (cl, ["c0", "c1"])])
                    nxt[xs + (x,)] = prod
            base = nxt
        return CqBroadcastChannel(base, validate=False)

    def __repr__(self):
        return f"CqBroadcastChannel(|X|={self.n_symbols}, B={self.b_dim()}, C={self.c_dim()})"


@dataclass(frozen=True)
class DephasingSpec:
    """Generalized dephasing data: per-basis-symbol environment vectors on C (x) E.

    The isometry writes the input basis through to B and attaches |psi_x> on
    the C (x) E environment; the C/E split is an explicit input.
    """

    c_dim: int
    e_dim: int
    images: np.ndarray  # (n_in, c_dim * e_dim)

    def __post_init__(self):
        images = np.asarray(self.images, dtype=complex)
        if images.ndim != 2 or images.shape[1] != self.c_dim * self.e_dim:
            raise ValidationError(
                f"dephasing images must be (n, {self.c_dim * self.e_dim}), got {images.shape}"
            )
        norms = np.linalg.norm(images, axis=1)
        bad = np.abs(norms - 1.0).max()
        if bad > 1e-10:
            raise ValidationError(f"dephasing environment vector norm deviates from 1 by {bad:.3e}")
        images = np.array(images)
        images.flags.writeable = False
        object.__setattr__(self, "images", images)

    @property
    def n_in(self) -> int:
        return self.images.shape[0]

    def gram(self) -> np.ndarray:
        """Overlap matrix G[x, y] = <psi_y | psi_x>."""
        return self.images @ self.images.conj().T

    def c_states(self) -> np.ndarray:
        """Per-symbol reduced environment states on C alone, shape (n, c, c)."""
        vecs = self.images.reshape(self.n_in, self.c_dim, self.e_dim)
        return np.einsum("xce,xde->xcd", vecs, vecs.conj())

    def tensor_power(self, k: int) -> "DephasingSpec":
        if k < 1:
            raise ValidationError(f"tensor power needs k >= 1, got {k}")
        out = self
        for _ in range(k - 1):
            n, c0, e0 = out.n_in, out.c_dim, out.e_dim
            a = out.images.reshape(n, c0, e0)
            b = self.images.reshape(self.n_in, self.c_dim, self.e_dim)
            prod = np.einsum("xce,ydf->xycdef", a, b, optimize=True)
            c1, e1 = c0 * self.c_dim, e0 * self.e_dim
            out = DephasingSpec(c1, e1, prod.reshape(n * self.n_in, c1 * e1))
        return out


def make_generalized_dephasing(spec: DephasingSpec, b_label: str = "B", c_label: str = "C") -> BroadcastChannel:
    """Broadcast channel of an isometry writing |x> to B and |psi_x> to C (x) E.

    The E part (when nontrivial) is the unobserved environment, so the Kraus
    operators are indexed by the E basis.
    """
    n, dc, de = spec.n_in, spec.c_dim, spec.e_dim
    vecs = spec.images.reshape(n, dc, de)
    ops = []
    for e in range(de):
        k = np.zeros((n * dc, n), dtype=complex)
        for x in range(n):
            k[x * dc:(x + 1) * dc, x] = vecs[x, :, e]
        ops.append(k)
    out = SystemLayout(((b_label, n), (c_label, dc)))
    return BroadcastChannel(ops, out, dephasing=spec, validate=False)


def make_pinching() -> BroadcastChannel:
    """The 3-input block-dephasing broadcast channel with a two-level receiver C.

    Bob's marginal keeps the {1,2} block coherent and removes coherence with
    basis state 3; Charlie receives the full (one-qubit) environment.
    """
    images = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]], dtype=complex)
    return make_generalized_dephasing(DephasingSpec(2, 1, images))


def make_ghz_copy(dim: int = 2) -> BroadcastChannel:
    """Basis-copy isometry |x> -> |x>^B |x>^C."""
    return make_generalized_dephasing(DephasingSpec(dim, 1, np.eye(dim, dtype=complex)))


def _cq_from_pairs(pairs) -> CqBroadcastChannel:
    out = {}
    for x, (b_vec, c_vec) in pairs.items():
        b = np.outer(b_vec, np.conj(b_vec))
        c = np.outer(c_vec, np.conj(c_vec))
        lay = layout(("B", b.shape[0]), ("C", c.shape[0]))
        out[x] = DensityMatrix(np.kron(b, c), lay, validate=False)
    return CqBroadcastChannel(out, validate=False)


def make_pinching_cq() -> CqBroadcastChannel:
    """Classical-input version of the pinching channel: x -> |x><x|^B (x) psi_x^C."""
    e0 = np.array([1.0, 0.0], dtype=complex)
    e1 = np.array([0.0, 1.0], dtype=complex)
    basis3 = np.eye(3, dtype=complex)
    return _cq_from_pairs({
        1: (basis3[0], e0),
        2: (basis3[1], e0),
        3: (basis3[2], e1),
    })


def make_noiseless_bit() -> CqBroadcastChannel:
    """One classical bit delivered intact to both receivers."""
    e = np.eye(2, dtype=complex)
    return _cq_from_pairs({0: (e[0], e[0]), 1: (e[1], e[1])})


def make_constant_cq() -> CqBroadcastChannel:
    """Two input symbols mapped to one fixed output state: zero-capacity reference."""
    e = np.eye(2, dtype=complex)
    return _cq_from_pairs({0: (e[0], e[0]), 1: (e[0], e[0])})


def make_classical_cascade(p_y_given_x: np.ndarray, p_z_given_y: np.ndarray) -> CqBroadcastChannel:
    """Embed a classical degraded broadcast X -> Y -> Z as diagonal cq conditionals.

    B holds Y and C holds the cascaded Z; the joint conditional keeps the
    classical correlation p(y, z | x) = p(y|x) p(z|y).
    """
    p1 = np.asarray(p_y_given_x, dtype=float)
    p2 = np.asarray(p_z_given_y, dtype=float)
    if np.abs(p1.sum(axis=0) - 1.0).max() > 1e-12 or np.abs(p2.sum(axis=0) - 1.0).max() > 1e-12:
        raise ValidationError("stochastic matrix columns must sum to 1 within 1e-12")
    if p1.min() < 0 or p2.min() < 0:
        raise ValidationError("stochastic matrices must be nonnegative")
    ny, nx = p1.shape
    nz = p2.shape[0]
    if p2.shape[1] != ny:
        raise ValidationError(f"cascade shape mismatch: p_z_given_y has {p2.shape[1]} columns, expected {ny}")
    lay = layout(("B", ny), ("C", nz))
    out = {}
    for x in range(nx):
        joint = np.zeros((ny * nz, ny * nz), dtype=complex)
        for y in range(ny):
            for z in range(nz):
                joint[y * nz + z, y * nz + z] = p1[y, x] * p2[z, y]
        out[x] = DensityMatrix(joint, lay, validate=False)
    return CqBroadcastChannel(out, validate=False)


def make_bsc_cascade(flip1: float = 0.1, flip2: float = 0.2) -> CqBroadcastChannel:
    """Binary symmetric cascade: BSC(flip1) to B, then BSC(flip2) from B to C."""
    p1 = np.array([[1 - flip1, flip1], [flip1, 1 - flip1]])
    p2 = np.array([[1 - flip2, flip2], [flip2, 1 - flip2]])
    return make_classical_cascade(p1, p2)


# ---------------------------------------------------------------------------
# degrading-map search


@dataclass
class DegradednessReport:
    """Outcome of the numerical search for a degrading map between marginals."""

    residual: float
    degrading_map: KrausChannel
    certified: bool
    method: str

    def __iter__(self):
        yield self.residual
        yield self.degrading_map


def _probe_densities(dim: int) -> list[np.ndarray]:
    """Basis matrix units symmetrized into a spanning set of density matrices."""
    probes = []
    eye = np.eye(dim, dtype=complex)
    for i in range(dim):
        probes.append(np.outer(eye[i], eye[i]))
    for i in range(dim):
        for j in range(i + 1, dim):
            plus = (eye[i] + eye[j]) / np.sqrt(2)
            plusi = (eye[i] + 1j * eye[j]) / np.sqrt(2)
            probes.append(np.outer(plus, plus.conj()))
            probes.append(np.outer(plusi, plusi.conj()))
    return probes


def _probe_pairs(bc) -> tuple[list[np.ndarray], list[np.ndarray], bool]:
    """(B-side states, C-side states, all_b_commute) for the degrading search."""
    if isinstance(bc, CqBroadcastChannel):
        b_states = bc.marginal_conditionals(bc.b_label)
        c_states = bc.marginal_conditionals(bc.c_label)
    elif isinstance(bc, BroadcastChannel):
        ch_b, ch_c = bc.marginals()
        probes = _probe_densities(bc.in_dim)
        lay_in = layout(("in", bc.in_dim))
        b_states = [ch_b.apply(DensityMatrix(p, lay_in, validate=False)).matrix for p in probes]
        c_states = [ch_c.apply(DensityMatrix(p, lay_in, validate=False)).matrix for p in probes]
    elif isinstance(bc, tuple) and len(bc) == 2:
        ch_b, ch_c = bc
        if ch_b.in_dim != ch_c.in_dim:
            raise ValidationError("marginal pair must share the input dimension")
        probes = _probe_densities(ch_b.in_dim)
        lay_in = layout(("in", ch_b.in_dim))
        b_states = [ch_b.apply(DensityMatrix(p, lay_in, validate=False)).matrix for p in probes]
        c_states = [ch_c.apply(DensityMatrix(p, lay_in, validate=False)).matrix for p in probes]
    else:
        raise ValidationError("expected a BroadcastChannel, CqBroadcastChannel, or (to-B, to-C) pair")
    commute = True
    for i in range(len(b_states)):
        for j in range(i + 1, len(b_states)):
            if np.abs(b_states[i] @ b_states[j] - b_states[j] @ b_states[i]).max() > COMMUTE_TOL:
                commute = False
                break
        if not commute:
            break
    return b_states, c_states, commute


def _apply_map_stack(kraus_stack: np.ndarray, states: np.ndarray) -> np.ndarray:
    """Kraus stack (n_env, dc, db) applied to states (p, db, db) -> (p, dc, dc)."""
    return np.einsum("ecb,pbd,efd->pcf", kraus_stack, states, kraus_stack.conj(), optimize=True)


def _residual_of_stack(kraus_stack, b_states, c_states) -> float:
    preds = _apply_map_stack(kraus_stack, np.stack(b_states))
    worst = 0.0
    for pred, target in zip(preds, c_states):
        diff = _hermitize(pred - target)
        worst = max(worst, float(np.linalg.svd(diff, compute_uv=False).sum()))
    return worst


def _measure_prepare_stack(basis: np.ndarray, preps: np.ndarray) -> np.ndarray:
    """Kraus stack for measure-in-basis / prepare tau_j, eigendecomposing each prep."""
    db = basis.shape[0]
    dc = preps.shape[1]
    ops = []
    for j in range(db):
        evals, vecs = np.linalg.eigh(_hermitize(preps[j]))
        for r in range(dc):
            lam = max(float(evals[r]), 0.0)
            if lam <= 1e-15:
                continue
            ops.append(np.sqrt(lam) * np.outer(vecs[:, r], basis[:, j].conj()))
    return np.stack(ops) if ops else np.zeros((1, dc, db), dtype=complex)


def _choi_fit_stack(b_stack: np.ndarray, c_stack: np.ndarray) -> np.ndarray:
    """Least-squares transfer-matrix fit, projected to a trace-preserving Kraus stack.

    Solves the linear system mapping each B-side probe to its C-side target,
    rearranges the solution into block form, clips it to positive semidefinite,
    and rescales so the Kraus operators close to the identity.  Exact when a
    degrading map exists and the probes span; otherwise a warm start.
    """
    p, db, _ = b_stack.shape
    dc = c_stack.shape[1]
    bmat = b_stack.reshape(p, db * db)
    cmat = c_stack.reshape(p, dc * dc)
    t, *_ = np.linalg.lstsq(bmat, cmat, rcond=None)
    j = t.reshape(db, db, dc, dc).transpose(0, 2, 1, 3).reshape(db * dc, db * dc)
    vals, vecs = np.linalg.eigh(_hermitize(j))
    j = (vecs * np.clip(vals, 0.0, None)) @ vecs.conj().T
    red = np.einsum("icjc->ij", j.reshape(db, dc, db, dc))
    rv, rw = np.linalg.eigh(_hermitize(red))
    g = (rw * (1.0 / np.sqrt(np.maximum(rv, 1e-12)))) @ rw.conj().T
    gi = np.kron(g, np.eye(dc, dtype=complex))
    vals, vecs = np.linalg.eigh(_hermitize(gi @ j @ gi.conj().T))
    ops = []
    for k in range(len(vals) - 1, -1, -1):
        if vals[k] <= 1e-12:
            break
        ops.append(np.sqrt(vals[k]) * vecs[:, k].reshape(db, dc).T)
    if not ops:
        ops.append(np.zeros((dc, db), dtype=complex))
    return np.stack(ops)


def _common_eigenbasis(mats: list[np.ndarray], rng: np.random.Generator) -> np.ndarray:
    """Eigenbasis of a random Hermitian combination (generic, so it is common)."""
    weights = rng.standard_normal(len(mats))
    acc = sum(w * m for w, m in zip(weights, mats))
    _, vecs = np.linalg.eigh(_hermitize(acc))
    return vecs


def degradedness_residual(bc_or_pair, candidate_dim_env: int | None = None, cfg=None) -> DegradednessReport:
    """Search for a degrading map turning the B marginal into the C marginal.

    Minimizes the summed squared Frobenius deviation over a spanning probe set
    (for cq channels, the conditional states themselves) and reports the worst
    trace distance.  Commuting B-side probes restrict the search to
    measure-and-prepare maps in the common eigenbasis, solved as least squares
    with a projection fallback; the general case optimizes a Kraus stack under
    QR retraction.  A residual at or below 1e-6 certifies degradedness;
    anything larger is inconclusive.
    """
    from .optimize import OptimizerConfig, maximize_batch

    if cfg is None:
        cfg = OptimizerConfig()
    b_states, c_states, commute = _probe_pairs(bc_or_pair)
    db = b_states[0].shape[0]
    dc = c_states[0].shape[0]
    b_stack = np.stack(b_states)
    c_stack = np.stack(c_states)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, 0x5E9]))

    candidates: list[tuple[np.ndarray, str]] = []
    if db == dc:
        candidates.append((np.eye(dc, dtype=complex)[None, :, :], "identity"))
    if isinstance(bc_or_pair, BroadcastChannel) and bc_or_pair.dephasing is not None:
        spec = bc_or_pair.dephasing
        if spec.n_in == db and spec.c_dim == dc and spec.e_dim == 1:
            ops = np.zeros((db, dc, db), dtype=complex)
            for x in range(db):
                ops[x, :, x] = spec.images[x]
            candidates.append((ops, "measure-prepare (dephasing basis)"))

    best_stack = None
    best_residual = np.inf
    best_method = "none"
    for stack, name in candidates:
        r = _residual_of_stack(stack, b_states, c_states)
        if r < best_residual:
            best_stack, best_residual, best_method = stack, r, name
    if best_residual <= CERTIFY_THRESHOLD:
        dmap = KrausChannel(list(best_stack), layout(("C", dc)), validate=False)
        return DegradednessReport(best_residual, dmap, True, best_method)

    if commute:
        # measure in the common eigenbasis, prepare free states: least squares in the preps
        basis = _common_eigenbasis(b_states, rng)
        q = np.einsum("bj,pbd,dj->pj", basis.conj(), b_stack, basis, optimize=True).real  # (p, j)
        rhs = c_stack.reshape(len(c_states), dc * dc)
        sol, *_ = np.linalg.lstsq(q.astype(complex), rhs, rcond=None)
        preps = sol.reshape(db, dc, dc)
        ok = True
        for j in range(db):
            h = _hermitize(preps[j])
            if np.abs(preps[j] - h).max() > 1e-8 or abs(h.trace().real - 1.0) > 1e-8:
                ok = False
                break
            if np.linalg.eigvalsh(h).min() < -1e-9:
                ok = False
                break
        if ok:
            stack = _measure_prepare_stack(basis, preps)
            r = _residual_of_stack(stack, b_states, c_states)
            if r < best_residual:
                best_stack, best_residual, best_method = stack, r, "measure-prepare (least squares)"
        if best_residual > CERTIFY_THRESHOLD:
            # constrained fallback: parameterize each prep as G G† / tr
            n_prep = db
            n_params = n_prep * 2 * dc * dc

            def decode(thetas: np.ndarray) -> np.ndarray:
                m = thetas.shape[0]
                g = thetas.reshape(m, n_prep, 2, dc, dc)
                gc = g[:, :, 0] + 1j * g[:, :, 1]
                mats = np.einsum("mjab,mjcb->mjac", gc, gc.conj(), optimize=True)
                tr = np.einsum("mjaa->mj", mats).real
                return mats / np.maximum(tr, 1e-30)[:, :, None, None]

            def objective(thetas: np.ndarray) -> np.ndarray:
                taus = decode(thetas)
                preds = np.einsum("pj,mjcd->mpcd", q, taus, optimize=True)
                diff = preds - c_stack[None]
                return -np.einsum("mpcd,mpcd->m", diff, diff.conj(), optimize=True).real

            inits = rng.standard_normal((cfg.restarts, n_params))
            thetas, vals, _ = maximize_batch(objective, inits, cfg)
            top = decode(thetas[np.argmax(vals)][None])[0]
            stack = _measure_prepare_stack(basis, top)
            r = _residual_of_stack(stack, b_states, c_states)
            if r < best_residual:
                best_stack, best_residual, best_method = stack, r, "measure-prepare (optimized)"
    else:
        fit = _choi_fit_stack(b_stack, c_stack)
        r = _residual_of_stack(fit, b_states, c_states)
        if r < best_residual:
            best_stack, best_residual, best_method = fit, r, "kraus (linear fit)"
        if best_residual <= CERTIFY_THRESHOLD:
            dmap = KrausChannel(list(best_stack), layout(("C", dc)), validate=False)
            return DegradednessReport(float(best_residual), dmap, True, best_method)

        n_env = candidate_dim_env if candidate_dim_env is not None else db * dc
        n_params = 2 * n_env * dc * db

        def decode_general(thetas: np.ndarray) -> np.ndarray:
            m = thetas.shape[0]
            g = thetas.reshape(m, 2, n_env * dc, db)
            gc = g[:, 0] + 1j * g[:, 1]
            qmat, _ = np.linalg.qr(gc)  # (m, n_env*dc, db), orthonormal columns
            return qmat.reshape(m, n_env, dc, db)

        def objective_general(thetas: np.ndarray) -> np.ndarray:
            stacks = decode_general(thetas)
            preds = np.einsum("mecb,pbd,mefd->mpcf", stacks, b_stack, stacks.conj(), optimize=True)
            diff = preds - c_stack[None]
            return -np.einsum("mpcf,mpcf->m", diff, diff.conj(), optimize=True).real

        inits = rng.standard_normal((cfg.restarts, n_params))
        if fit.shape[0] <= n_env:
            pad = np.zeros((n_env, dc, db), dtype=complex)
            pad[: fit.shape[0]] = fit
            flat = pad.reshape(n_env * dc, db)
            inits[0] = np.concatenate([flat.real.ravel(), flat.imag.ravel()])
        thetas, vals, _ = maximize_batch(objective_general, inits, cfg)
        stack = decode_general(thetas[np.argmax(vals)][None])[0]
        r = _residual_of_stack(stack, b_states, c_states)
        if r < best_residual:
            best_stack, best_residual, best_method = stack, r, "kraus (QR retraction)"

    dmap = KrausChannel([k for k in best_stack], layout(("C", dc)), validate=False)
    return DegradednessReport(float(best_residual), dmap, bool(best_residual <= CERTIFY_THRESHOLD), best_method)
