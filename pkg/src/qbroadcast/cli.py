"""Command-line front end.

Frontier output is CSV with columns ``common_rate,personal_rate,witness_id``,
12 significant digits, newline endings; reruns with the same arguments are
byte-identical.  Witnesses go to a JSON sidecar next to the CSV and can be
re-checked with ``verify``.  Exit codes: 0 ok, 2 validation (stderr prefix
ERR_VALIDATE), 3 budget (stderr prefix ERR_BUDGET).
"""

from __future__ import annotations

import argparse
import json
import pathlib
import sys

import numpy as np

from .bruteforce import (
    cardinality_probe,
    classical_degraded_region,
    grid_cq_frontier,
    mesh_tolerance,
)
from .channels import BroadcastChannel, CqBroadcastChannel, degradedness_residual, make_bsc_cascade
from .errors import BudgetError, ValidationError
from .optimize import OptimizerConfig
from .quantities import (
    coherent_information,
    conditional_entropy,
    conditional_mutual_information,
    mutual_information,
)
from .regions import (
    build_evaluator,
    cq_broadcast_frontier,
    cq_entanglement_frontier,
    dephasing_cq_frontier,
    evaluate_witness,
    pinching_boundary,
    qq_frontier,
)
from .specio import BUILTIN_CHANNELS, parse_channel_spec, parse_state_spec, serialize_channel
from .states import von_neumann_entropy

WITNESS_FORMAT = "qbroadcast-witness-v1"


def _fmt(x: float) -> str:
    return "%.12g" % (float(x) + 0.0)


def _load_channel(arg: str):
    if arg in BUILTIN_CHANNELS:
        return BUILTIN_CHANNELS[arg]()
    path = pathlib.Path(arg)
    if path.is_file():
        return parse_channel_spec(path.read_text(encoding="utf-8"))
    known = ", ".join(sorted(BUILTIN_CHANNELS))
    raise ValidationError(f"channel: {arg!r} is neither a builtin ({known}) nor an existing file")


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _frontier_csv(points, prefix: str) -> tuple[str, list]:
    lines = ["common_rate,personal_rate,witness_id"]
    entries = []
    for i, pt in enumerate(points):
        wid = f"{prefix}-{i:03d}"
        lines.append(f"{_fmt(pt.common_rate)},{_fmt(pt.personal_rate)},{wid}")
        entry = {"witness_id": wid, "common_rate": float(pt.common_rate),
                 "personal_rate": float(pt.personal_rate)}
        entry.update(pt.witness)
        entries.append(entry)
    return "\n".join(lines) + "\n", entries


def _write_sidecar(out: str | None, mode: str, k: int, channel_doc, metadata: dict, entries: list):
    if out is None:
        return
    doc = {
        "format": WITNESS_FORMAT,
        "mode": mode,
        "k": int(k),
        "channel": channel_doc,
        "metadata": metadata,
        "points": entries,
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    with open(out + ".witness.json", "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _cmd_region(args) -> int:
    ch = _load_channel(args.channel)
    cfg = OptimizerConfig(restarts=args.restarts, seed=args.seed, r_grid=args.grid)
    kwargs = {"k": args.k, "cfg": cfg, "t_size": args.t_size}
    if args.mode == "cq":
        frontier = cq_broadcast_frontier(ch, **kwargs)
    elif args.mode == "cq-eg":
        frontier = cq_entanglement_frontier(ch, **kwargs)
    elif args.mode == "dephasing":
        frontier = dephasing_cq_frontier(ch, **kwargs)
    else:
        frontier = qq_frontier(ch, **kwargs)
    csv, entries = _frontier_csv(frontier.points, "pt")
    _emit(csv, args.out)
    _write_sidecar(args.out, frontier.metadata["mode"], args.k, serialize_channel(ch),
                   frontier.metadata, entries)
    return 0


def _cmd_quantities(args) -> int:
    rho = parse_state_spec(pathlib.Path(args.state).read_text(encoding="utf-8"))
    labels = list(rho.layout.labels)
    subsets = []
    for size in range(1, len(labels) + 1):
        subsets.extend(_ordered_subsets(labels, size))
    out = {
        "layout": [[label, dim] for label, dim in rho.layout.parts],
        "entropy": {",".join(s): von_neumann_entropy(_reduce(rho, s)) for s in subsets},
        "conditional_entropy": {},
        "mutual_information": {},
        "coherent_information": {},
        "conditional_mutual_information": {},
    }
    for a in labels:
        for b in labels:
            if a == b:
                continue
            out["conditional_entropy"][f"{a}|{b}"] = conditional_entropy(rho, a, b)
            out["coherent_information"][f"{a}>{b}"] = coherent_information(rho, a, b)
    for i, a in enumerate(labels):
        for b in labels[i + 1:]:
            out["mutual_information"][f"{a};{b}"] = mutual_information(rho, a, b)
            for c in labels:
                if c in (a, b):
                    continue
                key = f"{a};{b}|{c}"
                out["conditional_mutual_information"][key] = conditional_mutual_information(rho, a, b, c)
    _emit(json.dumps(out, indent=2, sort_keys=True) + "\n", args.out)
    return 0


def _ordered_subsets(labels, size):
    if size == 0:
        return [[]]
    out = []
    for i, label in enumerate(labels):
        for rest in _ordered_subsets(labels[i + 1:], size - 1):
            out.append([label] + rest)
    return out


def _reduce(rho, labels):
    if set(labels) == set(rho.layout.labels):
        return rho
    from .states import partial_trace

    return partial_trace(rho, set(labels))


def _cmd_check_degraded(args) -> int:
    ch = _load_channel(args.channel)
    if args.reverse:
        if isinstance(ch, BroadcastChannel):
            m_b, m_c = ch.marginals()
            report = degradedness_residual((m_c, m_b))
        else:
            swapped = {x: rho.reorder((ch.c_label, ch.b_label)) for x, rho in ch.conditionals.items()}
            report = degradedness_residual(CqBroadcastChannel(swapped, validate=False))
    else:
        report = degradedness_residual(ch)
    sys.stdout.write(f"residual: {_fmt(report.residual)}\n")
    sys.stdout.write(f"certified: {'true' if report.certified else 'false'}\n")
    sys.stdout.write(f"method: {report.method}\n")
    return 0


def _require_cq(ch, what: str) -> CqBroadcastChannel:
    if not isinstance(ch, CqBroadcastChannel):
        raise ValidationError(f"{what} expects a cq channel (builtin pinching-cq, noiseless-bit, "
                              f"constant, or a kind=cq document)")
    return ch


def _cmd_oracle_grid(args) -> int:
    ch = _require_cq(_load_channel(args.channel), "oracle grid")
    frontier = grid_cq_frontier(ch, args.t_size, args.mesh, r_grid=args.r_grid)
    csv, entries = _frontier_csv(frontier.points, "or")
    _emit(csv, args.out)
    _write_sidecar(args.out, "oracle-grid", 1, serialize_channel(ch), frontier.metadata, entries)
    return 0


def _cmd_oracle_cardinality(args) -> int:
    ch = _require_cq(_load_channel(args.channel), "oracle cardinality")
    report = cardinality_probe(ch, args.bound, args.extra, args.mesh)
    sys.stdout.write(f"bound: {report.bound}\n")
    sys.stdout.write(f"extra: {report.extra}\n")
    sys.stdout.write(f"mesh: {report.mesh}\n")
    sys.stdout.write(f"improvement: {_fmt(report.improvement)}\n")
    sys.stdout.write(f"at_common: {_fmt(report.at_common)}\n")
    sys.stdout.write(f"reach_gain: {_fmt(report.reach_gain)}\n")
    sys.stdout.write(f"mesh_tolerance: {_fmt(mesh_tolerance(report.mesh))}\n")
    return 0


def _cmd_oracle_classical(args) -> int:
    try:
        f1, f2 = (float(part) for part in args.cascade.split(","))
    except ValueError:
        raise ValidationError(f"cascade: expected two comma-separated flip probabilities, got {args.cascade!r}")
    frontier = classical_degraded_region(
        np.array([[1 - f1, f1], [f1, 1 - f1]]),
        np.array([[1 - f2, f2], [f2, 1 - f2]]),
        args.mesh,
        t_size=args.t_size,
    )
    csv, entries = _frontier_csv(frontier.points, "cl")
    _emit(csv, args.out)
    _write_sidecar(args.out, "oracle-classical", 1, serialize_channel(make_bsc_cascade(f1, f2)),
                   frontier.metadata, entries)
    return 0


def _cmd_pinching_boundary(args) -> int:
    if args.points < 2:
        raise ValidationError("points: need at least 2 boundary samples")
    pts = [pinching_boundary(p) for p in np.linspace(0.0, 1.0, args.points)]
    csv, entries = _frontier_csv(pts, "cf")
    _emit(csv, args.out)
    _write_sidecar(args.out, "pinching-boundary", 1, None, {"points": args.points}, entries)
    return 0


def _recompute_entry(mode: str, channel, k: int, entry: dict) -> tuple[float, float]:
    if "params" in entry:
        raw_c, raw_p = evaluate_witness(mode, channel, entry["params"], k=k)
        r_target = float(entry.get("r_target", raw_c))
        return max(0.0, min(r_target, raw_c)), max(0.0, raw_p)
    if "joint" in entry:
        if channel is None:
            raise ValidationError(f"{entry.get('witness_id', '?')}: grid witness without a channel document")
        joint = np.asarray(entry["joint"], dtype=float)
        p_t = joint.sum(axis=1)
        safe = np.where(p_t > 0, p_t, 1.0)
        cond = joint / safe[:, None]
        cond[p_t == 0] = 1.0 / joint.shape[1]
        ev = build_evaluator("cq", channel, k=1, t_size=joint.shape[0])
        c, p = ev.rates_from_dists(p_t[None], cond[None])
        return max(0.0, float(c[0])), max(0.0, float(p[0]))
    if entry.get("kind") == "closed-form":
        pt = pinching_boundary(float(entry["p"]))
        return pt.common_rate, pt.personal_rate
    raise ValidationError(f"{entry.get('witness_id', '?')}: no re-evaluatable parameters")


def _cmd_verify(args) -> int:
    try:
        doc = json.loads(pathlib.Path(args.witness).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"witness: invalid JSON ({exc.msg} at line {exc.lineno})")
    if not isinstance(doc, dict) or doc.get("format") != WITNESS_FORMAT:
        raise ValidationError(f"witness: expected a {WITNESS_FORMAT} document")
    mode = doc.get("mode", "")
    k = int(doc.get("k", 1))
    channel = parse_channel_spec(doc["channel"]) if doc.get("channel") else None
    failures = 0
    for entry in doc.get("points", []):
        wid = entry.get("witness_id", "?")
        common, personal = _recompute_entry(mode, channel, k, entry)
        dc = abs(common - float(entry["common_rate"]))
        dp = abs(personal - float(entry["personal_rate"]))
        if max(dc, dp) <= args.tol:
            sys.stdout.write(f"{wid} ok common={_fmt(common)} personal={_fmt(personal)}\n")
        else:
            failures += 1
            sys.stdout.write(
                f"{wid} mismatch stored=({_fmt(entry['common_rate'])},{_fmt(entry['personal_rate'])}) "
                f"recomputed=({_fmt(common)},{_fmt(personal)})\n"
            )
    if failures:
        raise ValidationError(f"{failures} witness rows failed re-evaluation beyond {args.tol}")
    sys.stdout.write(f"verified {len(doc.get('points', []))} rows\n")
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qbroadcast", description="Capacity-region frontiers for broadcast channels")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    region = sub.add_parser("region", help="optimize a rate-region frontier")
    region.add_argument("mode", choices=["cq", "cq-eg", "dephasing", "qq"])
    region.add_argument("--channel", required=True, help="builtin name or spec file")
    region.add_argument("--k", type=int, default=1, help="parallel channel uses")
    region.add_argument("--grid", type=int, default=33, help="common-rate grid points")
    region.add_argument("--restarts", type=int, default=16)
    region.add_argument("--seed", type=int, default=7)
    region.add_argument("--t-size", type=int, default=None, dest="t_size")
    region.add_argument("--out", default=None, help="CSV path (stdout when omitted)")
    region.set_defaults(func=_cmd_region)

    quantities = sub.add_parser("quantities", help="entropic functionals of a state document")
    quantities.add_argument("--state", required=True)
    quantities.add_argument("--out", default=None)
    quantities.set_defaults(func=_cmd_quantities)

    check = sub.add_parser("check", help="structural checks")
    check_sub = check.add_subparsers(dest="check_command", required=True, parser_class=_Parser)
    degraded = check_sub.add_parser("degraded", help="search for a degrading map between receivers")
    degraded.add_argument("--channel", required=True)
    degraded.add_argument("--reverse", action="store_true", help="check the C-to-B direction")
    degraded.set_defaults(func=_cmd_check_degraded)

    oracle = sub.add_parser("oracle", help="exhaustive grid references")
    oracle_sub = oracle.add_subparsers(dest="oracle_command", required=True, parser_class=_Parser)

    grid = oracle_sub.add_parser("grid", help="grid frontier for a cq channel")
    grid.add_argument("--channel", required=True)
    grid.add_argument("--t-size", type=int, required=True, dest="t_size")
    grid.add_argument("--mesh", type=int, required=True)
    grid.add_argument("--r-grid", type=int, default=None, dest="r_grid")
    grid.add_argument("--out", default=None)
    grid.set_defaults(func=_cmd_oracle_grid)

    card = oracle_sub.add_parser("cardinality", help="label-alphabet saturation probe")
    card.add_argument("--channel", required=True)
    card.add_argument("--bound", type=int, required=True)
    card.add_argument("--extra", type=int, required=True)
    card.add_argument("--mesh", type=int, required=True)
    card.set_defaults(func=_cmd_oracle_cardinality)

    classical = oracle_sub.add_parser("classical", help="Shannon frontier for a symmetric cascade")
    classical.add_argument("--cascade", required=True, metavar="FLIP1,FLIP2")
    classical.add_argument("--mesh", type=int, required=True)
    classical.add_argument("--t-size", type=int, default=None, dest="t_size")
    classical.add_argument("--out", default=None)
    classical.set_defaults(func=_cmd_oracle_classical)

    boundary = sub.add_parser("pinching-boundary", help="closed-form pinching boundary samples")
    boundary.add_argument("--points", type=int, default=33)
    boundary.add_argument("--out", default=None)
    boundary.set_defaults(func=_cmd_pinching_boundary)

    verify = sub.add_parser("verify", help="re-evaluate a witness sidecar")
    verify.add_argument("--witness", required=True)
    verify.add_argument("--tol", type=float, default=1e-6)
    verify.set_defaults(func=_cmd_verify)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"ERR_VALIDATE: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"ERR_BUDGET: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
