"""Command-line front end.

Each subcommand runs one experiment, writes a JSON or CSV record (to
``--out`` or standard output) and prints a short verdict summary.  Output
files carry the resolved configuration and toolkit version and contain no
timestamps, so identical invocations produce identical bytes.

Exit codes: 0 success, 1 internal consistency failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys

import numpy as np

from . import __version__
from . import channels as ch
from . import contmodel as cm
from . import protocol as pr
from .errors import ConsistencyError, SepdistError
from .qstate import Bipartition

FLOAT_FMT = ".17g"


class UsageError(Exception):
    pass


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` (inclusive, evenly spaced), ``x,y,z``, or a single number."""
    text = text.strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise ValueError
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise ValueError
            return [float(x) for x in np.linspace(start, stop, count)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad grid {text!r}; use start:stop:count, a comma list or a number") from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v >= 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a number >= 0, got {text}")
    return v


def _t_max(text):
    if text.strip().lower() == "auto":
        return "auto"
    return _positive_float(text)


def _resolve_t_max(t_max, epsilon) -> float:
    return 2 * math.pi / epsilon ** 2 if t_max == "auto" else float(t_max)


# -- output -------------------------------------------------------------------------


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return str(v)


def render(record: dict, fmt: str) -> str:
    """Serialize ``{"command", "config", "results", "columns", "table"}``."""
    if fmt == "json":
        payload = {"toolkit": "sepdist", "version": __version__}
        payload.update(record)
        return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write(f"# sepdist {__version__} {record['command']}\n")
    buf.write(f"# config: {json.dumps(_jsonable(record['config']), sort_keys=True)}\n")
    for key, val in record.get("results", {}).items():
        if not isinstance(val, (dict, list)):
            buf.write(f"# {key}: {_fmt(val)}\n")
    columns = record.get("columns")
    if columns:
        buf.write(",".join(columns) + "\n")
        for row in record["table"]:
            buf.write(",".join(_fmt(row[c]) for c in columns) + "\n")
    else:
        buf.write("quantity,value\n")
        for key, val in _flatten(record.get("results", {})):
            buf.write(f"{key},{_fmt(val)}\n")
    return buf.getvalue()


def _flatten(d, prefix=""):
    for k, v in d.items():
        name = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, name + ".")
        elif isinstance(v, (list, tuple)):
            for i, item in enumerate(v):
                yield f"{name}[{i}]", item
        else:
            yield name, v


# -- commands -------------------------------------------------------------------------


def cmd_discrete(args):
    trace = pr.run_protocol()
    c_cut = str(Bipartition.parse("c|ab"))
    branches = {str(b.outcome): b.probability for b in trace.branches}
    results = {
        "step_negativities": trace.negativities,
        "prob_outcome_0": branches["0"],
        "prob_outcome_1": branches["1"],
        "final_negativity": trace.final_negativity,
        "expected_final_negativity": (math.sqrt(2) - 1) / 6,
        "max_ancilla_negativity": max(n[c_cut] for n in trace.negativities.values()),
    }
    summary = [
        f"ancilla cut c|(ab) negativity, max over steps: {results['max_ancilla_negativity']:.3e}",
        f"measurement outcome 0 probability: {results['prob_outcome_0']:.12f}",
        f"extracted ab negativity: {results['final_negativity']:.12f} (NPT -> distillable)",
    ]
    return {"results": results}, summary


def cmd_continuous(args):
    eps = args.epsilon
    t_max = _resolve_t_max(args.t_max, eps)
    tr = cm.run_trace(eps, args.alpha, t_max, args.steps, args.mode, args.n_trotter)
    table = [dict(zip(("time", "neg_c_ab", "neg_a_bc", "neg_b_ac", "neg_ab"), r)) for r in tr.rows()]
    results = {
        "mode": tr.mode,
        "t_max_resolved": t_max,
        "max_neg_c_ab": float(tr.neg_c_ab.max()),
        "max_neg_ab": float(tr.neg_ab_reduced.max()),
        "min_pt_eig_c_ab": float(tr.min_pt_eig_c_ab.min()),
    }
    sep = results["max_neg_c_ab"] <= cm.ANCILLA_SEPARABLE_TOL
    summary = [
        f"epsilon={eps} alpha={args.alpha} t_max={t_max:.6g} steps={args.steps} mode={tr.mode}",
        f"ancilla c|(ab): max negativity {results['max_neg_c_ab']:.3e} "
        f"({'PPT at every sampled time' if sep else 'NPT at some time'})",
        f"reduced ab: max negativity {results['max_neg_ab']:.6g}",
    ]
    return {"results": results, "columns": list(table[0]), "table": table}, summary


def cmd_sweep(args):
    eps_grid = parse_grid(args.epsilon)
    alpha_grid = parse_grid(args.alpha)
    tab = cm.sweep(eps_grid, alpha_grid, args.t_max_factor, args.steps, simulate=not args.analytic_only)
    table = [vars(r) for r in tab.rows]
    results = {
        "feasible_epsilons": tab.feasible_epsilons() if not args.analytic_only else [],
        "analytic_feasible_epsilons": tab.feasible_epsilons(analytic=True),
        "analytic_threshold": tab.analytic_threshold(),
        "analytic_monotone": tab.analytic_is_monotone(),
    }
    summary = [f"grid {len(eps_grid)} epsilon x {len(alpha_grid)} alpha, steps={args.steps}"]
    for e in tab.epsilons():
        feas = tab.feasible_alphas(e, analytic=args.analytic_only)
        span = f"alpha in [{min(feas):.4g}, {max(feas):.4g}]" if feas else "none"
        kind = "analytic" if args.analytic_only else "simulated"
        summary.append(f"  epsilon={e:.4g}: {kind} feasible {span}")
    thr = results["analytic_threshold"]
    summary.append("analytic chain threshold (this implementation): "
                   + (f"epsilon <= {thr:.4g}" if thr is not None else "no feasible epsilon on grid"))
    return {"results": results, "columns": list(table[0]), "table": table}, summary


def cmd_trotter(args):
    eps = args.epsilon
    t = _resolve_t_max(args.t_max, eps)
    ns = [int(x) for x in parse_grid(args.n_trotter)]
    if any(n < 1 for n in ns):
        raise UsageError("--n-trotter values must be positive")
    exact = cm.propagator(eps, t, "exact")
    table = []
    for n in ns:
        dist = float(np.linalg.norm(cm.trotter_unitary(eps, t, n) - exact, 2))
        table.append({"n": n, "unitary_distance": dist})
    for prev, row in zip(table, table[1:]):
        row["ratio_to_previous"] = prev["unitary_distance"] / row["unitary_distance"]
    table[0]["ratio_to_previous"] = None
    results = {}
    summary = [f"epsilon={eps} t={t:.6g}"] + [
        f"  n={r['n']}: ||U_trotter - U|| = {r['unitary_distance']:.6e}" for r in table
    ]
    if args.alpha is not None:
        t_bounce = 2 * math.pi / eps ** 2
        b = cm.bounce_simulation(eps, args.alpha, t_bounce, max(ns))
        results.update({
            "bounce_alpha": args.alpha,
            "bounce_t": t_bounce,
            "bounce_n": max(ns),
            "bounce_max_neg_c_ab": float(b.neg_c_ab.max()),
            "bounce_max_neg_ab": float(b.neg_ab_reduced.max()),
        })
        summary.append(f"bounce n={max(ns)} alpha={args.alpha}: max ancilla negativity "
                       f"{results['bounce_max_neg_c_ab']:.3e}, max ab negativity {results['bounce_max_neg_ab']:.6g}")
    return {"results": results, "columns": ["n", "unitary_distance", "ratio_to_previous"], "table": table}, summary


def cmd_channels(args):
    e1, e2, comp, lit = ch.e1_map(), ch.e2_map(), ch.composed_map(), ch.literal_composite_map()
    audits = {}
    plan = [("E1", e1, "b|ac"), ("E1", e1, "c|ab"), ("E2", e2, "a|bc"), ("E2", e2, "c|ab"),
            ("E2oE1", comp, "c|ab"), ("E2oE1", comp, "a|bc"), ("E2oE1", comp, "b|ac")]
    for name, m, cut in plan:
        rep = ch.audit_nonentangling(m, Bipartition.parse(cut), args.samples, args.seed)
        audits[f"{name} {rep.partition}"] = {"verdict": rep.verdict, "max_output_negativity": rep.max_output_negativity}
    demo = ch.demo_entangle_plus()
    results = {
        "tp_errors": {"E1": e1.tp_error(), "E2": e2.tp_error(), "E2oE1": comp.tp_error(), "literal": lit.tp_error()},
        "choi_distance_composed_vs_literal": ch.choi_distance(comp, lit),
        "audits": audits,
        "plus_demo": {"probabilities": list(demo.probabilities), "negativity_plus": demo.negativity,
                      "negativity_minus": demo.minus_negativity},
    }
    summary = [f"Choi distance E2oE1 vs literal list: {results['choi_distance_composed_vs_literal']:.3e}"]
    summary += [f"  audit {k}: {v['verdict']} (max negativity {v['max_output_negativity']:.3e})" for k, v in audits.items()]
    summary.append(f"|+++> demo: p(+)={demo.probabilities[0]:.12f}, negativity(+)={demo.negativity:.12f}")
    return {"results": results}, summary


def cmd_nogo(args):
    rng = np.random.default_rng(args.seed)
    worst = 0.0
    for _ in range(args.samples):
        h_ac = _rand_herm(6, rng)
        h_bc = _rand_herm(6, rng)
        a, b, c = _rand_ket(2, rng), _rand_ket(2, rng), _rand_ket(3, rng)
        a_perp = np.array([-np.conj(a[1]), np.conj(a[0])])
        b_perp = np.array([-np.conj(b[1]), np.conj(b[0])])
        worst = max(worst, abs(cm.pure_firstorder_amplitude(h_ac, h_bc, a, b, c, a_perp, b_perp)))
    results = {"samples": args.samples, "max_abs_amplitude": worst}
    return {"results": results}, [f"max |<a_perp b_perp c'|H|a b c>| over {args.samples} draws: {worst:.3e}"]


def _rand_herm(d, rng):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (m + m.conj().T)


def _rand_ket(d, rng):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


COMMANDS = {
    "discrete": cmd_discrete,
    "continuous": cmd_continuous,
    "sweep": cmd_sweep,
    "trotter": cmd_trotter,
    "channels": cmd_channels,
    "nogo": cmd_nogo,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sepdist", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sepdist {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", dest="out_path", default=None, help="write the record here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("discrete", parents=[common], help="three-qubit send-the-ancilla protocol")

    p = sub.add_parser("continuous", parents=[common], help="negativity traces of the continuous model")
    p.add_argument("--epsilon", type=_positive_float, required=True)
    p.add_argument("--alpha", type=_nonneg_float, required=True)
    p.add_argument("--t-max", type=_t_max, default="auto", help="end time, or 'auto' for 2*pi/epsilon^2")
    p.add_argument("--steps", type=_positive_int, default=500)
    p.add_argument("--mode", choices=("exact", "effective", "trotter"), default="exact")
    p.add_argument("--n-trotter", type=_positive_int, default=None)

    p = sub.add_parser("sweep", parents=[common], help="(epsilon, alpha) feasibility table")
    p.add_argument("--epsilon", required=True, help="grid, e.g. 0.02:0.2:10")
    p.add_argument("--alpha", required=True, help="grid, e.g. 0:20:40")
    p.add_argument("--t-max-factor", type=_positive_float, default=2 * math.pi)
    p.add_argument("--steps", type=_positive_int, default=500)
    p.add_argument("--analytic-only", action="store_true", help="skip the exact simulation")

    p = sub.add_parser("trotter", parents=[common], help="Trotter convergence and ancilla bouncing")
    p.add_argument("--epsilon", type=_positive_float, required=True)
    p.add_argument("--t-max", type=_t_max, default=10.0)
    p.add_argument("--n-trotter", default="64,128,256", help="step counts, e.g. 64,128,256")
    p.add_argument("--alpha", type=_nonneg_float, default=None, help="also run the bounce simulation")

    p = sub.add_parser("channels", parents=[common], help="map composition, audits and the |+++> demo")
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("nogo", parents=[common], help="pure-state first-order amplitude check")
    p.add_argument("--samples", type=_positive_int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command in ("continuous", "trotter") and args.epsilon >= 1:
            raise UsageError("--epsilon must be < 1")
        if hasattr(args, "t_max"):
            args.t_max_requested = args.t_max
            args.t_max = _resolve_t_max(args.t_max, args.epsilon)
        config = {k: v for k, v in sorted(vars(args).items()) if k not in ("out_path",)}
        if getattr(args, "mode", None) == "trotter" and args.n_trotter is None:
            raise UsageError("--mode trotter needs --n-trotter")
        record, summary = COMMANDS[args.command](args)
    except (UsageError, SepdistError) as exc:
        print(f"sepdist {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"sepdist {args.command}: internal consistency failure: {exc}", file=sys.stderr)
        return 1
    record = {"command": args.command, "config": config, **record}
    text = render(record, args.format)
    if args.out_path:
        with open(args.out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        stream = sys.stdout
    else:
        sys.stdout.write(text)
        stream = sys.stderr
    for line in summary:
        print(line, file=stream)
    return 0


if __name__ == "__main__":
    sys.exit(main())
