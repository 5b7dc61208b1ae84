"""Command-line front end: build, solve, oracle, quantum, verify.

Every subcommand writes JSON reports (echoing the resolved config), CSV
traces and Newick trees into ``--out``. Exit codes: 0 success, 2 input
error, 3 infeasible result, 4 size bound, 5 qubit bound.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__, classical
from .errors import InputError, PhyloPuboError, SizeBoundError, TooManyQubitsError, UnsupportedModelError
from .models import KINDS, compile_from_meta, compile_model, decode
from .phylo import count_topologies, exact_mp, max_enum
from .pubo import read_pubo, stats, write_pubo
from .quantum import best_of, exact_ground, qaoa_run, sample_state, to_hamiltonian, vqe_run
from .quantum.statevector import bitstring
from .quantum.variational import QAOA_OPTIONS, VQE_OPTIONS
from .seqio import default_step_matrix, load_step_matrix, read_fasta, window_fragments
from .tree import to_newick
from .verify import anneal, exact_ground_state, run_checks, structural_vars

log = logging.getLogger("phylopubo")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_SIZE, EXIT_QUBITS = 0, 2, 3, 4, 5


class InputNotFound(InputError):
    pass


def _existing(path: str | None) -> Path | None:
    if path is None:
        return None
    p = Path(path)
    if not p.is_file():
        raise InputNotFound(f"input not found: {path}")
    return p


def _step_matrix(path):
    p = _existing(path)
    return default_step_matrix() if p is None else load_step_matrix(p)


def _layout_path(pubo_path: Path) -> Path:
    return pubo_path.with_suffix(".layout.json")


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "verbose")}


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_compiled(pubo_path: Path, layout_arg: str | None):
    model = read_pubo(pubo_path)
    meta_path = _existing(layout_arg) if layout_arg else _layout_path(pubo_path)
    if not meta_path.is_file():
        raise InputNotFound(f"input not found: {meta_path} (layout sidecar)")
    cm = compile_from_meta(json.loads(meta_path.read_text()))
    if cm.num_vars != model.num_vars:
        raise InputError(f"pubo has {model.num_vars} variables but layout describes {cm.num_vars}")
    return model, cm


def _decoded_dict(dec) -> dict:
    return {
        "feasible": dec.feasible,
        "raw_parsimony": dec.raw_parsimony,
        "violations": [{"constraint": v.constraint, "residual": v.residual} for v in dec.violations],
        "newick": to_newick(dec.tree, annotate=True) if dec.feasible else None,
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_build(args) -> int:
    a = read_fasta(_existing(args.fasta))
    s = _step_matrix(args.step_matrix)
    out = _out_dir(args)
    if args.window:
        parts = window_fragments(a, args.window, args.stride or args.window)
    else:
        parts = [a]
    builds = []
    for k, frag in enumerate(parts):
        cm = compile_model(args.model, frag, s, args.penalty)
        dest = out if len(parts) == 1 and not args.window else out / f"fragment_{k:03d}"
        dest.mkdir(parents=True, exist_ok=True)
        pubo_path = dest / "model.pubo"
        write_pubo(cm.model, pubo_path)
        _write_json(_layout_path(pubo_path), cm.meta())
        st = stats(cm.model)
        builds.append({
            "pubo": str(pubo_path),
            "kind": cm.kind,
            "n": cm.layout.n,
            "m": cm.layout.m,
            "penalty": cm.penalty,
            "variables": cm.num_vars,
            "groups": cm.layout.groups(),
            "degree": st.max_degree,
            "terms": st.num_terms,
            "terms_by_degree": {str(d): c for d, c in sorted(st.terms_by_degree.items())},
        })
    report = {"config": _config(args), "models": builds}
    _write_json(out / "build_report.json", report)
    for b in builds:
        print(f"{b['pubo']}: {b['kind']} n={b['n']} m={b['m']} variables={b['variables']} "
              f"degree={b['degree']} terms={b['terms']}")
    return EXIT_OK


def _schedule(args, cm):
    sched = classical.default_schedule(cm.num_vars, cm.penalty)
    return classical.AnnealSchedule(
        sweeps=args.sweeps or sched.sweeps,
        t_start=args.t_start if args.t_start is not None else sched.t_start,
        t_end=args.t_end if args.t_end is not None else sched.t_end,
        restarts=args.restarts or sched.restarts,
    )


def cmd_solve(args) -> int:
    model, cm = _load_compiled(_existing(args.pubo), args.layout)
    if model != cm.model:
        raise InputError("pubo file does not match the model described by its layout sidecar")
    method = args.method
    if method == "auto":
        result = exact_ground_state(cm) or anneal(cm, args.seed, _schedule(args, cm), not args.no_group_moves)
    elif method == "exhaustive":
        result = classical.solve_exhaustive(model)
    elif method == "conditioned":
        result = classical.solve_conditioned(model, structural_vars(cm))
    elif method == "anneal":
        result = anneal(cm, args.seed, _schedule(args, cm), not args.no_group_moves)
    else:
        start = np.random.default_rng(args.seed).integers(0, 2, size=model.num_vars)
        result = classical.descend(model, start, args.seed)
    method = result.method
    dec = decode(result.best_assignment, cm)
    out = _out_dir(args)
    report = {"config": _config(args), "resolved_method": method, "penalty": cm.penalty,
              **result.to_dict(), **_decoded_dict(dec)}
    _write_json(out / "solution.json", report)
    classical.write_trace_csv(out / "trace.csv", result.trace)
    if dec.feasible:
        (out / "tree.nwk").write_text(report["newick"] + "\n")
        print(f"energy {result.best_energy} ({method}), feasible, tree {report['newick']}")
        return EXIT_OK
    print(f"energy {result.best_energy} ({method}), INFEASIBLE: "
          + ", ".join(f"{v.constraint}={v.residual}" for v in dec.violations[:10]), file=sys.stderr)
    return EXIT_INFEASIBLE


def cmd_oracle(args) -> int:
    a = read_fasta(_existing(args.fasta))
    s = _step_matrix(args.step_matrix)
    bound = max_enum()
    best, trees = exact_mp(a, s, bound)
    newicks = sorted(to_newick(t.tree, annotate=True) for t in trees)
    report = {"config": _config(args), "n": a.n, "m": a.m, "score": best,
              "topologies_total": count_topologies(a.n), "co_optimal": len(trees), "trees": newicks}
    out = _out_dir(args)
    _write_json(out / "oracle.json", report)
    (out / "oracle.nwk").write_text("".join(t + "\n" for t in newicks))
    print(f"score {best}, {len(trees)} co-optimal of {report['topologies_total']} topologies")
    return EXIT_OK


def cmd_quantum(args) -> int:
    pubo_path = _existing(args.pubo)
    model = read_pubo(pubo_path)
    h = to_hamiltonian(model, bound=args.max_qubits)
    cm = None
    meta_path = Path(args.layout) if args.layout else _layout_path(pubo_path)
    if meta_path.is_file():
        cm = compile_from_meta(json.loads(meta_path.read_text()))
    base = QAOA_OPTIONS if args.algo == "qaoa" else VQE_OPTIONS
    opt = replace(base, max_evals=args.max_evals) if args.max_evals else base
    runner = qaoa_run if args.algo == "qaoa" else vqe_run
    runs = [runner(h, args.layers, opt, seed=args.seed + k) for k in range(args.seeds)]
    run = best_of(runs)
    e0, ground = exact_ground(h)
    q = h.num_qubits
    report = {"config": _config(args), "E0": e0, "ground_degeneracy": len(ground),
              "diag_mean": float(h.diag.mean()), **run.to_dict(),
              "seed_energies": [r.final_energy for r in runs],
              "most_probable_bitstring": bitstring(run.most_probable, q)}
    if cm is not None:
        bits = np.array([(run.most_probable >> i) & 1 for i in range(q)])
        report["decoded"] = _decoded_dict(decode(bits, cm))
    out = _out_dir(args)
    if args.shots:
        counts = sample_state(run.state, args.shots, args.seed)
        hist = {bitstring(i, q): c for i, c in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))}
        _write_json(out / "histogram.json", hist)
    _write_json(out / "quantum.json", report)
    classical.write_trace_csv(out / "quantum_trace.csv", run.trace, header=("iteration", "expectation"))
    print(f"{args.algo} p={args.layers}: final {run.final_energy:.6g}, E0 {e0:.6g}, "
          f"gap {run.gap:.3g}, top {report['most_probable_bitstring']} (p={run.probability:.3f})")
    return EXIT_OK


def cmd_verify(args) -> int:
    a = read_fasta(_existing(args.fasta))
    s = _step_matrix(args.step_matrix)
    pubo = read_pubo(_existing(args.pubo)) if args.pubo else None
    checks = run_checks(a, s, args.model, args.penalty, pubo, args.seed, args.samples)
    width = max(len(c.name) for c in checks)
    for c in checks:
        print(f"{c.name:<{width}}  {'PASS' if c.passed else 'FAIL'}  {c.detail}")
    report = {"config": _config(args),
              "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
              "all_passed": all(c.passed for c in checks)}
    _write_json(_out_dir(args) / "verify.json", report)
    return EXIT_OK if report["all_passed"] else 1


# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _nonnegative(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phylopubo", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fasta=True):
        if fasta:
            p.add_argument("fasta", help="aligned FASTA file")
            p.add_argument("--step-matrix", help="YAML/JSON step matrix (default: transitions 1, transversions 2, gaps 4)")
        p.add_argument("--out", default="out", help="output directory")

    p = sub.add_parser("build", help="compile an alignment to a PUBO file")
    common(p)
    p.add_argument("--model", choices=KINDS, default="branch")
    p.add_argument("--penalty", type=_positive)
    p.add_argument("--window", type=_positive, help="fragment length")
    p.add_argument("--stride", type=_positive, help="fragment stride (default: window)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="minimise a PUBO file classically and decode the tree")
    common(p, fasta=False)
    p.add_argument("pubo")
    p.add_argument("--layout", help="layout sidecar (default: <pubo>.layout.json)")
    p.add_argument("--method", choices=("auto", "exhaustive", "conditioned", "anneal", "descend"),
                   default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sweeps", type=_positive)
    p.add_argument("--restarts", type=_positive)
    p.add_argument("--t-start", type=float)
    p.add_argument("--t-end", type=float)
    p.add_argument("--no-group-moves", action="store_true",
                   help="anneal with single flips only (no exactly-one swap moves)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("oracle", help="exact maximum parsimony by topology enumeration")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("quantum", help="QAOA or VQE statevector run on a PUBO file")
    common(p, fasta=False)
    p.add_argument("pubo")
    p.add_argument("--layout", help="layout sidecar used to decode the top bitstring")
    p.add_argument("--algo", choices=("qaoa", "vqe"), default="vqe")
    p.add_argument("--layers", type=_nonnegative, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", type=_positive, default=1, help="independent restarts, best kept")
    p.add_argument("--shots", type=_nonnegative, default=0)
    p.add_argument("--max-evals", type=_positive)
    p.add_argument("--max-qubits", type=_positive, default=20)
    p.set_defaults(func=cmd_quantum)

    p = sub.add_parser("verify", help="cross-check oracle, model ground states and quantum E0")
    common(p)
    p.add_argument("--model", choices=KINDS, default="branch")
    p.add_argument("--penalty", type=_positive)
    p.add_argument("--pubo", help="also check this PUBO file against the compiled model")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=_positive, default=200)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "algo", None) == "vqe" and args.layers < 1:
        parser.error("vqe needs --layers >= 1")
    if getattr(args, "stride", None) and not args.window:
        parser.error("--stride requires --window")
    try:
        return args.func(args)
    except TooManyQubitsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_QUBITS
    except SizeBoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except (InputError, UnsupportedModelError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except PhyloPuboError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
