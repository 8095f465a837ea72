"""Command line interface: ``dsproj {solve,gen,bench,compare,verify}``.

Exit codes: 0 success, 1 usage, 2 I/O or parse error, 3 non-convergence,
4 verification failure.  ``DSPROJ_SEED`` supplies the seed when ``--seed``
is omitted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import baselines
from .errors import DSProjError, InstanceTooLarge, MaxIterExceeded, NonSquare, ParseError
from .generators import derive_seed, gen_blocky, gen_normal
from .graph import components
from .core import support_pattern
from .io import read_matrix, write_matrix
from .solver import SolveConfig, solve

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NOCONV, EXIT_VERIFY = 0, 1, 2, 3, 4

_ALGO_NAMES = {
    "newton": "modified_newton",
    "modified-newton": "modified_newton",
    "plain-newton": "plain_newton",
    "admm": "admm",
    "dykstra": "dykstra",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _algorithm(name: str) -> str:
    try:
        return _ALGO_NAMES[name]
    except KeyError:
        raise argparse.ArgumentTypeError(f"unknown algorithm {name!r}; choose from {sorted(_ALGO_NAMES)}") from None


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return vals


def _algo_list(text: str) -> list[str]:
    return [_algorithm(t.strip()) for t in text.split(",") if t.strip()]


def _env_seed():
    v = os.environ.get("DSPROJ_SEED")
    if v is None:
        return None
    try:
        return int(v)
    except ValueError:
        raise UsageError(f"DSPROJ_SEED must be an integer, got {v!r}") from None


def _seed(args, required: bool) -> int:
    if args.seed is not None:
        return args.seed
    env = _env_seed()
    if env is not None:
        return env
    if required:
        raise UsageError("--seed is required (or set DSPROJ_SEED)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dsproj", description="Nearest doubly stochastic matrix solver.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("solve", help="project one matrix")
    s.add_argument("--input", required=True)
    s.add_argument("--format", choices=["csv", "mm"], default=None)
    s.add_argument("--algorithm", type=_algorithm, default="newton")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iter", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--damping", action="store_true")
    s.add_argument("--output")
    s.add_argument("--report")

    g = sub.add_parser("gen", help="write a random instance")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--blocks", type=int)
    g.add_argument("--noise", type=float, default=0.1)
    g.add_argument("--seed", type=int)
    g.add_argument("--output", required=True)
    g.add_argument("--format", choices=["csv", "mm"], default=None)

    b = sub.add_parser("bench", help="timing table over standard normal instances")
    b.add_argument("--sizes", type=_int_list, required=True)
    b.add_argument("--trials", type=int, default=1)
    b.add_argument("--seed", type=int)
    b.add_argument("--algorithm", type=_algorithm, default="newton")
    b.add_argument("--report")

    c = sub.add_parser("compare", help="run several algorithms on one input")
    c.add_argument("--input", required=True)
    c.add_argument("--format", choices=["csv", "mm"], default=None)
    c.add_argument("--algorithms", type=_algo_list, default=["modified_newton", "admm", "dykstra"])
    c.add_argument("--seed", type=int)
    c.add_argument("--report")

    v = sub.add_parser("verify", help="check the Newton solution against an oracle")
    v.add_argument("--input", required=True)
    v.add_argument("--format", choices=["csv", "mm"], default=None)
    v.add_argument("--against", choices=["active-set", "dykstra"], required=True)
    v.add_argument("--tol", type=float, default=1e-8)
    v.add_argument("--seed", type=int)
    return p


def _table(headers, rows) -> str:
    cells = [headers] + [[str(x) for x in r] for r in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(headers))]
    line = lambda r: "  ".join(v.rjust(w) for v, w in zip(r, widths))
    return "\n".join([line(cells[0]), line(["-" * w for w in widths])] + [line(r) for r in cells[1:]])


def _write_json(path, payload):
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")


def _report_row(rep):
    return [rep.algorithm, rep.n, rep.iterations, f"{rep.kkt.total:.1e}", f"{rep.time_ms:.1f}",
            "yes" if rep.converged else "no"]


_HEADERS = ["algorithm", "n", "iteration", "opt. cond.", "time_ms", "converged"]


def cmd_solve(args, out) -> int:
    inst = read_matrix(args.input, args.format)
    cfg = SolveConfig(tol=args.tol, max_iter=args.max_iter, seed=_seed(args, False),
                      damping=args.damping, algorithm=args.algorithm)
    rep = solve(inst, cfg)
    print(_table(_HEADERS, [_report_row(rep)]), file=out)
    if args.output:
        write_matrix(args.output, rep.X_star, args.format)
    if args.report:
        _write_json(args.report, rep.to_dict())
    return EXIT_OK if rep.converged else EXIT_NOCONV


def cmd_gen(args, out) -> int:
    seed = _seed(args, True)
    if args.n < 1:
        raise UsageError("--n must be positive")
    if args.blocks is None:
        inst = gen_normal(args.n, seed)
        what = f"standard normal n={args.n} seed={seed}"
    else:
        if not 1 <= args.blocks <= args.n:
            raise UsageError("--blocks must be between 1 and n")
        inst = gen_blocky(args.n, args.blocks, args.noise, seed)
        what = f"blocky n={args.n} blocks={args.blocks} noise={args.noise} seed={seed}"
    write_matrix(args.output, inst, args.format, header=what)
    print(f"wrote {what} to {args.output}", file=out)
    return EXIT_OK


def run_bench(sizes, trials, seed, algorithm="modified_newton") -> dict:
    """Median iteration count, KKT total and time per size.

    Trial ``t`` at size ``n`` uses seed ``derive_seed(seed, n, t)`` for both
    the instance and the vertex selection.  One untimed warm-up solve runs
    per size first.
    """
    rows = []
    for n in sizes:
        seeds = [derive_seed(seed, n, t) for t in range(trials)]
        solve(gen_normal(n, seeds[0]), SolveConfig(seed=seeds[0], algorithm=algorithm))
        reports = []
        for s in seeds:
            inst = gen_normal(n, s)
            reports.append(solve(inst, SolveConfig(seed=s, algorithm=algorithm)))
        rows.append({
            "n": n,
            "trials": trials,
            "median_iterations": float(np.median([r.iterations for r in reports])),
            "median_opt_cond": float(np.median([r.kkt.total for r in reports])),
            "median_time_ms": float(np.median([r.time_ms for r in reports])),
            "all_converged": all(r.converged for r in reports),
            "runs": [r.to_dict() for r in reports],
        })
    return {"algorithm": algorithm, "seed": int(seed), "sizes": list(sizes), "rows": rows}


def cmd_bench(args, out) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    result = run_bench(args.sizes, args.trials, _seed(args, True), args.algorithm)
    table = [[r["n"], r["trials"], f"{r['median_iterations']:g}", f"{r['median_opt_cond']:.1e}",
              f"{r['median_time_ms']:.1f}"] for r in result["rows"]]
    print(_table(["n", "trials", "iteration", "opt. cond.", "time_ms"], table), file=out)
    if args.report:
        _write_json(args.report, result)
    return EXIT_OK if all(r["all_converged"] for r in result["rows"]) else EXIT_NOCONV


def cmd_compare(args, out) -> int:
    inst = read_matrix(args.input, args.format)
    seed = _seed(args, False)
    reps = [solve(inst, SolveConfig(seed=seed, algorithm=a)) for a in args.algorithms]
    ref = reps[0].X_star
    rows = [_report_row(r) + [f"{np.max(np.abs(r.X_star - ref)):.1e}"] for r in reps]
    print(_table(_HEADERS + [f"max|X - X_{reps[0].algorithm}|"], rows), file=out)
    if args.report:
        _write_json(args.report, [r.to_dict() for r in reps])
    return EXIT_OK if all(r.converged for r in reps) else EXIT_NOCONV


def cmd_verify(args, out) -> int:
    inst = read_matrix(args.input, args.format)
    rep = solve(inst, SolveConfig(seed=_seed(args, False)))
    if not rep.converged:
        print("Newton solve did not converge", file=out)
        return EXIT_NOCONV
    if args.against == "active-set":
        X_ref = baselines.active_set_enumerate(inst)
    else:
        X_ref = baselines.dykstra_project(inst)
    gap = float(np.max(np.abs(rep.X_star - X_ref)))
    ok = gap <= args.tol
    blocks = components(support_pattern(rep.X_star)).K
    print(f"max |X_newton - X_{args.against}| = {gap:.3e} (tol {args.tol:.1e}); "
          f"blocks in solution: {blocks}; {'PASS' if ok else 'FAIL'}", file=out)
    return EXIT_OK if ok else EXIT_VERIFY


_COMMANDS = {"solve": cmd_solve, "gen": cmd_gen, "bench": cmd_bench, "compare": cmd_compare, "verify": cmd_verify}


def run_cli(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        return _COMMANDS[args.command](args, out)
    except (UsageError, InstanceTooLarge) as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ParseError, NonSquare) as exc:
        print(f"dsproj: {exc}", file=sys.stderr)
        return EXIT_IO
    except MaxIterExceeded as exc:
        print(f"dsproj: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except DSProjError as exc:
        print(f"dsproj: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOCONV


def main():
    sys.exit(run_cli())
