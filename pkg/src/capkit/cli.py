"""Command-line front end: ``capkit <subcommand> ...``.

Exit codes: 0 success, 2 input error, 3 capacity solver did not converge,
4 a verified inequality was violated (which signals a bug, since every
suite except ``conjecture`` checks a theorem).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import List, Optional, Sequence

from . import combinatorics as C
from . import operators as O
from .capacity import CapacityError, capacity
from .io import InputError, load_json, poly_from_json, poly_to_json, validate
from .report import INEQ_TOL
from .stability import probabilistic_stability_test
from .suites import SUITES, SuiteConfig, experiment_rows

EXIT_OK, EXIT_INPUT, EXIT_NONCONVERGED, EXIT_VIOLATION = 0, 2, 3, 4

log = logging.getLogger("capkit")


# -- argument parsing helpers -------------------------------------------------

def parse_vector(text: str) -> List[Fraction]:
    """Comma-separated reals, parsed exactly (``1/2``, ``0.25``, ``3``)."""
    if text.strip() == "":
        return []
    try:
        return [Fraction(v.strip()) for v in text.split(",")]
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad vector {text!r}") from exc


def parse_int_list(text: str) -> List[int]:
    """``2..6``, ``1,3,5`` or a mix such as ``1,4..6``; empty string gives []."""
    out: List[int] = []
    for part in filter(None, (p.strip() for p in text.split(","))):
        try:
            if ".." in part:
                lo, hi = part.split("..")
                out.extend(range(int(lo), int(hi) + 1))
            else:
                out.append(int(part))
        except ValueError as exc:
            raise InputError(f"bad integer list {text!r}") from exc
    return out


def _threads() -> int:
    raw = os.environ.get("CAPKIT_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InputError(f"CAPKIT_THREADS must be an integer, got {raw!r}")


def run_jobs(jobs):
    """Run jobs on a pool of CAPKIT_THREADS workers; results keep job order."""
    workers = _threads()
    if workers == 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: job(), jobs))


def _load_poly(path: str):
    data = load_json(path)
    validate(data, "polynomial")
    return poly_from_json(data)


def _load_operator(spec: str) -> O.LinearOperator:
    """A JSON file path, or ``name:key=value:...`` naming a built-in constructor."""
    if os.path.exists(spec):
        data = load_json(spec)
        validate(data, "operator")
        try:
            return O.LinearOperator.from_json(data)
        except (KeyError, ValueError, TypeError) as exc:
            raise InputError(f"bad operator: {exc}") from exc
    name, *params = spec.split(":")
    if name not in O.BUILTINS:
        raise InputError(f"unknown operator {name!r}; built-ins: {', '.join(sorted(O.BUILTINS))}")
    kwargs = {}
    for item in params:
        key, _, value = item.partition("=")
        vec = parse_vector(value)
        if key in ("lam", "point"):
            kwargs[key] = [int(v) for v in vec] if key == "lam" else vec
        elif key == "value":
            kwargs[key] = vec[0]
        else:
            kwargs[key] = int(vec[0])
    try:
        return O.BUILTINS[name](**kwargs)
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"cannot build {name}: {exc}") from exc


# -- output -------------------------------------------------------------------

def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _human_row(i: int, r: dict) -> str:
    mark = "ok" if r["holds"] else "VIOLATED"
    if r["trivial"]:
        mark += " (trivial)"
    return (f"#{i:<4d} [{r['tag']}] {r['context']}: lhs={r['lhs']:.10g} rhs={r['rhs']:.10g} "
            f"slack={r['slack']:.3e} {mark}")


def emit_reports(suite: str, seed: int, reports, fmt: str) -> str:
    rows = [dict(r.to_dict(), instance=i) for i, group in enumerate(reports) for r in group]
    nontrivial = [r for r in rows if not r["trivial"]]
    summary = {
        "rows": len(rows),
        "violations": sum(1 for r in rows if not r["holds"]),
        "trivial": len(rows) - len(nontrivial),
        "min_slack": min((r["slack"] for r in nontrivial), default=None),
        "all_hold": all(r["holds"] for r in rows),
    }
    if fmt == "json":
        return _dump({"suite": suite, "seed": seed, "rows": rows, "summary": summary}) + "\n"
    if fmt == "csv":
        header = ["instance", "tag", "lhs", "rhs", "slack", "holds", "trivial", "context"]
        return _csv(header, [[r[h] for h in header] for r in rows])
    lines = [_human_row(r["instance"], r) for r in rows]
    ms = summary["min_slack"]
    lines.append(f"{suite}: {summary['rows']} rows, {summary['violations']} violated, "
                 f"{summary['trivial']} trivial, min slack "
                 f"{'n/a' if ms is None else format(ms, '.3e')}")
    return "\n".join(lines) + "\n"


# -- subcommands ----------------------------------------------------------------

def cmd_capacity(args) -> int:
    p = _load_poly(args.poly)
    alpha = parse_vector(args.alpha or "")
    try:
        res = capacity(p, alpha)
    except CapacityError as exc:
        raise InputError(str(exc)) from exc
    out = res.to_dict()
    if args.format == "json":
        sys.stdout.write(_dump(out) + "\n")
    elif args.format == "csv":
        sys.stdout.write(_csv(["value", "status", "converged", "iterations"],
                              [[out["value"], out["status"], out["converged"], out["iterations"]]]))
    else:
        face = f" face={out['face']}" if "face" in out else ""
        sys.stdout.write(f"cpc_{[str(a) for a in alpha]} = {out['value']:.12g} "
                         f"[{out['status']}]{face}\n")
    return EXIT_OK if res.converged else EXIT_NONCONVERGED


def cmd_verify(args) -> int:
    cfg = SuiteConfig(
        seed=args.seed,
        trials=args.trials,
        lam=parse_int_list(args.lam) if args.lam else None,
        n=parse_int_list(args.n) if args.n else None,
        alpha=parse_vector(args.alpha) if args.alpha else None,
        beta=parse_vector(args.beta) if args.beta is not None else None,
        tol=args.tol if args.tol is not None else INEQ_TOL,
        max_vertices=args.max_vertices,
        matrix=args.matrix,
        override_stability=args.override_stability,
    )
    try:
        jobs = SUITES[args.suite](cfg)
        reports = run_jobs(jobs)
    except O.StabilityRejected as exc:
        raise InputError(f"{exc} (pass --override-stability to force)") from exc
    except (ValueError, CapacityError) as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(emit_reports(args.suite, args.seed, reports, args.format))
    if args.suite == "conjecture":
        return EXIT_OK
    ok = all(r.holds for group in reports for r in group)
    return EXIT_OK if ok else EXIT_VIOLATION


def parse_grid(args) -> List[dict]:
    ks = parse_int_list(args.k) if args.k else None
    grid = []
    if args.family == "regular":
        for n in parse_int_list(args.n or ""):
            for d in parse_int_list(args.d or ""):
                if not 1 <= d <= n:
                    raise InputError(f"need 1 <= d <= n, got n={n} d={d}")
                for k in (ks if ks is not None else range(n + 1)):
                    if not 0 <= k <= n:
                        raise InputError(f"k={k} out of range for n={n}")
                    grid.append({"m": n, "n": n, "a": d, "b": d, "k": k})
        return grid
    for m in parse_int_list(args.m or ""):
        for n in parse_int_list(args.n or ""):
            for a in parse_int_list(args.a or ""):
                if (a * m) % n:
                    continue
                b = a * m // n
                if not (1 <= a <= n and 1 <= b <= m):
                    continue
                for k in (ks if ks is not None else range(min(m, n) + 1)):
                    if not 0 <= k <= min(m, n):
                        raise InputError(f"k={k} out of range for m={m} n={n}")
                    grid.append({"m": m, "n": n, "a": a, "b": b, "k": k})
    return grid


def _params_text(p: dict) -> str:
    return ";".join(f"{k}={p[k]}" for k in ("m", "n", "a", "b", "k"))


def cmd_experiment(args) -> int:
    grid = parse_grid(args)
    limit = args.max_vertices if not args.no_exact else -1
    rows = experiment_rows(grid, args.seed, limit)
    if args.format == "json":
        sys.stdout.write(_dump({"seed": args.seed, "rows": rows}) + "\n")
        return EXIT_OK
    table = [[_params_text(r["params"]), "NA" if r["mu_k"] is None else r["mu_k"],
              repr(r["csikvari_bound"]), "NA" if r["ratio"] is None else repr(r["ratio"])]
             for r in rows]
    if args.format == "csv":
        sys.stdout.write(_csv(["params", "mu_k", "csikvari_bound", "ratio"], table))
    else:
        for row in table:
            sys.stdout.write("  ".join(str(v) for v in row) + "\n")
    return EXIT_OK


def cmd_symbol(args) -> int:
    T = _load_operator(args.operator)
    try:
        S = O.symbol_bounded(T) if T.bounded else O.symbol_trans_truncated(T, args.order or T.order)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(_dump(poly_to_json(S)) + "\n")
    return EXIT_OK


def cmd_apply(args) -> int:
    T = _load_operator(args.operator)
    p = _load_poly(args.poly)
    try:
        out = O.apply(T, p)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    sys.stdout.write(_dump(poly_to_json(out)) + "\n")
    return EXIT_OK


def cmd_stability(args) -> int:
    p = _load_poly(args.poly)
    verdict = probabilistic_stability_test(p, args.trials, args.seed)
    sys.stdout.write(_dump(verdict.to_dict()) + "\n")
    return EXIT_OK


def cmd_matchings(args) -> int:
    data = load_json(args.graph)
    validate(data, "graph")
    try:
        G = C.BipartiteGraph.from_json(data)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    counts = C.matching_numbers(G)
    out = {"mu": counts}
    try:
        a, b = G.degrees()
        out["csikvari_bound"] = [C.csikvari_bound(G, k) for k in range(len(counts))]
        out["degrees"] = [a, b]
    except ValueError:
        pass
    sys.stdout.write(_dump(out) + "\n")
    return EXIT_OK


def cmd_permanent(args) -> int:
    from .io import matrix_from_json

    data = load_json(args.matrix)
    validate(data, "matrix")
    try:
        M = C.NonnegMatrix.from_rows(matrix_from_json(data))
        value = C.permanent(M)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    text = str(value) if isinstance(value, Fraction) else repr(float(value))
    sys.stdout.write(_dump({"permanent": text, "float": float(value)}) + "\n")
    return EXIT_OK


def _common(p: argparse.ArgumentParser, fmt: str = "json", trials: int = 20) -> argparse.ArgumentParser:
    p.add_argument("--format", choices=["json", "csv", "human"], default=fmt)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=None,
                   help="inequality tolerance, relative to max(1, |rhs|)")
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="capkit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help: str, **common) -> argparse.ArgumentParser:
        return _common(sub.add_parser(name, help=help), **common)

    p = add("capacity", "capacity of a polynomial")
    p.add_argument("poly", help="polynomial JSON file")
    p.add_argument("--alpha", required=True)
    p.set_defaults(func=cmd_capacity)

    p = add("verify", "run a verification suite")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--alpha")
    p.add_argument("--beta")
    p.add_argument("--lambda", dest="lam", help="degrees, e.g. 2..6 or 1,2,3")
    p.add_argument("--n", help="sizes for the vdw suite, e.g. 2..6")
    p.add_argument("--matrix", choices=["uniform", "random", "identity"], default="uniform")
    p.add_argument("--max-vertices", type=int, default=16)
    p.add_argument("--override-stability", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = add("experiment", "matching counts vs bound, as CSV", fmt="csv")
    p.add_argument("--family", choices=["regular", "biregular"], default="regular")
    p.add_argument("--n", default="")
    p.add_argument("--d", default="")
    p.add_argument("--m", default="")
    p.add_argument("--a", default="")
    p.add_argument("--k", default=None)
    p.add_argument("--max-vertices", type=int, default=16)
    p.add_argument("--no-exact", action="store_true", help="skip exact matching counts")
    p.set_defaults(func=cmd_experiment)

    p = add("symbol", "symbol of an operator")
    p.add_argument("operator", help="operator JSON file or name:key=value:...")
    p.add_argument("--order", type=int, default=None)
    p.set_defaults(func=cmd_symbol)

    p = add("apply", "apply an operator to a polynomial")
    p.add_argument("operator")
    p.add_argument("poly")
    p.set_defaults(func=cmd_apply)

    p = add("stability", "sampled real-stability test", trials=200)
    p.add_argument("poly")
    p.set_defaults(func=cmd_stability)

    p = add("matchings", "matching numbers of a bipartite graph")
    p.add_argument("graph")
    p.set_defaults(func=cmd_matchings)

    p = add("permanent", "permanent of a square matrix")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_permanent)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"capkit: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
