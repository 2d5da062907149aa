"""Command-line front end.

Subcommands: ``make`` (emit named graphs), ``eig`` (first eigenpair of a
graph file), ``cheeger`` (exact Cheeger constant), ``verify`` (run claim
harnesses), ``sweep`` (eigenvalue along an exponent grid, CSV).

Graph inputs are edge-list files (``u v`` per line, ``#`` comments,
optional ``n=<k>`` header) or the JSON form ``{"n":..,"edges":[[u,v],..]}``;
``-`` reads standard input. Exit codes: 0 success / all pass, 1
verification or convergence failure, 2 usage or input error. All
randomness flows from ``--seed``; identical invocations produce identical
output bytes.
"""

import argparse
import json
import sys
from dataclasses import replace

from .cheeger import dirichlet_cheeger
from .errors import NotConverged, PlapError
from .graphs import (
    Graph,
    format_edge_list,
    graph_from_json_dict,
    graph_to_json_dict,
    make_cycle,
    make_path,
    make_tadpole,
    parse_edge_list,
)
from .spectral import SolverOptions, first_eigenpair, residual_noise_floor
from . import verify as V

DEFAULT_P_GRID = [1.2, 1.5, 2.0, 3.0, 4.0]
DEFAULT_LIMIT_GRID = [2.0, 1.5, 1.25, 1.1, 1.05]

_CLAIM_ALIASES = {
    "thm-vertices": V.CLAIM_FK_VERTICES,
    "thm-1.2": V.CLAIM_FK_VERTICES,
    "thm-edges": V.CLAIM_FK_EDGES,
    "thm-1.3": V.CLAIM_FK_EDGES,
    "thm-p1": V.CLAIM_FK_P1,
    "thm-1.4": V.CLAIM_FK_P1,
    "lem-2.2": V.CLAIM_HEAD_MAX,
    "lem-2.3": V.CLAIM_TADPOLE_CMP,
    "lem-2.4": V.CLAIM_PATH_CHAIN,
    "p-limit": V.CLAIM_P_LIMIT,
    "cheeger-upper-bound": V.CLAIM_CHEEGER_BOUND,
}


class UsageError(Exception):
    pass


def _parse_range(text: str) -> list[int]:
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise UsageError(f"bad range {text!r}") from None
        if hi < lo:
            raise UsageError(f"empty range {text!r}")
        return list(range(lo, hi + 1))
    try:
        return [int(text)]
    except ValueError:
        raise UsageError(f"bad integer {text!r}") from None


def _parse_p_list(text: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise UsageError(f"bad exponent list {text!r}") from None
    if not values:
        raise UsageError("empty exponent list")
    return values


def _read_graph(path: str) -> Graph:
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return graph_from_json_dict(json.loads(text))
    return parse_edge_list(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _solver_options(args, p: float) -> SolverOptions:
    return SolverOptions(
        p=p,
        tol_residual=args.tol_residual,
        max_iterations=args.max_iters,
        random_starts=args.starts,
        seed=args.seed,
    )


def _add_solver_flags(sub) -> None:
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--tol-residual", type=float, default=None, dest="tol_residual")
    sub.add_argument("--max-iters", type=int, default=50_000, dest="max_iters")
    sub.add_argument("--starts", type=int, default=4)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plap",
        description="Graph p-Laplacian Dirichlet eigenvalues, Cheeger constants "
                    "and extremal-graph verification.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("make", help="emit a named graph")
    sub.add_argument("kind", choices=["tadpole", "path", "cycle"])
    sub.add_argument("--n", type=int, required=True)
    sub.add_argument("--i", type=int, default=None)
    sub.add_argument("--format", choices=["edges", "json"], default="edges")
    sub.add_argument("--out", default=None)

    sub = subs.add_parser("eig", help="first Dirichlet eigenpair of a graph")
    sub.add_argument("graph", help="edge-list/JSON path or - for stdin")
    sub.add_argument("--p", type=float, required=True)
    _add_solver_flags(sub)
    sub.add_argument("--out", default=None)

    sub = subs.add_parser("cheeger", help="exact Dirichlet Cheeger constant")
    sub.add_argument("graph")
    sub.add_argument("--out", default=None)

    sub = subs.add_parser("verify", help="run a claim verification harness")
    sub.add_argument("claim", choices=sorted(_CLAIM_ALIASES))
    sub.add_argument("--n", default=None, help="single value or a..b range")
    sub.add_argument("--m", default=None, help="single value or a..b range")
    sub.add_argument("--i", type=int, default=None)
    sub.add_argument("--p", default=None, help="comma-separated exponent list")
    sub.add_argument("--p-grid", default=None, dest="p_grid",
                     help="alias for --p")
    sub.add_argument("--graph", default=None,
                     help="graph file for p-limit (defaults to a tadpole)")
    _add_solver_flags(sub)
    sub.add_argument("--workers", type=int, default=1)
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--out", default=None)

    sub = subs.add_parser("sweep", help="eigenvalue sweep over an exponent grid (CSV)")
    sub.add_argument("graph", nargs="?", default=None,
                     help="edge-list/JSON path or - for stdin")
    sub.add_argument("--tadpole", default=None, metavar="N,I")
    sub.add_argument("--path", default=None, type=int, metavar="N")
    sub.add_argument("--cycle", default=None, type=int, metavar="N")
    sub.add_argument("--p-grid", required=True, dest="p_grid")
    _add_solver_flags(sub)
    sub.add_argument("--out", default=None)
    return parser


def _cmd_make(args) -> int:
    if args.kind == "tadpole":
        if args.i is None:
            raise UsageError("tadpole needs --i")
        g = make_tadpole(args.n, args.i)
    elif args.kind == "path":
        g = make_path(args.n)
    else:
        g = make_cycle(args.n)
    if args.format == "json":
        text = json.dumps(graph_to_json_dict(g), indent=2) + "\n"
    else:
        text = format_edge_list(g)
    _emit(text, args.out)
    return 0


def _cmd_eig(args) -> int:
    g = _read_graph(args.graph)
    opts = _solver_options(args, args.p)
    try:
        result = first_eigenpair(g, opts)
        code = 0
    except NotConverged as exc:
        result = exc.best
        code = 1
    _emit(json.dumps(result.to_json_dict(), indent=2) + "\n", args.out)
    return code


def _cmd_cheeger(args) -> int:
    g = _read_graph(args.graph)
    result = dirichlet_cheeger(g)
    _emit(json.dumps(result.to_json_dict(), indent=2) + "\n", args.out)
    return 0


def _verify_reports(args) -> list:
    claim = _CLAIM_ALIASES[args.claim]
    grid_text = args.p or args.p_grid
    p_list = _parse_p_list(grid_text) if grid_text else None
    reports = []
    if claim == V.CLAIM_FK_VERTICES:
        if args.n is None:
            raise UsageError("thm-vertices needs --n")
        for n in _parse_range(args.n):
            for p in p_list or DEFAULT_P_GRID:
                opts = _solver_options(args, p)
                reports.append(V.verify_fk_vertices(n, p, opts, workers=args.workers))
    elif claim == V.CLAIM_FK_EDGES:
        if args.m is None:
            raise UsageError("thm-edges needs --m")
        for m in _parse_range(args.m):
            for p in p_list or DEFAULT_P_GRID:
                opts = _solver_options(args, p)
                reports.append(V.verify_fk_edges(m, p, opts, workers=args.workers))
    elif claim == V.CLAIM_FK_P1:
        if args.m is None:
            raise UsageError("thm-p1 needs --m")
        for m in _parse_range(args.m):
            reports.append(V.verify_fk_p1(m))
    elif claim == V.CLAIM_HEAD_MAX:
        if args.n is None:
            raise UsageError("lem-2.2 needs --n")
        for n in _parse_range(args.n):
            i_values = [args.i] if args.i is not None else list(range(3, n))
            for i in i_values:
                for p in p_list or DEFAULT_P_GRID:
                    opts = _solver_options(args, p)
                    reports.append(V.verify_lemma_head_max(n, i, p, opts))
    elif claim == V.CLAIM_TADPOLE_CMP:
        if args.n is None:
            raise UsageError("lem-2.3 needs --n")
        for n in _parse_range(args.n):
            for p in p_list or DEFAULT_P_GRID:
                opts = _solver_options(args, p)
                reports.append(V.verify_tadpole_comparison(n, p, opts))
    elif claim == V.CLAIM_PATH_CHAIN:
        if args.n is None:
            raise UsageError("lem-2.4 needs --n")
        for n in _parse_range(args.n):
            for p in p_list or DEFAULT_P_GRID:
                opts = _solver_options(args, p)
                reports.append(V.verify_path_chain(n, p, opts))
    elif claim == V.CLAIM_P_LIMIT:
        if args.graph is not None:
            g = _read_graph(args.graph)
        else:
            if args.n is None:
                raise UsageError("p-limit needs --graph or --n (tadpole)")
            n_values = _parse_range(args.n)
            if len(n_values) != 1:
                raise UsageError("p-limit takes a single --n")
            g = make_tadpole(n_values[0], args.i if args.i is not None else 3)
        grid = p_list or DEFAULT_LIMIT_GRID
        opts = _solver_options(args, grid[0])
        reports.append(V.verify_p_limit(g, grid, opts))
    elif claim == V.CLAIM_CHEEGER_BOUND:
        if args.n is None:
            raise UsageError("cheeger-upper-bound needs --n (max vertex count)")
        n_values = _parse_range(args.n)
        if len(n_values) != 1:
            raise UsageError("cheeger-upper-bound takes a single --n")
        opts = _solver_options(args, (p_list or DEFAULT_P_GRID)[0])
        reports.append(V.verify_cheeger_upper_bound(
            n_values[0], p_list or DEFAULT_P_GRID, opts, workers=args.workers))
    return reports


def _cmd_verify(args) -> int:
    reports = _verify_reports(args)
    all_pass = all(r.passed for r in reports)
    if args.format == "csv":
        blocks = []
        for r in reports:
            header = json.dumps({"claim": r.claim, "params": r.params},
                                separators=(",", ":"), default=str)
            blocks.append(f"# {header}\n" + r.to_csv_text())
        text = "".join(blocks)
    else:
        payload = {
            "all_pass": all_pass,
            "reports": [r.to_json_dict() for r in reports],
        }
        text = json.dumps(payload, indent=2) + "\n"
    _emit(text, args.out)
    return 0 if all_pass else 1


def _cmd_sweep(args) -> int:
    family_flags = [f for f in (args.tadpole, args.path, args.cycle) if f is not None]
    if len(family_flags) > 1 or (args.graph is not None and family_flags):
        raise UsageError("give exactly one of: a graph path, --tadpole, --path, --cycle")
    if args.tadpole is not None:
        try:
            n_txt, i_txt = args.tadpole.split(",")
            g = make_tadpole(int(n_txt), int(i_txt))
        except ValueError:
            raise UsageError(f"bad --tadpole {args.tadpole!r}, expected N,I") from None
    elif args.path is not None:
        g = make_path(args.path)
    elif args.cycle is not None:
        g = make_cycle(args.cycle)
    elif args.graph is not None:
        g = _read_graph(args.graph)
    else:
        raise UsageError("sweep needs a graph path or a family flag")
    grid = _parse_p_list(args.p_grid)
    lam_est = 0.0
    try:
        lam_est = float(dirichlet_cheeger(g).value)
    except PlapError:
        pass
    lines = ["p,lambda,residual_inf,iterations,converged"]
    all_converged = True
    for p in grid:
        opts = _solver_options(args, p)
        # near p = 1 the default residual tolerance can sit below the
        # double-precision noise floor; widen like the p-limit harness
        floor = min(residual_noise_floor(p, lam_est), 0.01)
        if floor > opts.resolved_tol_residual:
            opts = replace(opts, tol_residual=floor)
        try:
            result = first_eigenpair(g, opts)
            converged = True
        except NotConverged as exc:
            result = exc.best
            converged = False
            all_converged = False
        if result.lam > 0:
            lam_est = result.lam
        lines.append(
            f"{p!r},{result.lam!r},{result.residual_inf!r},"
            f"{result.iterations},{'true' if converged else 'false'}"
        )
    _emit("\n".join(lines) + "\n", args.out)
    return 0 if all_converged else 1


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        if args.command == "make":
            return _cmd_make(args)
        if args.command == "eig":
            return _cmd_eig(args)
        if args.command == "cheeger":
            return _cmd_cheeger(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        return 2
    except (UsageError, PlapError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
