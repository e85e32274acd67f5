"""Command-line front end: split, derive-thresholds, diversify, evaluate,
gridsearch, report.

Exit codes: 0 success, 2 usage error, 3 data error, 4 infeasible or
enumeration/size limits.  An optional JSON config file supplies defaults;
explicit flags override it.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
import time
from pathlib import Path

from . import data as dio
from .baselines import RankedLists, mmr, top_k, xquad
from .errors import InfeasibleError, InstanceTooLargeError, RecdivError
from .flownet import solve_tdiv_detailed
from .graph import DivParams, Grouping, RecGraph, Solution, ThresholdTable, eval_objective, new_solution
from .greedy import greedy_solve
from . import metrics as m

METHODS = ("top", "mmr", "xquad", "greedy", "flow")


# ---------------------------------------------------------------------------
# Shared loading helpers

def _load_graph(args) -> RecGraph:
    constraint: int | dict[str, int] = args.constraint
    if getattr(args, "constraint_file", None):
        constraint = {}
        with open(args.constraint_file, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if line:
                    uid, c = line.split("\t")
                    constraint[uid] = int(c)
    graph, _skipped = dio.load_candidates(args.candidates, constraint, args.top_n)
    return graph


def _load_groupings(args, graph: RecGraph) -> tuple[Grouping | None, Grouping | None]:
    item_cats = user_types = None
    if getattr(args, "categories", None):
        item_cats, _ = dio.load_grouping(args.categories, "item", graph.item_ids)
    if getattr(args, "types", None):
        user_types, _ = dio.load_grouping(args.types, "user", graph.user_ids)
    return user_types, item_cats


def _load_or_derive_thresholds(
    args, graph: RecGraph, user_types: Grouping, item_cats: Grouping
) -> ThresholdTable:
    if getattr(args, "thresholds", None):
        return dio.load_thresholds(
            args.thresholds, graph.user_ids, graph.item_ids,
            user_types.group_ids, item_cats.group_ids,
        )
    if not getattr(args, "train", None):
        raise RecdivError("either --thresholds or --train is required")
    train = dio.load_ratings(args.train)
    user_tab = dio.derive_user_thresholds(
        train, item_cats, graph.item_ids, graph.user_ids,
        graph.display_constraints, overlapping=not item_cats.disjoint,
    )
    item_tab = dio.derive_item_thresholds(
        train, user_types, graph.user_ids, graph.item_ids, graph.display_constraints,
    )
    return ThresholdTable(user_tab.user_category, item_tab.item_type)


def _ranked_to_solution(graph: RecGraph, ranked: RankedLists,
                        user_types: Grouping | None,
                        item_cats: Grouping | None) -> Solution:
    edge_of = {(e.user, e.item): e.index for e in graph.edges}
    sol = new_solution(graph, user_types, item_cats)
    for u, items in enumerate(ranked.items):
        for item in items:
            sol.add_edge(edge_of[(u, item)])
    return sol


# ---------------------------------------------------------------------------
# Subcommands

def cmd_split(args) -> int:
    if args.folds < 2:
        print("usage error: --folds must be >= 2", file=sys.stderr)
        return 2
    ratings = dio.load_ratings(args.ratings)
    spec = dio.SplitSpec(folds=args.folds, min_ratings=args.min_ratings, seed=args.seed)
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    for fold, (train, test) in enumerate(dio.split_folds(ratings, spec)):
        dio.save_ratings(train, outdir / f"train_{fold}.tsv")
        dio.save_ratings(test, outdir / f"test_{fold}.tsv")
    print(f"wrote {2 * spec.folds} fold files to {outdir}")
    return 0


def cmd_derive_thresholds(args) -> int:
    graph = _load_graph(args)
    user_types, item_cats = _load_groupings(args, graph)
    if user_types is None or item_cats is None:
        raise RecdivError("--categories and --types are required")
    table = _load_or_derive_thresholds(args, graph, user_types, item_cats)
    dio.save_thresholds(
        table, args.output, graph.user_ids, graph.item_ids,
        user_types.group_ids, item_cats.group_ids,
    )
    print(f"wrote {len(table.user_category) + len(table.item_type)} thresholds "
          f"to {args.output}")
    return 0


def _run_method(graph, user_types, item_cats, thresholds, args,
                method: str, beta: float, mu: float, lam: float):
    """Returns (solution, info dict)."""
    params = DivParams(beta, mu)
    t0 = time.perf_counter()
    if method == "top":
        sol = _ranked_to_solution(graph, top_k(graph), user_types, item_cats)
    elif method == "mmr":
        sol = _ranked_to_solution(graph, mmr(graph, item_cats, lam), user_types, item_cats)
    elif method == "xquad":
        intent = m.IntentProfile.from_graph(graph, item_cats)
        sol = _ranked_to_solution(
            graph, xquad(graph, item_cats, intent, lam), user_types, item_cats
        )
    elif method == "greedy":
        sol = greedy_solve(graph, user_types, item_cats, thresholds, params)
    elif method == "flow":
        sol, _net, _res, _rmap = solve_tdiv_detailed(
            graph, user_types, item_cats, thresholds, params, args.cost_scale
        )
    else:
        raise RecdivError(f"unknown method {method!r}")
    elapsed = time.perf_counter() - t0
    tu = m.tudiv(sol, item_cats, thresholds)
    ti = m.tidiv(sol, user_types, thresholds)
    rel = sol.relevance()
    info = {
        "method": method,
        "beta": beta,
        "mu": mu,
        "lambda": lam,
        "users": graph.num_users,
        "items": graph.num_items,
        "edges": graph.num_edges,
        "selected": sol.num_selected(),
        "rel": rel,
        "tudiv": tu,
        "tidiv": ti,
        "objective": rel + beta * tu + mu * ti,
        "wall_time_s": elapsed,
    }
    return sol, info


def cmd_diversify(args) -> int:
    graph = _load_graph(args)
    user_types, item_cats = _load_groupings(args, graph)
    if user_types is None or item_cats is None:
        raise RecdivError("--categories and --types are required")
    if args.method == "flow" and not (user_types.disjoint and item_cats.disjoint):
        raise RecdivError("the flow method requires disjoint groupings")
    if args.method in ("mmr", "xquad") and args.lam is None:
        raise RecdivError(f"--lambda is required for {args.method}")
    thresholds = ThresholdTable()
    if args.method in ("greedy", "flow"):
        thresholds = _load_or_derive_thresholds(args, graph, user_types, item_cats)
    sol, info = _run_method(
        graph, user_types, item_cats, thresholds, args,
        args.method, args.beta, args.mu, args.lam or 0.0,
    )
    dio.save_solution(sol, args.output, args.method)
    log_path = args.log or f"{args.output}.log.json"
    with open(log_path, "w", encoding="utf-8") as fh:
        json.dump(info, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"{args.method}: objective={info['objective']:.6f} "
          f"(rel={info['rel']:.6f}, TUDiv={info['tudiv']:.1f}, "
          f"TIDiv={info['tidiv']:.1f}) in {info['wall_time_s']:.2f}s -> {args.output}")
    return 0


def _evaluate_solution(graph, user_types, item_cats, thresholds, args,
                       sol: Solution) -> m.MetricsReport:
    k = args.cutoff
    lists = sol.ranked_lists(k)
    report = m.MetricsReport(cutoff=k or 0)
    report.relevance_sum = sol.relevance()
    report.aggregate_diversity = m.aggregate_diversity(lists, graph.num_items, k)
    report.gini = m.gini(lists, graph.num_items, k)
    if item_cats is not None:
        report.ild = m.ild(lists, item_cats, k)
        intent = m.IntentProfile.from_graph(graph, item_cats)
        report.err_ia = m.err_ia(lists, intent, item_cats, k)
        report.userdiv = m.userdiv(sol, item_cats)
        if thresholds is not None:
            report.tudiv = m.tudiv(sol, item_cats, thresholds)
    if user_types is not None:
        report.itemdiv = m.itemdiv(sol, user_types)
        if thresholds is not None:
            report.tidiv = m.tidiv(sol, user_types, thresholds)
    if (
        user_types is not None
        and item_cats is not None
        and user_types.disjoint
        and item_cats.disjoint
    ):
        report.div = m.div_edgewise(sol, user_types, item_cats,
                                    DivParams(args.beta, args.mu))
    if getattr(args, "test", None):
        test = dio.load_ratings(args.test)
        item_index = {iid: i for i, iid in enumerate(graph.item_ids)}
        user_index = {uid: u for u, uid in enumerate(graph.user_ids)}
        relevant: dict[int, set[int]] = {}
        for user, item, rating in test.triples:
            u = user_index.get(user)
            if u is None:
                continue
            relevant.setdefault(u, set())
            if rating >= args.relevance_cutoff and item in item_index:
                relevant[u].add(item_index[item])
        if relevant:
            report.precision = m.precision(
                lists, relevant, graph.display_constraints, k
            )
    return report


def _solution_from_file(graph, user_types, item_cats, path) -> Solution:
    edge_of = {(e.user, e.item): e.index for e in graph.edges}
    user_index = {uid: u for u, uid in enumerate(graph.user_ids)}
    item_index = {iid: i for i, iid in enumerate(graph.item_ids)}
    sol = new_solution(graph, user_types, item_cats)
    for uid, rows in dio.load_solution_lists(path).items():
        if uid not in user_index:
            raise RecdivError(f"solution user {uid!r} not in candidate graph")
        u = user_index[uid]
        for iid, _rel in rows:
            if iid not in item_index or (u, item_index[iid]) not in edge_of:
                raise RecdivError(
                    f"solution edge ({uid},{iid}) not in candidate graph"
                )
            sol.add_edge(edge_of[(u, item_index[iid])])
    return sol


def cmd_evaluate(args) -> int:
    graph = _load_graph(args)
    user_types, item_cats = _load_groupings(args, graph)
    thresholds = None
    if args.thresholds and user_types is not None and item_cats is not None:
        thresholds = dio.load_thresholds(
            args.thresholds, graph.user_ids, graph.item_ids,
            user_types.group_ids, item_cats.group_ids,
        )
    sol = _solution_from_file(graph, user_types, item_cats, args.solution)
    report = _evaluate_solution(graph, user_types, item_cats, thresholds, args, sol)
    prefix = args.output
    with open(f"{prefix}.json", "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    with open(f"{prefix}.csv", "w", encoding="utf-8") as fh:
        fh.write(",".join(report.csv_header()) + "\n")
        fh.write(report.to_csv_row() + "\n")
    print(f"wrote {prefix}.json and {prefix}.csv")
    return 0


def _parse_grid(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x != ""]


def _grid_point(payload):
    """Worker for one grid setting; rebuilds inputs from paths so settings
    share no mutable state."""
    args, beta, mu, lam = payload
    graph = _load_graph(args)
    user_types, item_cats = _load_groupings(args, graph)
    thresholds = ThresholdTable()
    if args.method in ("greedy", "flow"):
        thresholds = _load_or_derive_thresholds(args, graph, user_types, item_cats)
    sol, info = _run_method(
        graph, user_types, item_cats, thresholds, args, args.method, beta, mu, lam
    )
    args.beta, args.mu = beta, mu
    report = _evaluate_solution(graph, user_types, item_cats, thresholds, args, sol)
    return beta, mu, lam, info, report


def cmd_gridsearch(args) -> int:
    if args.method in ("mmr", "xquad"):
        settings = [(args, 0.0, 0.0, lam) for lam in _parse_grid(args.lambda_grid)]
    else:
        settings = [
            (args, beta, mu, 0.0)
            for beta in _parse_grid(args.beta_grid)
            for mu in _parse_grid(args.mu_grid)
        ]
    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_grid_point, settings))
    else:
        results = [_grid_point(s) for s in settings]

    best_tu = max(results, key=lambda r: (r[4].tudiv if r[4].tudiv is not None else 0.0))
    best_ti = max(results, key=lambda r: (r[4].tidiv if r[4].tidiv is not None else 0.0))
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write("beta,mu,lambda,objective,flag," +
                 ",".join(results[0][4].csv_header()) + "\n")
        for beta, mu, lam, info, report in results:
            flags = []
            if (beta, mu, lam) == best_tu[:3]:
                flags.append("max_tudiv")
            if (beta, mu, lam) == best_ti[:3]:
                flags.append("max_tidiv")
            fh.write(f"{beta},{mu},{lam},{info['objective']},{'|'.join(flags)}," +
                     report.to_csv_row() + "\n")
    print(f"wrote {len(results)} grid rows to {args.output}")
    return 0


def cmd_report(args) -> int:
    """Merge evaluate/gridsearch JSON reports into one CSV table."""
    rows = []
    for path in args.inputs:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        payload["source"] = Path(path).name
        rows.append(payload)
    fields = ["source", "cutoff"] + m.REPORT_FIELDS
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(
                "" if row.get(f) is None else str(row.get(f)) for f in fields
            ) + "\n")
    print(f"wrote {len(rows)} rows to {args.output}")
    return 0


# ---------------------------------------------------------------------------
# Argument parsing

def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--candidates", required=True, help="candidate TSV (user, item, relevance)")
    p.add_argument("--constraint", type=int, default=10, help="uniform display constraint")
    p.add_argument("--constraint-file", help="per-user TSV (user_id, constraint)")
    p.add_argument("--top-n", type=int, default=250, help="candidates kept per user")
    p.add_argument("--categories", help="item category TSV")
    p.add_argument("--types", help="user type TSV")


def _add_method_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--thresholds", help="threshold TSV (else derived from --train)")
    p.add_argument("--train", help="training ratings for threshold derivation")
    p.add_argument("--cost-scale", type=int, default=10**6)


def _add_eval_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--test", help="held-out test ratings")
    p.add_argument("--cutoff", type=int, default=None, help="rank cutoff k")
    p.add_argument("--relevance-cutoff", type=float, default=3.0,
                   help="test rating considered relevant at or above this value")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recdiv",
        description="Two-sided diversification of recommendation subgraphs",
    )
    parser.add_argument("--config", help="JSON file of default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="split ratings into train/test folds")
    p.add_argument("--ratings", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--min-ratings", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("derive-thresholds", help="derive diversity thresholds from training data")
    _add_graph_args(p)
    p.add_argument("--train", required=True)
    p.add_argument("--thresholds", help=argparse.SUPPRESS, default=None)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_derive_thresholds)

    p = sub.add_parser("diversify", help="select a diversified subgraph")
    _add_graph_args(p)
    _add_method_args(p)
    p.add_argument("--output", required=True)
    p.add_argument("--log", help="JSON log path (default <output>.log.json)")
    p.set_defaults(func=cmd_diversify)

    p = sub.add_parser("evaluate", help="evaluate a solution file")
    _add_graph_args(p)
    _add_eval_args(p)
    p.add_argument("--solution", required=True)
    p.add_argument("--thresholds")
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--output", required=True, help="output prefix (.json/.csv added)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gridsearch", help="evaluate a parameter grid")
    _add_graph_args(p)
    _add_method_args(p)
    _add_eval_args(p)
    p.add_argument("--beta-grid", default="0,1")
    p.add_argument("--mu-grid", default="0,1")
    p.add_argument("--lambda-grid", default="0,0.5,1")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("report", help="merge evaluation JSON files into a CSV table")
    p.add_argument("--inputs", nargs="+", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if not args.config:
        return
    with open(args.config, encoding="utf-8") as fh:
        config = json.load(fh)
    if not isinstance(config, dict):
        raise RecdivError("config file must contain a JSON object")
    defaults = vars(parser.parse_args([args.command] + _required_stub(args)))
    for key, value in config.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) == defaults.get(attr):
            setattr(args, attr, value)


def _required_stub(args: argparse.Namespace) -> list[str]:
    """Minimal flag list so defaults can be introspected for the chosen
    subcommand (required flags re-use the already parsed values)."""
    stub = []
    for name in ("ratings", "output_dir", "candidates", "train", "output",
                 "solution", "method"):
        if getattr(args, name, None) is not None:
            stub += ["--" + name.replace("_", "-"), str(getattr(args, name))]
    if getattr(args, "inputs", None):
        stub += ["--inputs"] + list(args.inputs)
    return stub


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_config(parser, args)
        return args.func(args)
    except (InfeasibleError, InstanceTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (RecdivError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
