"""Command-line interface.

Subcommands: gen, stats, exact, mc, limit, test. Every command is
deterministic given its full flag set; --seed defaults to a fixed
constant so casual runs reproduce, and --seed random opts into entropy
(the chosen seed is echoed in the output either way).

Exit codes: 0 success, 1 I/O or input data failure, 2 usage, 3 exact
cap exceeded. The environment variable TREESHAPE_EXACT_CAP overrides
the joint-pmf size cap.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__, exact, limits, models, montecarlo, stats, trees
from .errors import CapExceededError

DEFAULT_SEED = 20060616
F_PRECISION = 6  # decimal places for float columns in CSV output


def _parse_seed(text: str) -> int:
    if text == "random":
        seed = int(np.random.SeedSequence().generate_state(1)[0])
        print(f"seed: {seed}", file=sys.stderr)
        return seed
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _n_list(text: str) -> list[int]:
    return [_positive(part) for part in text.split(",")]


def _open_out(path: str | None):
    return open(path, "w") if path and path != "-" else sys.stdout


def _open_in(path: str | None):
    return open(path) if path and path != "-" else sys.stdin


def _report_json(schema: str, seed: int, payload: dict, params: dict) -> str:
    doc = {"schema": schema, "version": __version__, "seed": seed, "params": params}
    doc.update(payload)
    return json.dumps(doc, indent=2)


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="treeshape",
        description="Random phylogenetic trees: generation, balance statistics, "
        "exact oracles, Monte Carlo moments, and limit-law samplers.",
    )
    top.add_argument("--version", action="version", version=f"treeshape {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate random trees")
    p.add_argument("--model", required=True, choices=["yule", "uniform"])
    p.add_argument("--n", required=True, type=_positive, help="number of leaves")
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED)
    p.add_argument("--format", choices=["newick", "json"], default="newick")
    p.add_argument("--out", default="-")

    p = sub.add_parser("stats", help="statistics of trees read from a file or stdin")
    p.add_argument("--in", dest="infile", default="-", help="newick, one per line")
    p.add_argument("--format", choices=["newick", "json"], default="newick")
    p.add_argument("--out", default="-")

    p = sub.add_parser("exact", help="exact rational quantities")
    p.add_argument(
        "--what",
        required=True,
        choices=["mean-sackin", "mean-colless", "joint-pmf", "k-pmf", "khat-pmf", "root-min"],
    )
    p.add_argument("--n", required=True, type=_positive)
    p.add_argument("--model", choices=["yule", "uniform"], default="yule",
                   help="model for joint-pmf")
    p.add_argument("--out", default="-")

    p = sub.add_parser("mc", help="Monte Carlo moment estimation")
    p.add_argument("--model", required=True, choices=["yule", "uniform"])
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=_positive)
    group.add_argument("--n-list", type=_n_list, help="comma-separated, ascending")
    p.add_argument("--reps", required=True, type=_positive)
    p.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out", default="-")

    p = sub.add_parser("limit", help="limit-law constants and samplers")
    p.add_argument(
        "--what",
        required=True,
        choices=["moments", "pairs", "airy-excursion", "airy-dyck"],
    )
    p.add_argument("--samples", type=_positive, default=1000)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--depth", type=int, help="exact unrolling depth (<= 22)")
    group.add_argument("--via-n", type=_positive, dest="via_n",
                       help="sample through the finite-n recursion at this n")
    p.add_argument("--steps", type=_positive, default=2**14,
                   help="grid steps (excursion) or half-length (dyck)")
    p.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--out", default="-")

    p = sub.add_parser("test", help="balance test of one tree against a null model")
    p.add_argument("--null", required=True, choices=["yule", "uniform"])
    p.add_argument("--reps", type=_positive, default=1000)
    p.add_argument("--seed", type=_parse_seed, default=DEFAULT_SEED)
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--in", dest="infile", default="-", help="newick tree")
    p.add_argument("--out", default="-")
    return top


def cmd_gen(args) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
    out = _open_out(args.out)
    try:
        if args.format == "newick":
            for _ in range(args.count):
                tree = models.generate(args.n, models.ModelKind(args.model), rng)
                out.write(trees.emit_newick(tree) + "\n")
        else:
            forest = [
                models.generate(args.n, models.ModelKind(args.model), rng).to_json_obj()
                for _ in range(args.count)
            ]
            out.write(json.dumps(forest) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_stats(args) -> int:
    src = _open_in(args.infile)
    out = _open_out(args.out)
    try:
        out.write("n,sackin,colless,minsum,fstat\n")
        if args.format == "json":
            text = src.read().strip()
            forest = json.loads(text) if text else []
            if isinstance(forest, dict):
                forest = [forest]
            parsed = [trees.PhyloTree.from_json_obj(obj) for obj in forest]
        else:
            parsed = []
            for lineno, line in enumerate(src, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    parsed.append(trees.parse_newick(line))
                except trees.NewickError as err:
                    print(f"line {lineno}: {err}", file=sys.stderr)
                    return 1
        for tree in parsed:
            st = stats.tree_stats(tree)
            out.write(
                f"{st.n},{st.sackin},{st.colless},{st.min_split_sum},"
                f"{st.f_stat:.{F_PRECISION}f}\n"
            )
    finally:
        if src is not sys.stdin:
            src.close()
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_exact(args) -> int:
    n = args.n
    cap = int(os.environ.get("TREESHAPE_EXACT_CAP", exact.DEFAULT_JOINT_CAP))
    if args.what == "mean-sackin":
        payload = {"value": exact.fraction_str(exact.mean_sackin_yule(n))}
    elif args.what == "mean-colless":
        payload = {"value": exact.fraction_str(exact.mean_colless_yule(n))}
    elif args.what == "joint-pmf":
        pmf = exact.joint_pmf(n, models.ModelKind(args.model), cap=cap)
        payload = {"model": args.model, "pmf": exact.joint_pmf_json(pmf)}
    elif args.what == "k-pmf":
        payload = {"pmf": exact.pmf_json(exact.k_pmf(n))}
    elif args.what == "khat-pmf":
        payload = {"pmf": exact.pmf_json(exact.khat_pmf(n))}
    else:  # root-min
        value = exact.expected_root_min_catalan(n)
        payload = {
            "value": exact.fraction_str(value)
            if not isinstance(value, float)
            else value
        }
    out = _open_out(args.out)
    try:
        doc = {"schema": "treeshape.exact/1", "version": __version__,
               "what": args.what, "n": n}
        doc.update(payload)
        out.write(json.dumps(doc, indent=2) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


_MC_COLS = [
    "model", "n", "reps", "seed", "mean_s", "mean_c", "var_s", "var_c",
    "cov_sc", "cor_sc", "se_mean_s", "se_mean_c", "se_var_s", "se_var_c",
    "se_cov_sc", "se_cor_sc", "elapsed_s",
]
_LIMIT_COLS = ["limit_var_s", "limit_var_c", "limit_cov_sc", "limit_cor_sc"]


def _mc_csv_row(report: montecarlo.MomentsReport, constants) -> str:
    d = report.to_dict()
    cells = []
    for col in _MC_COLS:
        v = d[col]
        cells.append(f"{v:.{F_PRECISION}f}" if isinstance(v, float) else str(v))
    for v in constants:
        cells.append(f"{v:.{F_PRECISION}f}")
    return ",".join(cells)


def cmd_mc(args) -> int:
    model = models.ModelKind(args.model)
    lm = limits.limit_moments_yule()
    constants = (lm.var_s, lm.var_c, lm.cov_sc, lm.cor_sc)
    if args.n is not None:
        reports = [montecarlo.estimate_moments(model, args.n, args.reps, args.seed,
                                               args.workers)]
    else:
        reports = montecarlo.convergence_table(model, args.n_list, args.reps,
                                               args.seed, args.workers)
    out = _open_out(args.out)
    try:
        if args.format == "csv":
            out.write(",".join(_MC_COLS + _LIMIT_COLS) + "\n")
            for r in reports:
                out.write(_mc_csv_row(r, constants) + "\n")
        else:
            payload = {"reports": [r.to_dict() for r in reports],
                       "limit_constants": dict(zip(_LIMIT_COLS, constants))}
            out.write(_report_json("treeshape.mc/1", args.seed, payload,
                                   {"model": args.model, "reps": args.reps,
                                    "workers": args.workers}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_limit(args) -> int:
    out = _open_out(args.out)
    try:
        if args.what == "moments":
            lm = limits.limit_moments_yule()
            payload = {"moments": {"var_s": lm.var_s, "var_c": lm.var_c,
                                   "cov_sc": lm.cov_sc, "cor_sc": lm.cor_sc}}
            out.write(_report_json("treeshape.limit/1", args.seed, payload, {}) + "\n")
            return 0
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(args.seed)))
        if args.what == "pairs":
            if args.via_n is not None:
                s, c = limits.sample_limit_via_n(args.samples, args.via_n, args.seed,
                                                 args.workers)
            else:
                depth = args.depth if args.depth is not None else 16
                s, c = limits.sample_limit_pairs(args.samples, depth, rng)
            out.write("s,c\n")
            for a, b in zip(s, c):
                out.write(f"{a:.{F_PRECISION}f},{b:.{F_PRECISION}f}\n")
        else:
            if args.what == "airy-excursion":
                values = limits.sample_airy_excursions(args.samples, args.steps, rng)
            else:
                values = limits.sample_airy_dycks(args.samples, args.steps, rng)
            out.write("a\n")
            for v in values:
                out.write(f"{v:.{F_PRECISION}f}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


def cmd_test(args) -> int:
    src = _open_in(args.infile)
    try:
        text = src.read().strip()
    finally:
        if src is not sys.stdin:
            src.close()
    try:
        tree = trees.parse_newick(text)
    except trees.NewickError as err:
        print(f"input tree: {err}", file=sys.stderr)
        return 1
    report = montecarlo.np_test(tree, models.ModelKind(args.null), args.reps,
                                args.seed, args.workers)
    out = _open_out(args.out)
    try:
        out.write(_report_json("treeshape.test/1", args.seed,
                               {"report": report.to_dict()},
                               {"null": args.null, "reps": args.reps}) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


_COMMANDS = {
    "gen": cmd_gen,
    "stats": cmd_stats,
    "exact": cmd_exact,
    "mc": cmd_mc,
    "limit": cmd_limit,
    "test": cmd_test,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except CapExceededError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except ValueError as err:
        parser.exit(2, f"error: {err}\n")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
