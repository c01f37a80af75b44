"""Command-line surface: grow chains, run verification suites, enumerate.

Exit codes: 0 success, 1 usage or configuration error, 2 growth refused
because the log-concavity hypothesis fails, 3 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional

from . import __version__
from ._rand import derive_rng
from .compositions import as_fraction
from .errors import DomainError, HorizonError, ParseError, Refused, TreegrowError
from .oracle import (enumerate_plane_trees, enumerate_subtrees, goodness_of_fit, sg_law,
                     st_law, kernel_interchange_check)
from .sgtrees import (WeightSequence, check_ratio_chain, check_tp2_array, check_toeplitz_tp2,
                      compute_tables, growth_kernel_row, is_log_concave, GrowthChain)
from .subtree_model import (SubtreeChain, SummableTheta, bij_P, bij_P_inv, nested_coupling_law,
                            nested_thresholds, sigma_rule, subset_distribution,
                            shuffle_invariance_check)
from .treespace import (format_tree, is_bouquet_addition,
                        is_right_leaning_leaf_addition, parse_tree, to_dot, word_to_text)

SUITES = ("tables", "tp2", "ratio-chain", "kernel-interchange", "bijection",
          "subset-coupling", "shuffle-invariance", "stats")


def parse_rational_list(text: str) -> List[Fraction]:
    try:
        return [as_fraction(tok.strip()) for tok in text.split(",") if tok.strip()]
    except DomainError as exc:
        raise ParseError(str(exc)) from None


def parse_config_file(path: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _fill_from_config(args, casts: Dict[str, object]):
    if not getattr(args, "config", None):
        return
    cfg = parse_config_file(args.config)
    for key, cast in casts.items():
        if getattr(args, key, None) is None and key in cfg:
            setattr(args, key, cast(cfg[key]))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="treegrow",
                                     description="grow exactly-coupled random trees and verify the machinery")
    parser.add_argument("--version", action="version", version=f"treegrow {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    grow = sub.add_parser("grow", help="sample one nested growth trace")
    grow.add_argument("--model", choices=("sg", "sg-arith", "subtree"))
    grow.add_argument("--w", help="offspring weights, comma-separated exact rationals")
    grow.add_argument("--theta", help="type weights for the subtree model")
    grow.add_argument("--d", type=int, help="bouquet size (sg-arith)")
    grow.add_argument("--n", type=int, help="target number of vertices")
    grow.add_argument("--seed", type=int, help="master seed")
    grow.add_argument("--out", help="trace file (JSON lines)")
    grow.add_argument("--decimal", action="store_true", help="add lossy decimal probabilities to the trace")
    grow.add_argument("--config", help="key=value config file; flags win")

    verify = sub.add_parser("verify", help="run an exact or statistical verification suite")
    verify.add_argument("--suite", choices=SUITES)
    verify.add_argument("--w")
    verify.add_argument("--theta")
    verify.add_argument("--d", type=int)
    verify.add_argument("--n-max", dest="n_max", type=int)
    verify.add_argument("--seed", type=int)
    verify.add_argument("--samples", type=int, help="sample count for the stats suite")
    verify.add_argument("--out", help="write the JSON report here as well")
    verify.add_argument("--config")

    enum = sub.add_parser("enumerate", help="list small trees exhaustively")
    enum.add_argument("--plane-trees", dest="plane_trees", type=int)
    enum.add_argument("--subtrees", type=int)
    enum.add_argument("--arith-trees", dest="arith_trees", type=int)
    enum.add_argument("--d", type=int, default=1)
    enum.add_argument("--dmax", type=int, default=2)
    enum.add_argument("--dot", action="store_true", help="emit DOT per object")
    return parser


# ---------------------------------------------------------------------------
# grow


def cmd_grow(args) -> int:
    _fill_from_config(args, {"model": str, "w": str, "theta": str, "d": int,
                             "n": int, "seed": int, "out": str})
    if args.model is None:
        print("error: --model is required", file=sys.stderr)
        return 1
    if args.n is None:
        print("error: --n is required", file=sys.stderr)
        return 1
    seed = args.seed if args.seed is not None else 0
    records: List[dict] = []
    try:
        if args.model in ("sg", "sg-arith"):
            if not args.w:
                print("error: --w is required for tree models", file=sys.stderr)
                return 1
            d = args.d if args.d is not None else 1
            if args.model == "sg" and d != 1:
                print("error: the sg model has d = 1; use sg-arith", file=sys.stderr)
                return 1
            w = WeightSequence(parse_rational_list(args.w))
            chain = GrowthChain(w, d=d, horizon=args.n, rng=derive_rng(seed, "chain"))
            records.append({"step": 0, "n": 1, "new_vertices": ["e"], "tree": "e", "prob": "1"})
            while chain.n + d <= args.n:
                step = chain.step()
                rec = {"step": step.index, "n": step.n,
                       "new_vertices": [word_to_text(u) for u in step.new_vertices],
                       "tree": format_tree(chain.tree()), "prob": str(step.prob)}
                if args.decimal:
                    rec["prob_decimal"] = float(step.prob)
                records.append(rec)
                print(f"step {step.index}: +{','.join(word_to_text(u) for u in step.new_vertices)}")
        else:
            if not args.theta:
                print("error: --theta is required for the subtree model", file=sys.stderr)
                return 1
            theta = SummableTheta(parse_rational_list(args.theta))
            chain = SubtreeChain(theta, horizon=args.n, seed=seed)
            records.append({"step": 0, "n": 1, "new_vertex": "e", "subtree": "e"})
            while chain.n < args.n:
                new = chain.step()
                records.append({"step": chain.n - 1, "n": chain.n,
                                "new_vertex": word_to_text(new),
                                "subtree": format_tree(chain.subtree())})
                print(f"step {chain.n - 1}: +{word_to_text(new)}")
    except Refused as exc:
        print(f"refused: {exc} (index {exc.witness})", file=sys.stderr)
        return 2
    except (DomainError, HorizonError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            for rec in records:
                handle.write(json.dumps(rec, sort_keys=True) + "\n")
        validate_trace(args.out, args.model, args.d if args.d is not None else 1)
    print(f"grew to {records[-1]['n']} vertices in {len(records) - 1} steps (seed {seed})")
    return 0


def validate_trace(path: str, model: str, d: int = 1):
    """Re-validate a trace file: consecutive inclusions plus the growth-shape predicate."""
    with open(path, "r", encoding="utf-8") as handle:
        records = [json.loads(line) for line in handle if line.strip()]
    if not records:
        raise ParseError(f"{path}: empty trace")
    if model in ("sg", "sg-arith"):
        trees = [parse_tree(rec["tree"], kind="plane") for rec in records]
        for before, after in zip(trees, trees[1:]):
            ok = (is_right_leaning_leaf_addition(before, after) if d == 1
                  else is_bouquet_addition(before, after, d))
            if not ok:
                raise DomainError(f"{path}: consecutive trees are not a right-leaning addition")
    else:
        subs = [parse_tree(rec["subtree"], kind="subtree") for rec in records]
        for before, after in zip(subs, subs[1:]):
            if not (before.vertices < after.vertices and len(after) == len(before) + 1):
                raise DomainError(f"{path}: consecutive subtrees are not one-leaf inclusions")


# ---------------------------------------------------------------------------
# verify


def _suite_tables(args) -> dict:
    w = WeightSequence(parse_rational_list(args.w or "1,1,1,1,1,1,1,1"))
    d = args.d or 1
    n_max = args.n_max or 7
    tables = compute_tables(w, d, N=n_max + d)
    failures = []
    checked = 0
    for n in range(1, n_max + 1):
        if n % d != 1 % d:
            continue
        checked += 1
        enumerated = sum(_omega(w, tree) for tree in enumerate_plane_trees(n, d))
        if enumerated != tables.b_value(n):
            failures.append({"n": n, "recursion": str(tables.b_value(n)),
                             "enumeration": str(enumerated)})
    if d == 1:
        arith = compute_tables(w, 1, N=n_max + 1, method="arithmetic")
        for n in range(1, n_max + 2):
            checked += 1
            if arith.b_value(n) != tables.b_value(n):
                failures.append({"n": n, "kind": "reduction-mismatch"})
    return {"suite": "tables", "checked": checked, "ok": not failures, "failures": failures}


def _omega(w, tree) -> Fraction:
    mass = Fraction(1)
    for u in tree.vertices:
        mass *= w[tree.children_count(u)]
    return mass


def _suite_tp2(args) -> dict:
    w = WeightSequence(parse_rational_list(args.w or "1,1,1,1,1,1,1,1"))
    d = args.d or 1
    n_max = args.n_max or 10
    lc = is_log_concave(w.progression(d))
    toeplitz = check_toeplitz_tp2(w.progression(d), window=min(n_max, 8))
    tables = compute_tables(w, d, N=n_max + 1)
    array_report = check_tp2_array(tables)
    ok = lc.ok and toeplitz.ok and array_report.ok
    return {"suite": "tp2", "ok": ok, "log_concave": lc.ok, "witness": lc.witness,
            "toeplitz": toeplitz.as_dict(), "array": array_report.as_dict()}


def _suite_ratio_chain(args) -> dict:
    w = WeightSequence(parse_rational_list(args.w or "1,3,3,1"))
    d = args.d or 1
    n_max = args.n_max or 10
    tables = compute_tables(w, d, N=(n_max + 2) * d + 1, method="arithmetic" if d > 1 else None)
    report = check_ratio_chain(tables, n_max=n_max)
    return {"suite": "ratio-chain", **report.as_dict()}


def _suite_kernel_interchange(args) -> dict:
    w = WeightSequence(parse_rational_list(args.w or "1,1,1,1,1,1,1"))
    d = args.d or 1
    n_max = args.n_max or 6
    tables = compute_tables(w, d, N=n_max + d)
    results = []
    ok = True
    n = 1
    while n + d <= n_max + d and n <= n_max:
        law_lo = sg_law(w, d, n)
        law_hi = sg_law(w, d, n + d)
        report = kernel_interchange_check(lambda t: growth_kernel_row(tables, t), law_lo, law_hi)
        ok = ok and report.ok
        results.append({"n": n, **report.as_dict()})
        n += d
    return {"suite": "kernel-interchange", "ok": ok, "levels": results}


def _suite_bijection(args) -> dict:
    n_max = args.n_max or 5
    failures = []
    checked = 0
    for n in range(1, n_max + 1):
        for tau in enumerate_subtrees(n, dmax=3):
            checked += 1
            tree, decorations = bij_P(tau)
            back = bij_P_inv(tree, decorations)
            if back != tau:
                failures.append({"n": n, "tau": format_tree(tau)})
    return {"suite": "bijection", "checked": checked, "ok": not failures, "failures": failures}


def _suite_subset_coupling(args) -> dict:
    theta = SummableTheta(parse_rational_list(args.theta or "2,1"))
    law = nested_coupling_law(theta)
    failures = []
    thresholds = nested_thresholds(theta)
    for a, b in zip(thresholds, thresholds[1:]):
        if a > b:
            failures.append({"kind": "threshold-monotonicity", "lhs": str(a), "rhs": str(b)})
    for k in range(0, theta.n_support + 1):
        marginal: Dict[frozenset, Fraction] = {}
        for seq, mass in law.items():
            key = frozenset(seq[:k])
            marginal[key] = marginal.get(key, Fraction(0)) + mass
        target = subset_distribution(theta, k)
        if marginal != target:
            failures.append({"kind": "marginal-mismatch", "k": k})
    return {"suite": "subset-coupling", "ok": not failures, "failures": failures}


def _suite_shuffle_invariance(args) -> dict:
    n_max = min(args.n_max or 4, 4)
    w = WeightSequence(parse_rational_list(args.w or "1,2,1"))
    nu = {(1, 2): Fraction(1, 2), (2, 1): Fraction(1, 2)}

    def rule(tree, x, u):
        return sigma_rule(tree.children_count(u), x[u])

    report = shuffle_invariance_check(w, nu, rule, n_max)
    return {"suite": "shuffle-invariance", **report.as_dict()}


def _suite_stats(args) -> dict:
    seed = args.seed if args.seed is not None else 0
    samples = args.samples or 10_000
    results = []
    ok = True
    if args.theta:
        theta = SummableTheta(parse_rational_list(args.theta))
        target_n = args.n_max or 4
        law = st_law(theta, target_n)
        counts: Dict[frozenset, int] = {}
        for i in range(samples):
            chain = SubtreeChain(theta, horizon=target_n, seed=derive_rng(seed, "battery", i).getrandbits(63))
            while chain.n < target_n:
                chain.step()
            key = chain.subtree()
            counts[key] = counts.get(key, 0) + 1
        report = goodness_of_fit(counts, law)
        ok = report.tv < Fraction(5, 100) and (report.p_value is None or report.p_value > 0.001)
        results.append({"model": "subtree", "n": target_n, **report.as_dict()})
    else:
        w = WeightSequence(parse_rational_list(args.w or "1,1,1,1,1,1"))
        d = args.d or 1
        target_n = args.n_max or (5 if d == 1 else d + 1)
        law = sg_law(w, d, target_n)
        tables = compute_tables(w, d, N=target_n)
        counts: Dict[object, int] = {}
        for i in range(samples):
            chain = GrowthChain(w, d=d, horizon=target_n, rng=derive_rng(seed, "battery", i),
                                tables=tables)
            while chain.n + d <= target_n:
                chain.step()
            key = chain.tree()
            counts[key] = counts.get(key, 0) + 1
        report = goodness_of_fit(counts, law)
        ok = report.tv < Fraction(5, 100) and (report.p_value is None or report.p_value > 0.001)
        results.append({"model": "sg" if d == 1 else "sg-arith", "n": target_n, **report.as_dict()})
    return {"suite": "stats", "ok": ok, "runs": results}


def cmd_verify(args) -> int:
    _fill_from_config(args, {"suite": str, "w": str, "theta": str, "d": int,
                             "n_max": int, "seed": int, "samples": int})
    if args.suite is None:
        print("error: --suite is required", file=sys.stderr)
        return 1
    runners = {
        "tables": _suite_tables,
        "tp2": _suite_tp2,
        "ratio-chain": _suite_ratio_chain,
        "kernel-interchange": _suite_kernel_interchange,
        "bijection": _suite_bijection,
        "subset-coupling": _suite_subset_coupling,
        "shuffle-invariance": _suite_shuffle_invariance,
        "stats": _suite_stats,
    }
    try:
        report = runners[args.suite](args)
    except Refused as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 2
    except TreegrowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(report, indent=2, sort_keys=True, default=str)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    return 0 if report.get("ok", False) else 3


# ---------------------------------------------------------------------------
# enumerate


def cmd_enumerate(args) -> int:
    try:
        if args.plane_trees is not None:
            trees = enumerate_plane_trees(args.plane_trees, 1)
        elif args.arith_trees is not None:
            trees = enumerate_plane_trees(args.arith_trees, args.d)
        elif args.subtrees is not None:
            trees = enumerate_subtrees(args.subtrees, dmax=args.dmax)
        else:
            print("error: pass --plane-trees, --subtrees or --arith-trees", file=sys.stderr)
            return 1
    except HorizonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for tree in trees:
        print(format_tree(tree))
        if args.dot:
            print(to_dot(tree))
    print(f"count: {len(trees)}")
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; exit code 2 is reserved here for
        # refused growth hypotheses, so usage problems map to 1
        return 1 if exc.code else 0
    try:
        if args.command == "grow":
            return cmd_grow(args)
        if args.command == "verify":
            return cmd_verify(args)
        if args.command == "enumerate":
            return cmd_enumerate(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
