"""Command-line runner: generate instances, run the pipeline, verify, summarise."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import assembly, cleaning, fractional, grids, instances, verify
from .hypergraph import HypergraphError, merge_colours, read_instance, write_instance
from .ledger import load_ledger

REPORT_VERSION = 1


def _gen(args) -> int:
    text = Path(args.spec).read_text() if args.spec else ""
    spec = instances.parse_genspec(
        text, family=args.family, n=args.n, k=args.k, r=args.r, seed=args.seed, p=args.p,
        epsilon=args.epsilon, a=args.A, colouring=args.colouring)
    G, C = instances.generate(spec)
    with open(args.out, "w") if args.out else sys.stdout as fp:
        write_instance(G, C, fp)
    return 0


def _load(path: str):
    with open(path) as fp:
        return read_instance(fp)


def _dumps(args, G, C, ledger, eps) -> None:
    rng = np.random.default_rng(args.seed)
    if args.dump_pfm:
        disc = fractional.discrepant_pfm(G, C, eps, ledger, rng)
        with open(args.dump_pfm, "w") as fp:
            fractional.write_pfm(disc.matching, fp)
    if args.dump_gadgets:
        found, _ = grids.collect_disjoint_gadgets(G, merge_colours(C, 0), eps, ledger.gadget_target, ledger, rng)
        Path(args.dump_gadgets).write_text(grids.gadgets_to_json(found))
    if args.dump_bad:
        merged = merge_colours(C, 0)
        cleaned = cleaning.clean_bicolour(G, merged, ledger.clean_t).cleaned
        report = cleaning.classify_bad(cleaned, cleaning.shadow_colouring(cleaned, merged), eps,
                                       ledger.caps(G.n))
        Path(args.dump_bad).write_text(report.to_json())


def _run(args) -> int:
    ledger = load_ledger(args.ledger)
    G, C = _load(args.instance)
    eps = args.epsilon if args.epsilon is not None else ledger.epsilon
    params = assembly.PipelineParams.from_ledger(ledger, seed=args.seed, epsilon=eps)
    _dumps(args, G, C, ledger, eps)
    try:
        res = assembly.hamilton_with_discrepancy(G, C, params)
    except assembly.PipelineError as exc:
        report = {"version": REPORT_VERSION, "success": False, "seed": args.seed, "n": G.n,
                  "error": str(exc), "failures": exc.diagnostics}
        _emit(args.report, json.dumps(report, sort_keys=True))
        print(f"pipeline failed: {exc}", file=sys.stderr)
        return 1
    check = verify.verify_cycle(G, C, res.cycle)
    report = dict(res.report, version=REPORT_VERSION, success=True, seed=args.seed,
                  verified=check.to_dict())
    _emit(args.report, json.dumps(report, sort_keys=True))
    if args.cycle:
        Path(args.cycle).write_text(" ".join(map(str, res.cycle.vertices)) + "\n")
    return 0


def _emit(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text + "\n")
    else:
        print(text)


def _verify(args) -> int:
    G, C = _load(args.instance)
    rows = [ln.split() for ln in Path(args.structure).read_text().splitlines() if ln.strip()]
    try:
        nums = [[int(v) for v in row] for row in rows]
        if args.kind == "cycle":
            if len(nums) != 1:
                raise verify.VerificationError("a cycle file holds exactly one line")
            rep = verify.verify_cycle(G, C, nums[0])
        elif args.kind == "matching":
            rep = verify.verify_matching(G, C, nums, perfect=not args.partial)
        else:
            rep = verify.verify_forest(G, C, nums)
    except (verify.VerificationError, ValueError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1
    print(json.dumps(rep.to_dict(), sort_keys=True))
    return 0


def _stats(args) -> int:
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(["file", "n", "seed", "success", "surplus", "scaled", "retries", "seconds"])
    ok = 0
    for name in args.reports:
        rep = json.loads(Path(name).read_text())
        good = bool(rep.get("success"))
        ok += good
        ver = rep.get("verified", {})
        secs = sum(rep.get("timings", {}).values())
        out.writerow([name, rep.get("n"), rep.get("seed"), int(good), ver.get("surplus", ""),
                      ver.get("scaled_discrepancy", ""), rep.get("retries", ""), f"{secs:.3f}"])
    print(f"success rate: {ok}/{len(args.reports)}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hamdisc", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a coloured instance")
    g.add_argument("--spec", help="key=value generator file")
    g.add_argument("--family", choices=instances.FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--epsilon", type=float)
    g.add_argument("--A", help="comma-separated split set")
    g.add_argument("--colouring", choices=("random", "mono"))
    g.add_argument("-o", "--out")
    g.set_defaults(func=_gen)

    r = sub.add_parser("run", help="run the Hamilton-cycle pipeline")
    r.add_argument("instance")
    r.add_argument("--ledger")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--epsilon", type=float)
    r.add_argument("--report", help="JSON report path (default stdout)")
    r.add_argument("--cycle", help="write the cycle as one line of vertex ids")
    r.add_argument("--dump-pfm", help="CSV of the discrepant fractional matching")
    r.add_argument("--dump-gadgets", help="JSON list of gadgets for colour 0 against the rest")
    r.add_argument("--dump-bad", help="JSON bad/clean classification of the cleaned shadow")
    r.set_defaults(func=_run)

    v = sub.add_parser("verify", help="audit a structure file")
    v.add_argument("instance")
    v.add_argument("structure")
    v.add_argument("--kind", choices=("cycle", "matching", "forest"), default="cycle")
    v.add_argument("--partial", action="store_true", help="do not require a perfect matching")
    v.set_defaults(func=_verify)

    s = sub.add_parser("stats", help="CSV summary of run reports")
    s.add_argument("reports", nargs="+")
    s.set_defaults(func=_stats)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (HypergraphError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
