"""Command-line interface: gen, solve, prove, tonicity, counterexample,
campaign.

Exit codes: 0 on success, 1 when a check finds a violation, 2 on usage or
config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import asdict

from . import harness
from .generators import KINDS, GenSpec, generate
from .geometry import (
    StripError,
    format_instance,
    is_k_tonic,
    read_instance,
    tonicity_profile,
)
from .oracle import held_karp
from .prover import DEFAULT_DELTA, DEFAULT_EPSILON, load_cases, prove_case
from .tonicity import reduce_tonicity, tonicity_bound_integer
from .harness import ConfigError


def _cmd_gen(args) -> int:
    spec = GenSpec(args.kind, args.n, args.delta, args.seed, args.density)
    text = format_instance(generate(spec))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve(args) -> int:
    inst = read_instance(args.input)
    params = {}
    if args.algo == "strip-dp":
        for name in ("c1", "cstar", "tau", "block_cap", "far_cap"):
            v = getattr(args, name)
            if v is not None:
                params[name] = v
    tour, length, elapsed = harness.run_algorithm(args.algo, inst, params)
    print(f"algorithm: {args.algo}")
    print(f"length: {length!r}")
    print(f"tour: {' '.join(map(str, tour.order))}")
    print(f"elapsed: {elapsed:.3f}s")
    if args.report:
        rep = harness.RunReport(
            harness.REPORT_SCHEMA, "solve", args.algo,
            harness.instance_digest(inst), len(inst), inst.delta,
            length, list(tour.order), elapsed, params,
        )
        with open(args.report, "w") as fh:
            json.dump(asdict(rep), fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_prove(args) -> int:
    if (args.nleft, args.nright) not in load_cases():
        raise ConfigError(f"no case ({args.nleft}, {args.nright})")
    report = prove_case(
        args.nleft, args.nright, args.delta, args.epsilon,
        keep_certificates=args.out is not None,
    )
    print(f"case ({args.nleft}, {args.nright}): {report.verdict}")
    fails = sum(o.verdict == "FAIL" for o in report.outcomes)
    print(f"scenarios: {len(report.outcomes)}, failing: {fails}")
    if args.out:
        scenarios = []
        for o in report.outcomes:
            witness = None
            if o.verdict == "SUCCESS" and o.certificates:
                # the winning replacement on the shallowest proven box
                depth, ilo, winner = min(o.certificates)
                witness = _winning_edges(o.scenario, winner)
            scenarios.append(
                {
                    "x_assign": list(o.scenario.x),
                    "y_ranges": [[0.0, args.delta]] * len(o.scenario.x),
                    "verdict": o.verdict,
                    "witness": witness,
                    "boxes_proven": o.boxes_proven,
                    "boxes_failed": o.boxes_failed,
                    "coverage_exact": o.coverage_exact,
                }
            )
        with open(args.out, "w") as fh:
            json.dump(
                {
                    "case": [args.nleft, args.nright],
                    "delta": args.delta,
                    "epsilon": args.epsilon,
                    "verdict": report.verdict,
                    "scenarios": scenarios,
                },
                fh,
                indent=2,
            )
            fh.write("\n")
    return 0 if report.verdict == "SUCCESS" else 1


def _winning_edges(sc, winner: int) -> list[list[int]]:
    from .prover import generate_replacements

    degrees: dict[int, int] = {v: 0 for v in range(len(sc.x))}
    for a, b in sc.f_bar:
        degrees[a] += 1
        degrees[b] += 1
    cands = [
        F
        for F in generate_replacements(sc.pattern, len(sc.x), degrees)
        if tuple(sorted(sc.f_bar)) != F and set(F) - set(sc.f_bar)
    ]
    return [list(e) for e in cands[winner]]


def _cmd_tonicity(args) -> int:
    inst = read_instance(args.input)
    tour, length = held_karp(inst)
    profile = tonicity_profile(inst, tour.edges())
    print(f"optimal length: {length!r}")
    print(f"profile: {' '.join(map(str, profile))}")
    bound = 2 * args.k if args.k is not None else tonicity_bound_integer(inst.delta)
    print(f"bound: {bound} crossings per separator")
    red = reduce_tonicity(inst, tour)
    for e1, e2 in red.swaps:
        print(f"swap: {e1[0]}-{e1[1]} x {e2[0]}-{e2[1]}")
    final = tonicity_profile(inst, red.tour.edges())
    print(f"reduced profile: {' '.join(map(str, final))}")
    print(f"reduced length: {red.length!r}")
    ok = is_k_tonic(inst, red.tour, bound) and red.length <= length + 1e-9
    print(f"within bound: {'yes' if ok else 'NO'}")
    return 0 if ok else 1


def _cmd_counterexample(args) -> int:
    res = harness.counterexample_search(args.delta)
    if res.found:
        print(f"counterexample found, gap = {res.gap!r}")
        print(f"bitonic: {res.bitonic_length!r}  optimal: {res.optimal_length!r}")
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(format_instance(res.instance))
    else:
        print("no counterexample in the family")
    threshold = 2.0 * math.sqrt(2.0)
    ok = res.found == (args.delta > threshold + 1e-12)
    if not ok:
        print(f"UNEXPECTED for delta relative to 2*sqrt(2) = {threshold!r}")
    return 0 if ok else 1


def _cmd_campaign(args) -> int:
    t0 = time.perf_counter()
    result = harness.campaign(args.config)
    print(f"runs: {result.runs}")
    print(f"violations: {result.violations}")
    print(f"report: {result.report_path}")
    print(f"elapsed: {time.perf_counter() - t0:.1f}s")
    return 1 if result.violations else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="striptsp", description="exact TSP tools for narrow strips"
    )
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded instance")
    g.add_argument("--kind", choices=KINDS, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--delta", type=float, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--density", type=int, default=2, help="sparse window cap")
    g.add_argument("--out", help="output file (default: stdout)")
    g.set_defaults(func=_cmd_gen)

    s = sub.add_parser("solve", help="run one solver on an instance file")
    s.add_argument("--input", required=True)
    s.add_argument("--algo", choices=harness.ALGORITHMS, default="strip-dp")
    s.add_argument("--c1", type=float)
    s.add_argument("--cstar", type=int)
    s.add_argument("--tau", type=int)
    s.add_argument("--block-cap", type=int, dest="block_cap")
    s.add_argument("--far-cap", type=int, dest="far_cap")
    s.add_argument("--report", help="write a JSON run report here")
    s.set_defaults(func=_cmd_solve)

    pr = sub.add_parser("prove", help="run one branch-and-bound case")
    pr.add_argument("--nleft", type=int, choices=(2, 3, 4), required=True)
    pr.add_argument("--nright", type=int, choices=(2, 3), required=True)
    pr.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    pr.add_argument("--delta", type=float, default=DEFAULT_DELTA)
    pr.add_argument("--out", help="write the scenario report JSON here")
    pr.set_defaults(func=_cmd_prove)

    t = sub.add_parser("tonicity", help="profile and reduce the optimal tour")
    t.add_argument("--input", required=True)
    t.add_argument("--k", type=int, help="target k (default: integer-x bound)")
    t.set_defaults(func=_cmd_tonicity)

    c = sub.add_parser("counterexample", help="search the 5-point family")
    c.add_argument("--delta", type=float, required=True)
    c.add_argument("--out", help="write the found instance here")
    c.set_defaults(func=_cmd_counterexample)

    ca = sub.add_parser("campaign", help="run a TOML validation campaign")
    ca.add_argument("--config", required=True)
    ca.set_defaults(func=_cmd_campaign)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, StripError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
