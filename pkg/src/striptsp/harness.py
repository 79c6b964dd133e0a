"""Benchmark and cross-validation harness.

Dispatches the solvers on generated instances, runs validation campaigns
from a TOML config, searches the five-point counterexample family, and
writes append-only JSON-lines reports.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .bitonic import bitonic_tsp
from .generators import GenSpec, generate
from .geometry import (
    Point,
    StripInstance,
    Tour,
    format_instance,
    is_k_tonic,
)
from .oracle import enumerate_all_tours, held_karp
from .stripdp import SolverConfig, narrow_rect_tsp
from .tonicity import (
    reduce_tonicity,
    tonicity_bound_integer,
    tonicity_bound_sparse,
)

REPORT_SCHEMA = 1

ALGORITHMS = ("strip-dp", "held-karp", "bitonic")


class ConfigError(ValueError):
    """A malformed generator spec or campaign config."""


def instance_digest(inst: StripInstance) -> str:
    """Stable hash of the instance's file representation."""
    return hashlib.sha256(format_instance(inst).encode()).hexdigest()[:16]


def solver_config(params: dict) -> SolverConfig:
    known = {"c1", "cstar", "tau", "block_cap", "far_cap", "prune"}
    bad = set(params) - known
    if bad:
        raise ConfigError(f"unknown strip-dp parameters: {sorted(bad)}")
    return SolverConfig(**params)


def run_algorithm(
    algo: str, inst: StripInstance, params: dict | None = None
) -> tuple[Tour, float, float]:
    """Run one solver; returns (tour, length, elapsed seconds)."""
    params = params or {}
    t0 = time.perf_counter()
    if algo == "strip-dp":
        tour, length = narrow_rect_tsp(inst, solver_config(params))
    elif algo == "held-karp":
        tour, length = held_karp(inst)
    elif algo == "bitonic":
        tour, length = bitonic_tsp(inst)
    else:
        raise ConfigError(f"unknown algorithm {algo!r}")
    return tour, length, time.perf_counter() - t0


@dataclass
class RunReport:
    """One solver run, ready for JSON-lines serialization."""

    schema: int
    job: str
    algorithm: str
    digest: str
    n: int
    delta: float
    length: float
    tour: list[int]
    elapsed: float
    params: dict = field(default_factory=dict)
    ok: bool = True
    detail: str = ""


# ---------------------------------------------------------------------------
# Counterexample search: five points on two horizontal lines.


@dataclass
class CounterexampleResult:
    found: bool
    gap: float
    instance: StripInstance | None
    bitonic_length: float
    optimal_length: float


def counterexample_search(delta: float) -> CounterexampleResult:
    """Search the 5-point family (x = 0..4, y on a boundary or the midline)
    for an instance whose shortest tour beats every bitonic tour.

    The optimum is taken from full tour enumeration, so a positive gap is a
    certified counterexample.  The midline level is needed: with all five
    points on the strip boundaries the best bitonic tour is optimal for
    every width.  For narrow strips the search comes back empty, which is
    the expected result below the 2*sqrt(2) threshold.
    """
    if delta <= 0:
        raise ConfigError("need delta > 0")
    best = CounterexampleResult(False, -math.inf, None, 0.0, 0.0)
    for ys in itertools.product((0.0, delta / 2.0, delta), repeat=5):
        pts = [Point(float(x), y) for x, y in enumerate(ys)]
        inst = StripInstance.from_points(pts, delta)
        _, opt = min(enumerate_all_tours(inst), key=lambda tw: tw[1])
        _, bit = bitonic_tsp(inst)
        gap = bit - opt
        if gap > best.gap:
            best = CounterexampleResult(gap > 1e-9, gap, inst, bit, opt)
    if best.found and delta > 2.0 * math.sqrt(2.0):
        expected = math.sqrt(1.0 + delta * delta) - 3.0
        if abs(best.gap - expected) > 1e-9:
            raise AssertionError(
                f"family gap {best.gap!r} deviates from closed form {expected!r}"
            )
    return best


# ---------------------------------------------------------------------------
# Campaigns.


def _worker_count() -> int:
    env = os.environ.get("STRIP_TSP_THREADS", "")
    if env:
        return max(1, int(env))
    return min(4, os.cpu_count() or 1)


def _expand_instances(gen: dict) -> list[GenSpec]:
    try:
        kinds = gen["kinds"]
        ns = gen["n"]
        deltas = gen["delta"]
        seeds = range(int(gen["seeds"]))
    except KeyError as e:
        raise ConfigError(f"generator spec is missing {e.args[0]!r}") from None
    density = int(gen.get("density", 2))
    return [
        GenSpec(kind, int(n), float(d), seed, density)
        for kind in kinds
        for n in ns
        for d in deltas
        for seed in seeds
    ]


def _compare_task(job: dict, spec: GenSpec) -> list[RunReport]:
    inst = generate(spec)
    digest = instance_digest(inst)
    tol = float(job.get("tolerance", 1e-9))
    name = job.get("name", "compare")
    out = []
    lengths = {}
    for algo in job["algorithms"]:
        params = dict(job.get("params", {})) if algo == "strip-dp" else {}
        tour, length, dt = run_algorithm(algo, inst, params)
        lengths[algo] = length
        out.append(
            RunReport(
                REPORT_SCHEMA, name, algo, digest, spec.n, spec.delta,
                length, list(tour.order), dt, params,
            )
        )
    ref = lengths[job["algorithms"][0]]
    for rep in out:
        rep.ok = bool(abs(lengths[rep.algorithm] - ref) <= tol)
        if not rep.ok:
            rep.detail = f"length differs from {job['algorithms'][0]} by more than {tol}"
    return out


def _tonicity_task(job: dict, spec: GenSpec) -> list[RunReport]:
    inst = generate(spec)
    digest = instance_digest(inst)
    name = job.get("name", "tonicity")
    tour, length, dt = run_algorithm("held-karp", inst)
    if "k" in job:
        bound = 2 * int(job["k"])
    elif spec.kind == "integer-x":
        bound = tonicity_bound_integer(spec.delta)
    elif spec.kind == "sparse":
        bound = tonicity_bound_sparse(spec.delta, spec.density)
    else:
        raise ConfigError("tonicity jobs need integer-x or sparse instances, or an explicit k")
    red = reduce_tonicity(inst, tour)
    ok = bool(
        is_k_tonic(inst, red.tour, bound) and red.length <= length + 1e-9
    )
    rep = RunReport(
        REPORT_SCHEMA, name, "held-karp+reduce", digest, spec.n, spec.delta,
        red.length, list(red.tour.order), dt, {"bound": bound}, ok,
        "" if ok else f"reduced tour is not {bound}-tonic or grew longer",
    )
    return [rep]


def _scaling_job(job: dict, sink) -> None:
    """Timing ladder over n; ratio violations go to the sink."""
    name = job.get("name", "scaling")
    params = dict(job.get("params", {}))
    lo, hi = job.get("ratio_range", (0.0, math.inf))
    kind = job.get("kind", "sparse")
    density = int(job.get("density", 2))
    seed = int(job.get("seed", 0))
    delta = float(job.get("delta", 1.0))
    times = []
    for n in job["n"]:
        spec = GenSpec(kind, int(n), delta, seed, density)
        inst = generate(spec)
        tour, length, dt = run_algorithm(job.get("algorithm", "strip-dp"), inst, params)
        times.append(dt)
        sink(
            RunReport(
                REPORT_SCHEMA, name, job.get("algorithm", "strip-dp"),
                instance_digest(inst), spec.n, delta, length,
                list(tour.order), dt, params,
            )
        )
    for a, b in zip(times, times[1:]):
        r = b / a
        if not lo <= r <= hi:
            sink(
                RunReport(
                    REPORT_SCHEMA, name, job.get("algorithm", "strip-dp"),
                    "", 0, delta, 0.0, [], b, params, False,
                    f"consecutive time ratio {r:.2f} outside [{lo}, {hi}]",
                )
            )


def _width_factor_job(job: dict, sink) -> None:
    """Compare wall time across two strip widths at fixed n."""
    name = job.get("name", "width-factor")
    params = dict(job.get("params", {}))
    n = int(job["n"])
    kind = job.get("kind", "sparse")
    density = int(job.get("density", 2))
    seed = int(job.get("seed", 0))
    times = []
    for delta in job["deltas"]:
        spec = GenSpec(kind, n, float(delta), seed, density)
        inst = generate(spec)
        tour, length, dt = run_algorithm(job.get("algorithm", "strip-dp"), inst, params)
        times.append(dt)
        sink(
            RunReport(
                REPORT_SCHEMA, name, job.get("algorithm", "strip-dp"),
                instance_digest(inst), n, float(delta), length,
                list(tour.order), dt, params,
            )
        )
    factor = times[-1] / times[0]
    cap = float(job["factor_max"])
    if factor >= cap:
        sink(
            RunReport(
                REPORT_SCHEMA, name, job.get("algorithm", "strip-dp"),
                "", n, 0.0, 0.0, [], times[-1], params, False,
                f"width slowdown factor {factor:.2f} is not below {cap}",
            )
        )


def _counterexample_job(job: dict, sink) -> None:
    name = job.get("name", "counterexample")
    delta = float(job["delta"])
    res = counterexample_search(delta)
    expect_found = bool(job.get("expect_found", delta > 2.0 * math.sqrt(2.0)))
    ok = res.found == expect_found
    if ok and "expected_gap" in job:
        ok = abs(res.gap - float(job["expected_gap"])) <= 1e-9
    digest = instance_digest(res.instance) if res.instance is not None else ""
    sink(
        RunReport(
            REPORT_SCHEMA, name, "bitonic-vs-enumeration", digest, 5, delta,
            res.optimal_length, [], 0.0, {"gap": res.gap}, ok,
            "" if ok else f"gap {res.gap!r} contradicts the expectation",
        )
    )


@dataclass
class CampaignResult:
    report_path: str
    runs: int
    violations: int


def campaign(config_path) -> CampaignResult:
    """Run every job in a TOML campaign config; see configs/ for examples."""
    with open(config_path, "rb") as fh:
        conf = tomllib.load(fh)
    jobs = conf.get("jobs", [])
    if not jobs:
        raise ConfigError("campaign config lists no jobs")
    known = ("compare", "tonicity", "scaling", "width-factor", "counterexample")
    for job in jobs:
        if job.get("check") not in known:
            raise ConfigError(f"unknown job check {job.get('check')!r}")
        if job.get("check") == "compare" and not job.get("algorithms"):
            raise ConfigError("compare job lists no algorithms")
    report_path = conf.get("report", "reports/campaign.jsonl")
    os.makedirs(os.path.dirname(report_path) or ".", exist_ok=True)
    runs = 0
    violations = 0
    with open(report_path, "a") as out:
        def sink(rep: RunReport) -> None:
            nonlocal runs, violations
            runs += 1
            if not rep.ok:
                violations += 1
            out.write(json.dumps(asdict(rep)) + "\n")

        for job in jobs:
            check = job.get("check")
            if check in ("compare", "tonicity"):
                task = _compare_task if check == "compare" else _tonicity_task
                specs = _expand_instances(job.get("generator", {}))
                with ThreadPoolExecutor(max_workers=_worker_count()) as pool:
                    # the sink below is the single serialization point
                    for reports in pool.map(lambda s: task(job, s), specs):
                        for rep in reports:
                            sink(rep)
            elif check == "scaling":
                _scaling_job(job, sink)
            elif check == "width-factor":
                _width_factor_job(job, sink)
            elif check == "counterexample":
                _counterexample_job(job, sink)
            else:
                raise ConfigError(f"unknown job check {check!r}")
    return CampaignResult(report_path, runs, violations)
