"""Empirical distortion harness for the tree-product embedding.

Samples point pairs, measures hyperbolic against tree-product distances,
fits a two-sided linear envelope (the empirical quasi-isometry constants),
and runs the exact vertical lower-bound check. The envelope constants are
fitted, not reproduced: the construction guarantees their existence but
gives no numeric values, so the meaningful signal is that the fitted slope
does not drift as the sampled region grows.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from .core import Params
from .embedding import embed, per_color_distances
from .hyperbolic import HoroPoint, hyp_distance
from .tree import ScanExhausted

STRATEGIES = ("uniform", "same_horosphere", "vertical", "near_pairs")

# Pairs closer than this are kept in reports but carry no slope information;
# the additive constant covers them.
MIN_FIT_DHYP = 0.1


class DegenerateSample(ValueError):
    """No sample pair carries slope information (all essentially identical)."""


@dataclass(frozen=True)
class Region:
    t_min: float
    t_max: float
    x_radius: float

    def __post_init__(self) -> None:
        if self.t_min > self.t_max:
            raise ValueError(f"t_min {self.t_min} > t_max {self.t_max}")
        if self.x_radius <= 0:
            raise ValueError(f"x_radius must be positive, got {self.x_radius}")

    def scaled(self, factor: float) -> "Region":
        return Region(
            self.t_min * factor, self.t_max * factor, self.x_radius * factor
        )

    def to_json_dict(self) -> dict:
        return {
            "t_min": self.t_min,
            "t_max": self.t_max,
            "x_radius": self.x_radius,
        }


def default_region(P: Params) -> Region:
    return Region(-4.0, 4.0, float(P.p**4))


@dataclass(frozen=True)
class SamplePlan:
    region: Region
    count: int
    strategy: str = "uniform"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"count must be >= 1, got {self.count}")
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )

    def to_json_dict(self) -> dict:
        return {
            "region": self.region.to_json_dict(),
            "count": self.count,
            "strategy": self.strategy,
            "seed": self.seed,
        }


def _rand_point(P: Params, rng: random.Random, region: Region) -> HoroPoint:
    t = rng.uniform(region.t_min, region.t_max)
    x = tuple(
        rng.uniform(-region.x_radius, region.x_radius) for _ in range(P.n)
    )
    return HoroPoint(t, x)


def sample_pairs(
    P: Params, plan: SamplePlan
) -> list[tuple[HoroPoint, HoroPoint]]:
    """Deterministic pair sample for a fixed seed.

    vertical: equal x, integer heights. same_horosphere: equal heights.
    near_pairs: hyperbolic distance at most 2 (offsets halved until inside).
    """
    rng = random.Random(plan.seed)
    region = plan.region
    k_lo = math.ceil(region.t_min)
    k_hi = math.floor(region.t_max)
    pairs = []
    for _ in range(plan.count):
        if plan.strategy == "uniform":
            pairs.append((_rand_point(P, rng, region), _rand_point(P, rng, region)))
        elif plan.strategy == "same_horosphere":
            t = rng.uniform(region.t_min, region.t_max)
            a = _rand_point(P, rng, region)
            b = _rand_point(P, rng, region)
            pairs.append((HoroPoint(t, a.x), HoroPoint(t, b.x)))
        elif plan.strategy == "vertical":
            x = _rand_point(P, rng, region).x
            k1 = rng.randint(k_lo, k_hi)
            k2 = rng.randint(k_lo, k_hi)
            pairs.append((HoroPoint(float(k1), x), HoroPoint(float(k2), x)))
        else:  # near_pairs
            z = _rand_point(P, rng, region)
            dt = rng.uniform(-1.0, 1.0)
            scale = float(P.p) ** (-z.t)
            dx = tuple(rng.uniform(-scale, scale) for _ in range(P.n))
            zp = HoroPoint(z.t + dt, tuple(a + b for a, b in zip(z.x, dx)))
            while hyp_distance(P, z, zp) > 2.0:
                dt *= 0.5
                dx = tuple(c * 0.5 for c in dx)
                zp = HoroPoint(z.t + dt, tuple(a + b for a, b in zip(z.x, dx)))
            pairs.append((z, zp))
    return pairs


@dataclass(frozen=True)
class PairSample:
    z: HoroPoint
    zp: HoroPoint
    d_hyp: float
    d_tree: float
    per_color: tuple[int, ...]


@dataclass(frozen=True)
class DistortionReport:
    n: int
    p: int
    norm: str
    samples: tuple[PairSample, ...]
    plan: SamplePlan | None = None
    l: float | None = None
    m: float | None = None
    violations: int | None = None
    runtime_ms: float | None = None

    def to_json_dict(self) -> dict:
        # runtime_ms deliberately stays out: report files must be
        # byte-identical across runs for a fixed seed.
        return {
            "params": {"n": self.n, "p": self.p},
            "plan": self.plan.to_json_dict() if self.plan else None,
            "norm": self.norm,
            "n_samples": len(self.samples),
            "fit": {"l": self.l, "m": self.m},
            "violations": self.violations,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out)
        xs = [f"x{i}" for i in range(self.n)]
        xps = [f"xp{i}" for i in range(self.n)]
        cs = [f"d_c{c}" for c in range(self.n + 1)]
        w.writerow(["t"] + xs + ["tp"] + xps + ["d_hyp", "d_tree"] + cs)
        for s in self.samples:
            w.writerow(
                [repr(s.z.t)]
                + [repr(c) for c in s.z.x]
                + [repr(s.zp.t)]
                + [repr(c) for c in s.zp.x]
                + [repr(s.d_hyp), repr(s.d_tree)]
                + [str(d) for d in s.per_color]
            )
        return out.getvalue()


def _eval_one(
    P: Params,
    pair: tuple[HoroPoint, HoroPoint],
    norm: str,
    scan_cap: int,
    level: int | None,
) -> PairSample:
    z, zp = pair
    try:
        e1 = embed(P, z, level)
        e2 = embed(P, zp, level)
        per = per_color_distances(P, e1, e2, scan_cap)
    except ScanExhausted as exc:
        raise ScanExhausted(
            exc.cid, exc.k_reached, context=f"while evaluating pair {z} / {zp}"
        ) from exc
    if norm == "l1":
        d_tree = float(sum(per))
    elif norm == "linf":
        d_tree = float(max(per))
    else:
        d_tree = math.sqrt(sum(d * d for d in per))
    return PairSample(z, zp, hyp_distance(P, z, zp), d_tree, per)


def evaluate_pairs(
    P: Params,
    pairs: Sequence[tuple[HoroPoint, HoroPoint]],
    norm: str = "l1",
    scan_cap: int = 64,
    level: int | None = None,
    threads: int = 1,
    plan: SamplePlan | None = None,
) -> DistortionReport:
    """Measure every pair; fit fields stay empty.

    Per-pair work is pure, so the threaded path merges chunks in order and
    the result is identical to the serial one.
    """
    if not pairs:
        raise DegenerateSample("no pairs to evaluate")
    norm = norm.lower()
    start = time.perf_counter()
    if threads > 1:
        chunks = [pairs[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = list(
                pool.map(
                    lambda ch: [_eval_one(P, pr, norm, scan_cap, level) for pr in ch],
                    chunks,
                )
            )
        samples: list[PairSample] = [None] * len(pairs)  # type: ignore[list-item]
        for ci, chunk in enumerate(done):
            samples[ci::threads] = chunk
    else:
        samples = [_eval_one(P, pr, norm, scan_cap, level) for pr in pairs]
    runtime_ms = (time.perf_counter() - start) * 1000.0
    return DistortionReport(
        n=P.n,
        p=P.p,
        norm=norm,
        samples=tuple(samples),
        plan=plan,
        runtime_ms=runtime_ms,
    )


def count_violations(
    samples: Sequence[PairSample],
    l: float,
    m: float,
    min_dhyp: float = MIN_FIT_DHYP,
    tol: float = 1e-9,
) -> int:
    """Pairs (above the small-distance floor) breaking either envelope side."""
    bad = 0
    for s in samples:
        if s.d_hyp < min_dhyp:
            continue
        if s.d_tree > l * s.d_hyp + m + tol or s.d_hyp > l * s.d_tree + m + tol:
            bad += 1
    return bad


def fit_qi_constants(
    report: DistortionReport, m_grid: Sequence[float] | None = None
) -> DistortionReport:
    """Fit the envelope constants (l, m) over an additive-constant grid.

    For each m the required slope is the max over the fitting set (pairs
    with d_hyp >= 0.1) of (d_tree - m)/d_hyp and (d_hyp - m)/d_tree, the
    latter only where d_tree > 0; the slope is floored at 1, the smallest
    slope a quasi-isometry can have. The grid point minimizing the slope
    wins, ties to the smaller m.
    """
    if m_grid is None:
        m_grid = [float(m) for m in range(51)]
    fitting = [s for s in report.samples if s.d_hyp >= MIN_FIT_DHYP]
    if not fitting:
        raise DegenerateSample(
            "every pair is below the fitting floor; nothing to fit"
        )
    best: tuple[float, float] | None = None
    for m in m_grid:
        l = 1.0
        for s in fitting:
            l = max(l, (s.d_tree - m) / s.d_hyp)
            if s.d_tree > 0:
                l = max(l, (s.d_hyp - m) / s.d_tree)
        if best is None or (l, m) < best:
            best = (l, m)
    l, m = best
    return dataclasses.replace(
        report, l=l, m=m, violations=count_violations(report.samples, l, m)
    )


@dataclass(frozen=True)
class VerticalCheckReport:
    """Outcome of the exact vertical lower-bound check."""

    n: int
    p: int
    count: int
    seed: int
    failures: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json_dict(self) -> dict:
        return {
            "params": {"n": self.n, "p": self.p},
            "count": self.count,
            "seed": self.seed,
            "passed": self.passed,
            "n_failures": len(self.failures),
            "failures": list(self.failures),
        }


def vertical_bound_check(
    P: Params,
    count: int,
    seed: int,
    region: Region | None = None,
    scan_cap: int = 64,
) -> VerticalCheckReport:
    """Check max-color tree distance >= (dk+1)/(n+1) - 1 on vertical pairs.

    The bound follows from the covering of every horosphere by the n+1
    colors: of the dk+1 integer levels a vertical geodesic crosses, some
    color owns at least (dk+1)/(n+1) of the crossing points, and those cubes
    form a nested chain. It must hold for every pair; a failure is an
    implementation bug, not noise.
    """
    plan = SamplePlan(
        region=region or default_region(P),
        count=count,
        strategy="vertical",
        seed=seed,
    )
    failures = []
    for z, zp in sample_pairs(P, plan):
        dk = abs(round(z.t) - round(zp.t))
        bound = (dk + 1) / (P.n + 1) - 1.0
        per = per_color_distances(P, embed(P, z), embed(P, zp), scan_cap)
        if max(per) < bound - 1e-12:
            failures.append(
                {
                    "t": z.t,
                    "tp": zp.t,
                    "x": list(z.x),
                    "bound": bound,
                    "per_color": list(per),
                }
            )
    return VerticalCheckReport(
        n=P.n, p=P.p, count=count, seed=seed, failures=tuple(failures[:16])
    )


@dataclass(frozen=True)
class TrendReport:
    """Fitted slope per region scale, plus the worst consecutive increase."""

    scales: tuple[float, ...]
    ls: tuple[float, ...]
    ms: tuple[float, ...]

    @property
    def max_rel_increase(self) -> float:
        worst = 0.0
        for a, b in zip(self.ls, self.ls[1:]):
            worst = max(worst, (b - a) / a)
        return worst

    def to_json_dict(self) -> dict:
        return {
            "scales": list(self.scales),
            "l": list(self.ls),
            "m": list(self.ms),
            "max_rel_increase": self.max_rel_increase,
        }


def stability_probe(
    P: Params,
    base_plan: SamplePlan,
    scales: Sequence[float],
    norm: str = "l1",
    m_grid: Sequence[float] | None = None,
    level: int | None = None,
    threads: int = 1,
    scan_cap: int = 64,
) -> TrendReport:
    """Fit the envelope on scaled copies of the base region.

    A sound embedding keeps the slope flat as the region grows; a broken one
    (e.g. every image forced to level 0) cannot, because hyperbolic
    distances grow linearly with the region while its tree distances only
    grow logarithmically.
    """
    if list(scales) != sorted(scales):
        raise ValueError(f"scales must be increasing, got {scales!r}")
    ls = []
    ms = []
    for i, s in enumerate(scales):
        plan = SamplePlan(
            region=base_plan.region.scaled(s),
            count=base_plan.count,
            strategy=base_plan.strategy,
            seed=base_plan.seed + i,
        )
        report = evaluate_pairs(
            P,
            sample_pairs(P, plan),
            norm=norm,
            scan_cap=scan_cap,
            level=level,
            threads=threads,
            plan=plan,
        )
        fitted = fit_qi_constants(report, m_grid)
        ls.append(fitted.l)
        ms.append(fitted.m)
    return TrendReport(tuple(float(s) for s in scales), tuple(ls), tuple(ms))
