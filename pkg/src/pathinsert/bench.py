"""Timing harness: query time against window length, and table sizes per location."""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass

import numpy as np

from . import dp
from .free_intervals import FreeIntervals
from .generate import GenConfig, Instance, generate
from .model import InsertionRequest
from .paths import frontier
from .routing import ArcOrdering, plan_routes

# ~100 trains on a 40-station line over 7 hours, mostly double track
CORRIDOR = dict(
    stations=40,
    trains=125,
    window=(0, 7 * 3600),
    seed=1,
    grid=None,
    double_share=0.7,
    local_share=0.7,
)


def corridor(days=1, **overrides) -> Instance:
    cfg = GenConfig(**{**CORRIDOR, **overrides})
    cfg.days = days
    return generate(cfg)


@dataclass
class Prepared:
    instance: Instance
    request: InsertionRequest
    ordering: ArcOrdering
    free: FreeIntervals
    preprocess_ms: float


def prepare(inst: Instance, request: InsertionRequest | None = None) -> Prepared:
    """Routing and free intervals, which the timed query leaves out."""
    if request is None:
        request = InsertionRequest(inst.origin, inst.destination, inst.window)
    t0 = time.perf_counter()
    ordering = plan_routes(inst.network, inst.params, request.origin, request.destination, request.routes)
    free = FreeIntervals(inst.network, inst.timetable, inst.params, request.window)
    free.precompute(inst.network.restrict(ordering.order))
    return Prepared(inst, request, ordering, free, (time.perf_counter() - t0) * 1000.0)


def run_query(prep: Prepared) -> tuple[float, dp.DpTables, list]:
    """One timed query; like timeit, the collector is paused while the clock runs."""
    inst = prep.instance
    gc.collect()
    was_enabled = gc.isenabled()
    gc.disable()
    try:
        t0 = time.perf_counter()
        tables = dp.run(inst.network, inst.timetable, inst.params, prep.request, prep.ordering, prep.free)
        points = frontier(tables)
        ms = (time.perf_counter() - t0) * 1000.0
    finally:
        if was_enabled:
            gc.enable()
    return ms, tables, points


@dataclass
class TimingRow:
    multiplier: int
    window: int  # seconds
    trains: int
    samples: list[float]
    frontier: int
    preprocess_ms: float

    @property
    def mean_ms(self) -> float:
        return statistics.fmean(self.samples)


def time_instance(prep: Prepared, multiplier=1, reps=5) -> tuple[TimingRow, dp.DpTables]:
    samples = []
    tables = points = None
    for _ in range(reps):
        ms, tables, points = run_query(prep)
        samples.append(ms)
    lo, hi = prep.request.window
    row = TimingRow(multiplier, hi - lo, len(prep.instance.timetable.trains), samples, len(points), prep.preprocess_ms)
    return row, tables


def scaling(multipliers, reps=5, make=corridor) -> tuple[list[TimingRow], dp.DpTables | None]:
    """Synthetic instances spanning 1, 2, ... days; returns rows and the largest run's tables.

    Repetitions go round-robin over the instances so that a slow spell on a
    shared machine is spread over every window size instead of landing on one.
    """
    preps = [prepare(make(m)) for m in multipliers]
    samples = [[] for _ in preps]
    results = [None] * len(preps)
    for _ in range(reps):
        for i, prep in enumerate(preps):
            ms, tables, points = run_query(prep)
            samples[i].append(ms)
            results[i] = (tables, points)
    rows = []
    for m, prep, ss, (_, points) in zip(multipliers, preps, samples, results):
        lo, hi = prep.request.window
        rows.append(TimingRow(m, hi - lo, len(prep.instance.timetable.trains), ss, len(points), prep.preprocess_ms))
    return rows, (results[-1][0] if results else None)


def widen(inst: Instance, request: InsertionRequest, multiplier: int) -> Prepared:
    """Same instance, window stretched to ``multiplier`` times its length."""
    lo, hi = request.window
    req = InsertionRequest(request.origin, request.destination, (lo, lo + multiplier * (hi - lo)), request.no_stop, request.routes)
    return prepare(inst, req)


def linear_fit(xs, ys) -> tuple[float, float, float]:
    """Least-squares line; returns (slope, intercept, coefficient of determination)."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / total if total > 0 else 1.0
    return float(slope), float(intercept), r2


def timing_tsv(rows: list[TimingRow]) -> str:
    lines = ["multiplier\twindow_s\ttrains\treps\tmean_ms\tmin_ms\tmax_ms\tpreprocess_ms\tfrontier"]
    for r in rows:
        lines.append(
            f"{r.multiplier}\t{r.window}\t{r.trains}\t{len(r.samples)}\t{r.mean_ms:.2f}\t{min(r.samples):.2f}\t"
            f"{max(r.samples):.2f}\t{r.preprocess_ms:.2f}\t{r.frontier}"
        )
    return "\n".join(lines) + "\n"


def profile_tsv(tables: dp.DpTables) -> str:
    """Table items against free intervals for every location on the routes."""
    lines = ["kind\tlocation\titems\tfree\tratio"]
    for kind, loc, n, f in tables.sizes():
        ratio = f"{n / f:.2f}" if f else ("0.00" if n == 0 else "inf")
        lines.append(f"{kind}\t{loc}\t{n}\t{f}\t{ratio}")
    return "\n".join(lines) + "\n"

