"""End-to-end insertion query with timings."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from . import dp
from .errors import DanglingReferenceError
from .free_intervals import FreeIntervals
from .model import InsertionRequest, Network, ParameterSet, Timetable
from .paths import FrontierPoint, TrainPath, frontier, reconstruct
from .routing import ArcOrdering, plan_routes
from .verify import OccupationIndex, Violation, verify_path

log = logging.getLogger(__name__)


@dataclass
class RunReport:
    request: InsertionRequest
    ordering: ArcOrdering
    frontier: list[FrontierPoint] = field(default_factory=list)
    paths: list[TrainPath] = field(default_factory=list)
    violations: list[list[Violation]] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)  # milliseconds
    sizes: list[tuple[str, str, int, int]] = field(default_factory=list)
    tables: dp.DpTables | None = None

    @property
    def clean(self) -> bool:
        return not any(self.violations)


def _ms(t0):
    return (time.perf_counter() - t0) * 1000.0


def insert(
    network: Network,
    timetable: Timetable,
    params: ParameterSet,
    request: InsertionRequest,
    verify: bool = True,
    free: FreeIntervals | None = None,
) -> RunReport:
    """Routing, free intervals, the dynamic program, read-back and checking."""
    for sid in (request.origin, request.destination, *sorted(request.no_stop)):
        if sid not in network.stations:
            raise DanglingReferenceError("station", sid, "request")
    t0 = time.perf_counter()
    ordering = plan_routes(network, params, request.origin, request.destination, request.routes)
    report = RunReport(request, ordering)
    for line in ordering.report():
        log.info("%s", line)
    if not ordering.order:
        log.info("no route from %s to %s", request.origin, request.destination)
        report.timings = {"routing": _ms(t0), "preprocess": 0.0, "dp": 0.0, "reconstruct": 0.0}
        return report
    report.timings["routing"] = _ms(t0)

    t0 = time.perf_counter()
    pruned = network.restrict(ordering.order)
    if free is None:
        free = FreeIntervals(network, timetable, params, request.window)
    free.precompute(pruned)
    report.timings["preprocess"] = _ms(t0)

    t0 = time.perf_counter()
    tables = dp.run(network, timetable, params, request, ordering, free)
    report.frontier = frontier(tables)
    report.timings["dp"] = _ms(t0)

    t0 = time.perf_counter()
    report.paths = [reconstruct(tables, pt) for pt in report.frontier]
    report.timings["reconstruct"] = _ms(t0)

    report.tables = tables
    report.sizes = tables.sizes()
    if verify:
        index = OccupationIndex(network, timetable.trains)
        report.violations = [verify_path(p, timetable, params, network, request, index) for p in report.paths]
    return report


def query_time(network, timetable, params, request, free: FreeIntervals, ordering: ArcOrdering) -> float:
    """Milliseconds for the dynamic program and frontier, free intervals given."""
    t0 = time.perf_counter()
    tables = dp.run(network, timetable, params, request, ordering, free)
    frontier(tables)
    return _ms(t0)
