"""Brute-force reference: per-instant margin checks and a time-expanded search.

Nothing here uses the interval code of the main engine. Margins are read
straight from the timetable events, and reachability is tracked as boolean
matrices indexed by (grid time, grid departure time).
"""

from __future__ import annotations

import numpy as np

from .model import InsertionRequest, Network, ParameterSet, Pattern, Timetable
from .paths import FrontierPoint, pareto
from .routing import ArcOrdering, plan_routes

NODE_CAP = 400_000


# ------------------------------------------------------------ occupations


def _stays(timetable: Timetable, station, track):
    for tid, events in timetable.trains.items():
        for ev in events:
            if ev.station == station and ev.track == track:
                yield tid, ev.arrival, ev.departure


def _moves(timetable: Timetable):
    for tid, events in timetable.trains.items():
        for ev in events:
            if ev.entry_transition is not None:
                yield tid, ev.entry_transition, ev.arrival
            if ev.exit_transition is not None:
                yield tid, ev.exit_transition, ev.departure


def _traversals(network: Network, timetable: Timetable, segment, track):
    """(train, p, q, margins) in the frame of ``segment``: p at its start, q at its end."""
    seg = network.segments[segment]
    for tid, events in timetable.trains.items():
        for a, b in zip(events, events[1:]):
            tr = a.exit_transition
            other = network.segments[tr.segment]
            if other.resource_id != seg.resource_id or tr.segment_track != track:
                continue
            if other.start == seg.start:
                yield tid, a.departure, b.arrival, other.id
            else:
                yield tid, b.arrival, a.departure, other.id


# ------------------------------------------------------------ instant checks


def station_ok(network, timetable, params: ParameterSet, station, track, t_arr, t_dep=None) -> bool:
    t_dep = t_arr if t_dep is None else t_dep
    for tid, A, D in _stays(timetable, station, track):
        m = params.resolve_gamma(tid, station, track)
        if not (t_dep <= A - m.before or t_arr >= D + m.after):
            return False
    return True


def transition_ok(network: Network, timetable, params: ParameterSet, tr, t) -> bool:
    for tid, other, u in _moves(timetable):
        if (min(tr, other), max(tr, other)) not in network.conflicts:
            continue
        m = params.resolve_delta(tid, tr, other.direction)
        if u - m.before < t < u + m.after:
            return False
    return True


def _segment_rules(network, timetable, params: ParameterSet, segment, track):
    rules = []
    for tid, p, q, oseg in _traversals(network, timetable, segment, track):
        rules.append((p, q, params.resolve_beta(tid, segment, oseg)))
    return rules


def segment_ok(network: Network, timetable, params, segment, track, e, x) -> bool:
    """Entering at ``e`` and leaving at ``x`` keeps every headway."""
    if x < e:
        return False
    single = network.segments[segment].blocks == 1
    for p, q, m in _segment_rules(network, timetable, params, segment, track):
        if single:
            lo, hi = min(p, q), max(p, q)
            ok = x <= lo - m.before or e >= hi + m.after
        else:
            ok = (e <= p - m.before and x <= q - m.before) or (e >= p + m.after and x >= q + m.after)
        if not ok:
            return False
    return True


def _exists(lo, hi, rays) -> bool:
    """Is some integer in [lo, hi] inside every ``(-inf, U] ∪ [L, inf)``?"""
    holes = []
    for U, L in rays:
        if U is None and L is None:
            return False
        if L is None:
            hi = min(hi, U)
        elif U is None:
            lo = max(lo, L)
        elif L - U >= 2:
            holes.append((U, L))
    t = lo
    for U, L in sorted(holes):
        if t > hi:
            return False
        if U < t < L:
            t = L
    return t <= hi


def segment_entry_ok(network, timetable, params, segment, track, e, window) -> bool:
    """Some exit time in the window completes a traversal entered at ``e``."""
    single = network.segments[segment].blocks == 1
    rays = []
    for p, q, m in _segment_rules(network, timetable, params, segment, track):
        if single:
            lo, hi = min(p, q), max(p, q)
            rays.append((None, e) if e >= hi + m.after else (lo - m.before, None))
        else:
            U = q - m.before if e <= p - m.before else None
            L = q + m.after if e >= p + m.after else None
            rays.append((U, L))
    return window[0] <= e <= window[1] and _exists(e, window[1], rays)


def segment_exit_ok(network, timetable, params, segment, track, x, window) -> bool:
    """Some entry time in the window starts a traversal left at ``x``."""
    single = network.segments[segment].blocks == 1
    rays = []
    for p, q, m in _segment_rules(network, timetable, params, segment, track):
        if single:
            lo, hi = min(p, q), max(p, q)
            rays.append((x, None) if x <= lo - m.before else (None, hi + m.after))
        else:
            U = p - m.before if x <= q - m.before else None
            L = p + m.after if x >= q + m.after else None
            rays.append((U, L))
    return window[0] <= x <= window[1] and _exists(window[0], x, rays)


def oracle_free_check(element, t, network, timetable, params, window) -> bool:
    """Feasibility of using ``element`` at instant ``t``.

    ``element`` is ``("station", s, j)``, ``("transition", tr)``,
    ``("segment_entry", l, k)`` or ``("segment_exit", l, k)``.
    """
    if not window[0] <= t <= window[1]:
        return False
    kind = element[0]
    if kind == "station":
        return station_ok(network, timetable, params, element[1], element[2], t)
    if kind == "transition":
        return transition_ok(network, timetable, params, element[1], t)
    if kind == "segment_entry":
        return segment_entry_ok(network, timetable, params, element[1], element[2], t, window)
    if kind == "segment_exit":
        return segment_exit_ok(network, timetable, params, element[1], element[2], t, window)
    raise ValueError(f"unknown element kind {kind!r}")


def free_mask(element, network, timetable, params, window) -> np.ndarray:
    """``oracle_free_check`` evaluated at every second of ``window`` at once."""
    lo, hi = window
    t = np.arange(lo, hi + 1, dtype=np.int64)
    ok = np.ones(len(t), dtype=bool)
    kind = element[0]
    if kind == "station":
        s, j = element[1], element[2]
        for tid, A, D in _stays(timetable, s, j):
            m = params.resolve_gamma(tid, s, j)
            ok &= (t <= A - m.before) | (t >= D + m.after)
        return ok
    if kind == "transition":
        tr = element[1]
        for tid, other, u in _moves(timetable):
            if (min(tr, other), max(tr, other)) in network.conflicts:
                m = params.resolve_delta(tid, tr, other.direction)
                ok &= (t <= u - m.before) | (t >= u + m.after)
        return ok
    segment, track = element[1], element[2]
    single = network.segments[segment].blocks == 1
    rules = _segment_rules(network, timetable, params, segment, track)
    if kind == "segment_entry":
        # feasible exits for entry t form [L, U]
        L, U = t.copy(), np.full(len(t), hi, dtype=np.int64)
        for p, q, m in rules:
            if single:
                a_lo, a_hi = min(p, q), max(p, q)
                U = np.where(t >= a_hi + m.after, U, np.minimum(U, a_lo - m.before))
                continue
            bef, aft = t <= p - m.before, t >= p + m.after
            ok &= bef | aft
            U = np.where(bef & ~aft, np.minimum(U, q - m.before), U)
            L = np.where(aft & ~bef, np.maximum(L, q + m.after), L)
        return ok & (L <= U)
    if kind == "segment_exit":
        # feasible entries for exit t form [L, U]
        L, U = np.full(len(t), lo, dtype=np.int64), t.copy()
        for p, q, m in rules:
            if single:
                a_lo, a_hi = min(p, q), max(p, q)
                L = np.where(t <= a_lo - m.before, L, np.maximum(L, a_hi + m.after))
                continue
            bef, aft = t <= q - m.before, t >= q + m.after
            ok &= bef | aft
            U = np.where(bef & ~aft, np.minimum(U, p - m.before), U)
            L = np.where(aft & ~bef, np.maximum(L, p + m.after), L)
        return ok & (L <= U)
    raise ValueError(f"unknown element kind {kind!r}")


# ------------------------------------------------------------ grid search


class _Grid:
    def __init__(self, window, g):
        lo, hi = window
        self.t = np.arange(lo, hi + 1, g, dtype=np.int64)
        self.n = len(self.t)


def _station_vec(network, timetable, params, grid, station, track):
    ok = np.ones(grid.n, dtype=bool)
    for tid, A, D in _stays(timetable, station, track):
        m = params.resolve_gamma(tid, station, track)
        ok &= (grid.t <= A - m.before) | (grid.t >= D + m.after)
    return ok


def _stay_matrix(network, timetable, params, grid, station, track, min_dwell):
    """M[a, d]: arrive at grid a, stay, leave at grid d."""
    ta, td = grid.t[:, None], grid.t[None, :]
    ok = td - ta >= min_dwell
    for tid, A, D in _stays(timetable, station, track):
        m = params.resolve_gamma(tid, station, track)
        ok &= (td <= A - m.before) | (ta >= D + m.after)
    return ok


def _transition_vec(network, timetable, params, grid, tr):
    ok = np.ones(grid.n, dtype=bool)
    for tid, other, u in _moves(timetable):
        if (min(tr, other), max(tr, other)) not in network.conflicts:
            continue
        m = params.resolve_delta(tid, tr, other.direction)
        ok &= (grid.t <= u - m.before) | (grid.t >= u + m.after)
    return ok


def _pair_matrix(network, timetable, params, grid, segment, track):
    e, x = grid.t[:, None], grid.t[None, :]
    ok = x >= e
    single = network.segments[segment].blocks == 1
    for p, q, m in _segment_rules(network, timetable, params, segment, track):
        if single:
            lo, hi = min(p, q), max(p, q)
            ok &= (x <= lo - m.before) | (e >= hi + m.after)
        else:
            ok &= ((e <= p - m.before) & (x <= q - m.before)) | ((e >= p + m.after) & (x >= q + m.after))
    return ok


def _window_vec(grid, bounds):
    if bounds is None:
        return np.ones(grid.n, dtype=bool)
    return (grid.t >= bounds[0]) & (grid.t <= bounds[1])


def _bool_matmul(a, b):
    return (a.astype(np.float32) @ b.astype(np.float32)) > 0


def oracle_frontier(
    network: Network,
    timetable: Timetable,
    params: ParameterSet,
    request: InsertionRequest,
    g: int = 60,
    ordering: ArcOrdering | None = None,
) -> list[FrontierPoint]:
    """Exact non-dominated (departure, arrival) pairs on the time grid."""
    pairs = oracle_pairs(network, timetable, params, request, g, ordering)
    return [FrontierPoint(d, a, 0) for d, a in pareto(pairs)]


def oracle_pairs(network, timetable, params, request, g=60, ordering=None) -> set[tuple[int, int]]:
    """All feasible (departure, arrival) pairs on the grid."""
    if ordering is None:
        ordering = plan_routes(network, params, request.origin, request.destination, request.routes)
    if not ordering.order:
        return set()
    grid = _Grid(request.window, g)
    arcs = [network.segments[a] for a in ordering.order]
    stations = {s.start for s in arcs} | {s.end for s in arcs}
    locations = sum(len(network.stations[s].tracks) for s in stations) * 2
    if locations * grid.n > NODE_CAP:
        raise AssertionError(f"time-expanded graph too large: {locations} x {grid.n} nodes")

    u, v = request.origin, request.destination
    S, R = Pattern.STOP, Pattern.RUN
    ready = {}
    arrived = {}
    ust = network.stations[u]
    for j in ust.tracks:
        ok = _station_vec(network, timetable, params, grid, u, j) & _window_vec(grid, ust.constraints.departure)
        ready[(u, j, S)] = np.diag(ok)

    for seg in arcs:
        if seg.start == v or seg.end == u:
            continue
        s1, s2 = seg.start, seg.end
        st2 = network.stations[s2]
        for k in seg.tracks:
            pair = _pair_matrix(network, timetable, params, grid, seg.id, k)
            for p1 in (R, S):
                start = np.zeros((grid.n, grid.n), dtype=bool)
                for j in network.stations[s1].tracks:
                    src = ready.get((s1, j, p1))
                    tr = network.departing(s1, j, seg.id, k)
                    if src is None or tr is None:
                        continue
                    start |= src & _transition_vec(network, timetable, params, grid, tr)[:, None]
                if not start.any():
                    continue
                for p2 in (R, S):
                    if p2 is R and s2 == v:
                        continue
                    if p2 is S and s2 != v and s2 in request.no_stop:
                        continue
                    d = params.resolve_run_time(seg.id, p1.value + p2.value)
                    feas = pair & (grid.t[None, :] - grid.t[:, None] >= d)
                    at_exit = _bool_matmul(feas.T, start)
                    for j2 in st2.tracks:
                        tr2 = network.arriving(s2, j2, seg.id, k)
                        if tr2 is None:
                            continue
                        mask = (
                            _transition_vec(network, timetable, params, grid, tr2)
                            & _station_vec(network, timetable, params, grid, s2, j2)
                            & _window_vec(grid, st2.constraints.arrival)
                        )
                        key = (s2, j2, p2)
                        arrived[key] = arrived.get(key, False) | (at_exit & mask[:, None])
        if s2 == v:
            continue
        for j2 in st2.tracks:
            dep_ok = _window_vec(grid, st2.constraints.departure)
            if (s2, j2, R) in arrived:
                ready[(s2, j2, R)] = arrived[(s2, j2, R)] & dep_ok[:, None]
            if (s2, j2, S) in arrived:
                stay = _stay_matrix(network, timetable, params, grid, s2, j2, st2.constraints.min_dwell)
                ready[(s2, j2, S)] = _bool_matmul(stay.T, arrived[(s2, j2, S)]) & dep_ok[:, None]

    out = set()
    for j in network.stations[v].tracks:
        mat = arrived.get((v, j, S))
        if mat is None:
            continue
        ti, di = np.nonzero(mat)
        out.update(zip(grid.t[di].tolist(), grid.t[ti].tolist()))
    return out

