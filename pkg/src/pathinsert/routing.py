"""Route selection and arc ordering.

The dynamic program sweeps the segments once, in an order in which every
considered route visits its segments in sequence. Routes come from a
k-shortest-path search; each is accepted only if one ordering can still
serve all accepted routes.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .errors import MissingRunTimeError
from .model import Network


@dataclass(frozen=True)
class Route:
    stations: tuple[str, ...]
    segments: tuple[str, ...]
    weight: int

    def key(self):
        return (self.weight, self.stations, self.segments)


@dataclass(frozen=True)
class Rejection:
    route: Route
    first: str  # arc the rejected route needs earlier
    second: str  # arc the rejected route needs later, already required before `first`

    def __str__(self):
        return (
            f"route {'-'.join(self.route.stations)} rejected: it needs {self.first} before {self.second}, "
            f"but accepted routes need {self.second} before {self.first}"
        )


@dataclass
class ArcOrdering:
    order: list[str]
    covered: list[Route]
    rejected: list[Rejection] = field(default_factory=list)

    def index(self) -> dict[str, int]:
        return {a: i for i, a in enumerate(self.order)}

    def consistent(self, segments) -> bool:
        pos = self.index()
        try:
            idx = [pos[s] for s in segments]
        except KeyError:
            return False
        return all(a < b for a, b in zip(idx, idx[1:]))

    def report(self) -> list[str]:
        lines = [f"accepted {'-'.join(r.stations)} (weight {r.weight})" for r in self.covered]
        lines += [str(r) for r in self.rejected]
        return lines


def min_run_weights(network: Network, params) -> dict[str, int]:
    out = {}
    for seg in network.segments:
        try:
            out[seg] = params.min_run_time(seg)
        except MissingRunTimeError:
            continue
    return out


def _shortest(network: Network, source, target, weight, banned_nodes, banned_arcs):
    """Lightest path, ties broken by (station sequence, segment sequence)."""
    heap = [(0, (source,), ())]
    done = set()
    while heap:
        dist, nodes, segs = heapq.heappop(heap)
        node = nodes[-1]
        if node in done:
            continue
        done.add(node)
        if node == target:
            return Route(nodes, segs, dist)
        for seg in network.out_segments(node):
            if seg.id in banned_arcs or seg.end in banned_nodes or seg.end in done or seg.id not in weight:
                continue
            heapq.heappush(heap, (dist + weight[seg.id], nodes + (seg.end,), segs + (seg.id,)))
    return None


def k_shortest_paths(network: Network, u, v, k, weight: dict[str, int]) -> list[Route]:
    """Yen's algorithm over directed segments, loopless paths only."""
    if u not in network.stations or v not in network.stations or k < 1:
        return []
    first = _shortest(network, u, v, weight, frozenset(), frozenset())
    if first is None:
        return []
    found = [first]
    candidates: list = []
    seen = {first.segments}
    while len(found) < k:
        last = found[-1]
        for i in range(len(last.segments)):
            root_nodes = last.stations[: i + 1]
            root_segs = last.segments[:i]
            banned_arcs = {p.segments[i] for p in found if p.segments[:i] == root_segs}
            spur = _shortest(network, root_nodes[-1], v, weight, frozenset(root_nodes[:-1]), banned_arcs)
            if spur is None:
                continue
            segs = root_segs + spur.segments
            if segs in seen:
                continue
            seen.add(segs)
            route = Route(root_nodes[:-1] + spur.stations, segs, sum(weight[s] for s in segs))
            heapq.heappush(candidates, (route.key(), route))
        if not candidates:
            break
        found.append(heapq.heappop(candidates)[1])
    return found


def _reaches(succ, start, goal) -> bool:
    stack = [start]
    seen = {start}
    while stack:
        n = stack.pop()
        if n == goal:
            return True
        for m in succ.get(n, ()):
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return False


def build_ordering(routes: list[Route], network: Network | None = None) -> ArcOrdering:
    """Greedily accept routes whose precedence constraints stay acyclic."""
    succ: dict[str, set[str]] = {}
    accepted: list[Route] = []
    rejected: list[Rejection] = []
    for route in routes:
        arcs = route.segments
        conflict = None
        # widest contradicting pair: arcs[i] must precede arcs[j] but arcs[j] already reaches arcs[i]
        for width in range(len(arcs) - 1, 0, -1):
            for i in range(len(arcs) - width):
                j = i + width
                if arcs[i] in succ and arcs[j] in succ and _reaches(succ, arcs[j], arcs[i]):
                    conflict = (arcs[i], arcs[j])
                    break
            if conflict:
                break
        if conflict is None and len(set(arcs)) == len(arcs):
            trial = {a: set(b) for a, b in succ.items()}
            for a, b in zip(arcs, arcs[1:]):
                trial.setdefault(a, set()).add(b)
                trial.setdefault(b, set())
            for a in arcs:
                trial.setdefault(a, set())
            if _acyclic(trial):
                succ = trial
                accepted.append(route)
                continue
            conflict = _any_cycle_pair(trial, arcs)
        rejected.append(Rejection(route, *conflict))
    return ArcOrdering(_topological(succ, accepted), accepted, rejected)


def _acyclic(succ) -> bool:
    indeg = {n: 0 for n in succ}
    for n in succ:
        for m in succ[n]:
            indeg[m] += 1
    stack = [n for n, d in indeg.items() if d == 0]
    count = 0
    while stack:
        n = stack.pop()
        count += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                stack.append(m)
    return count == len(succ)


def _any_cycle_pair(succ, arcs):
    for a, b in zip(arcs, arcs[1:]):
        if _reaches(succ, b, a):
            return (a, b)
    return (arcs[0], arcs[-1])


def _topological(succ, accepted: list[Route]) -> list[str]:
    """Kahn's algorithm preferring arcs that appear early in early routes."""
    rank = {}
    for ri, route in enumerate(accepted):
        for pos, arc in enumerate(route.segments):
            rank.setdefault(arc, (ri, pos, arc))
    indeg = {n: 0 for n in succ}
    for n in succ:
        for m in succ[n]:
            indeg[m] += 1
    heap = [rank[n] for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)[2]
        order.append(n)
        for m in sorted(succ[n]):
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(heap, rank[m])
    return order


def prune(network: Network, ordering: ArcOrdering) -> Network:
    """Restrict the network to the arcs of the accepted routes."""
    return network.restrict(ordering.order)


def plan_routes(network: Network, params, origin, destination, k) -> ArcOrdering:
    weight = min_run_weights(network, params)
    routes = k_shortest_paths(network, origin, destination, k, weight)
    return build_ordering(routes, network)
