"""Interval lists carrying the latest feasible origin departure.

A ``MappedInterval`` says: the inserted train can be at the current location
at any integer second ``t`` in ``[lo, hi]``, and the latest origin departure
that makes this possible is ``dep_lo + slope * (t - lo)``. Slopes are 0
(waiting or slow running from a fixed departure) or 1 (plain translation).

Lists are kept canonical: sorted, pairwise disjoint, pointwise maximal, and
built from maximal affine runs. Every public operation returns a canonical
list, so two lists are equal exactly when they describe the same function.
"""

from __future__ import annotations

import bisect
import itertools
from typing import NamedTuple, Sequence


class MappedInterval(NamedTuple):
    lo: int
    hi: int
    dep_lo: int
    slope: int = 1

    def dep(self, t: int) -> int:
        return self.dep_lo + self.slope * (t - self.lo)

    @property
    def dep_hi(self) -> int:
        return self.dep_lo + self.slope * (self.hi - self.lo)


FreeInterval = tuple[int, int]
FreePair = tuple[FreeInterval, FreeInterval]


def _munch(pieces) -> list[MappedInterval]:
    """Merge sorted disjoint pieces into maximal affine runs.

    Works point by point in effect: a run keeps absorbing the next integer
    second while its value stays on the run's line, so the result depends only
    on the pointwise function, never on how the input was cut.
    """
    out: list[MappedInterval] = []
    c_lo = c_hi = c_dep = 0
    c_slope = None  # None while the run is a single point
    active = False

    def flush():
        out.append(MappedInterval(c_lo, c_hi, c_dep, c_slope or 0))

    for lo, hi, dep_lo, slope in pieces:
        if lo == hi:
            slope = None
        if active and lo == c_hi + 1:
            step = dep_lo - (c_dep + (c_slope or 0) * (c_hi - c_lo))
            run = c_slope if c_slope is not None else step
            if step == run and run in (0, 1):
                if slope is None or slope == run:
                    c_hi, c_slope = hi, run
                    continue
                # only the first point of this piece lies on the run
                c_hi, c_slope = lo, run
                flush()
                c_lo, c_hi, c_dep = lo + 1, hi, dep_lo + slope
                c_slope = slope if lo + 1 < hi else None
                continue
        if active:
            flush()
        c_lo, c_hi, c_dep, c_slope = lo, hi, dep_lo, slope
        active = True
    if active:
        flush()
    return out


def normalize(items: Sequence[MappedInterval]) -> list[MappedInterval]:
    """Canonical form of an arbitrary item list (pointwise maximum)."""
    items = sorted(it for it in items if it.lo <= it.hi)
    if not items:
        return []
    if all(items[i].lo > items[i - 1].hi for i in range(1, len(items))):
        return _munch(items)

    bounds = sorted({it.lo for it in items} | {it.hi + 1 for it in items})
    pieces = []
    active: list[MappedInterval] = []
    k = 0
    n = len(items)
    for b, nb in zip(bounds, bounds[1:]):
        while k < n and items[k].lo == b:
            active.append(items[k])
            k += 1
        active = [it for it in active if it.hi >= b]
        if not active:
            continue
        c1 = c0 = None
        for it in active:
            if it.slope:
                v = it.dep_lo - it.lo
                if c1 is None or v > c1:
                    c1 = v
            elif c0 is None or it.dep_lo > c0:
                c0 = it.dep_lo
        hi = nb - 1
        if c0 is None:
            pieces.append((b, hi, b + c1, 1))
        elif c1 is None:
            pieces.append((b, hi, c0, 0))
        else:
            cross = c0 - c1  # the rising line reaches the constant here
            if cross > b:
                pieces.append((b, min(hi, cross - 1), c0, 0))
            if cross <= hi:
                lo = max(b, cross)
                pieces.append((lo, hi, lo + c1, 1))
    return _munch(pieces)


def union(*lists: Sequence[MappedInterval]) -> list[MappedInterval]:
    """Pointwise latest departure over the union of all domains."""
    nonempty = [lst for lst in lists if lst]
    if not nonempty:
        return []
    if len(nonempty) == 1:
        return list(nonempty[0])
    return normalize([it for lst in nonempty for it in lst])


def intersect(a: Sequence[MappedInterval], free: Sequence[FreeInterval]) -> list[MappedInterval]:
    """Restrict a canonical list to the (sorted, disjoint) free intervals."""
    out = []
    i = j = 0
    while i < len(a) and j < len(free):
        it = a[i]
        flo, fhi = free[j]
        lo = max(it.lo, flo)
        hi = min(it.hi, fhi)
        if lo <= hi:
            out.append((lo, hi, it.dep(lo), it.slope))
        if it.hi < fhi:
            i += 1
        else:
            j += 1
    return _munch(out)


def _clip(a: Sequence[MappedInterval], lo: int, hi: int) -> list[MappedInterval]:
    """``intersect(a, [(lo, hi)])`` touching only the overlapping items."""
    k = bisect.bisect_right(a, (lo, float("inf"))) - 1
    if k < 0 or a[k].hi < lo:
        k += 1
    out = []
    for it in itertools.islice(a, k, None):
        if it.lo > hi:
            break
        out.append((max(it.lo, lo), min(it.hi, hi), it.dep(max(it.lo, lo)), it.slope))
    return _munch(out)


def _prefix_max_slide(items: Sequence[MappedInterval], d: int, target: FreeInterval, out: list) -> None:
    """Append pieces of ``t -> max{dep(e) : e <= t - d}`` restricted to ``target``.

    ``items`` is canonical and already confined to the entry interval.
    """
    tlo, thi = target
    if not items or items[0].lo + d > thi:
        return
    pieces = []
    best = None
    prev_hi = None
    for it in items:
        if prev_hi is not None and it.lo > prev_hi + 1:
            pieces.append((prev_hi + 1, it.lo - 1, best, 0))
        if best is None or it.dep_lo > best:
            pieces.append((it.lo, it.hi, it.dep_lo, it.slope))
            best = it.dep_hi
        elif it.slope and it.dep_hi > best:
            cross = it.lo + (best - it.dep_lo)
            pieces.append((it.lo, cross, best, 0))
            if cross < it.hi:
                pieces.append((cross + 1, it.hi, best + 1, 1))
            best = it.dep_hi
        else:
            pieces.append((it.lo, it.hi, best, 0))
        prev_hi = it.hi
    pieces.append((prev_hi + 1, thi - d, best, 0))
    for lo, hi, dep_lo, slope in pieces:
        lo_t = max(lo + d, tlo)
        hi_t = min(hi + d, thi)
        if lo_t <= hi_t:
            out.append((lo_t, hi_t, dep_lo + slope * (lo_t - d - lo), slope))


def shift(a: Sequence[MappedInterval], d: int, pairs: Sequence[FreePair]) -> list[MappedInterval]:
    """Traverse a segment taking at least ``d`` seconds.

    For each free pair ``(entry, exit)`` an exit time ``t`` in ``exit`` is
    reachable from any entry time ``e`` in ``a`` and ``entry`` with
    ``t - e >= d``; the latest departure over those entries is kept. That
    covers both the literal translation by ``d`` and the constant-departure
    continuation for slower running.
    """
    if d < 0:
        raise ValueError("running time must be non-negative")
    out: list = []
    for entry, exit_ in pairs:
        _prefix_max_slide(_clip(a, *entry), d, exit_, out)
    return _munch(sorted(out)) if _disjoint(out) else normalize([MappedInterval(*p) for p in out])


def extend(a: Sequence[MappedInterval], free: Sequence[FreeInterval], min_dwell: int = 0) -> list[MappedInterval]:
    """Add waiting within each free interval.

    A time ``t`` is covered when the train was present at some ``t' <= t -
    min_dwell`` in the same free interval; it carries the best such
    departure. With ``min_dwell == 0`` this is ``a`` plus constant tails.
    """
    out: list = []
    for iv in free:
        _prefix_max_slide(_clip(a, *iv), min_dwell, iv, out)
    return _munch(out)


def _disjoint(pieces) -> bool:
    pieces.sort()
    return all(pieces[i][0] > pieces[i - 1][1] for i in range(1, len(pieces)))


def from_free(free: Sequence[FreeInterval]) -> list[MappedInterval]:
    """Departure at any free instant: identity mapping."""
    return [MappedInterval(lo, hi, lo, 1) for lo, hi in free]


def evaluate(a: Sequence[MappedInterval], t: int) -> int | None:
    """Latest departure at presence time ``t``, or None outside the domain."""
    k = bisect.bisect_right(a, (t, float("inf"))) - 1
    if k >= 0 and a[k].lo <= t <= a[k].hi:
        return a[k].dep(t)
    return None


def earliest_with_dep(a: Sequence[MappedInterval], dep: int, lo: int, hi: int) -> int | None:
    """Earliest ``t`` in ``[lo, hi]`` whose latest departure equals ``dep``."""
    best = None
    for it in a:
        if it.lo > hi:
            break
        if it.hi < lo:
            continue
        a_lo, a_hi = max(it.lo, lo), min(it.hi, hi)
        if it.slope:
            t = it.lo + (dep - it.dep_lo)
            if a_lo <= t <= a_hi:
                best = t if best is None else min(best, t)
        elif it.dep_lo == dep:
            best = a_lo if best is None else min(best, a_lo)
        if best is not None:
            return best
    return best


def total_length(a: Sequence[MappedInterval]) -> int:
    return sum(it.hi - it.lo + 1 for it in a)


def format_table(a: Sequence[MappedInterval]) -> str:
    """One line per item: presence interval and mapped departures."""
    return "\n".join(f"[{it.lo}, {it.hi}] -> [{it.dep_lo}, {it.dep_hi}] slope {it.slope}" for it in a)
