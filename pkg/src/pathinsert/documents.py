"""Reading and writing network, timetable and parameter documents.

Two equivalent encodings are accepted:

* a line-oriented text format: ``[section]`` headers followed by one record
  per line of whitespace-separated ``key=value`` tokens (shell quoting
  applies, ``#`` starts a comment). Nested keys use dots (``a.station=A``),
  lists are comma separated and windows are written ``lo..hi``;
* a JSON tree with the same sections as top-level keys, each holding a list
  of records.

Times may be integer seconds, ``[d+]HH:MM[:SS]`` clock times or ISO-8601
local timestamps (seconds since 1970-01-01T00:00:00, no time zone).
"""

from __future__ import annotations

import json
import logging
import re
import shlex
from collections import defaultdict
from datetime import datetime

from .errors import DanglingReferenceError, DocumentError, ParameterError, TimetableError
from .model import (
    PATTERN_PAIRS,
    Direction,
    Margins,
    Network,
    ParameterSet,
    Segment,
    Station,
    StationConstraints,
    Timetable,
    TrainEvent,
    Transition,
)

log = logging.getLogger(__name__)

EPOCH = datetime(1970, 1, 1)
_CLOCK = re.compile(r"(?:(\d+)\+)?(\d+):(\d{2})(?::(\d{2}))?")

NETWORK_SECTIONS = ("stations", "segments", "transitions", "conflicts")
TIMETABLE_SECTIONS = ("events",)
PARAMETER_SECTIONS = ("defaults", "run_times", "beta", "gamma", "delta")


# ---------------------------------------------------------------- scalars


def parse_time(value) -> int:
    if isinstance(value, bool):
        raise ValueError(f"not a time: {value!r}")
    if isinstance(value, int):
        return value
    s = str(value).strip()
    if re.fullmatch(r"-?\d+", s):
        return int(s)
    m = _CLOCK.fullmatch(s)
    if m:
        days, h, mi, sec = m.groups()
        return int(days or 0) * 86400 + int(h) * 3600 + int(mi) * 60 + int(sec or 0)
    try:
        dt = datetime.fromisoformat(s)
    except ValueError:
        raise ValueError(f"not a time: {value!r}") from None
    if dt.tzinfo is not None:
        raise ValueError(f"time zones are not supported: {value!r}")
    return int((dt - EPOCH).total_seconds())


def parse_duration(value) -> int:
    d = parse_time(value)
    if d < 0:
        raise ValueError(f"negative duration: {value!r}")
    return d


def format_clock(t: int) -> str:
    """``[d+]HH:MM:SS`` for display."""
    if t < 0:
        return str(t)
    days, rem = divmod(t, 86400)
    h, rem = divmod(rem, 3600)
    m, s = divmod(rem, 60)
    clock = f"{h:02d}:{m:02d}:{s:02d}"
    return f"{days}+{clock}" if days else clock


def _tracks(value):
    if isinstance(value, (list, tuple)):
        items = [str(v) for v in value]
    else:
        items = [v for v in str(value).split(",") if v != ""]
    return tuple(items)


def _window(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        lo, hi = value
    else:
        lo, hi = str(value).split("..")
    lo, hi = parse_time(lo), parse_time(hi)
    if lo > hi:
        raise ValueError(f"empty window {value!r}")
    return (lo, hi)


def _direction(value):
    v = str(value).lower()
    if v in ("departing", "dep", "departure", "out"):
        return Direction.DEPARTING
    if v in ("arriving", "arr", "arrival", "in"):
        return Direction.ARRIVING
    raise ValueError(f"direction must be departing or arriving, not {value!r}")


# ------------------------------------------------------------ tree reading


def parse_line_document(text: str, source=None) -> dict[str, list[dict]]:
    """Parse the line-oriented format into the tree form (string values)."""
    tree: dict[str, list[dict]] = defaultdict(list)
    section = None
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise DocumentError("unterminated section header", line=n, source=source)
            section = line[1:-1].strip().lower()
            tree.setdefault(section, [])
            continue
        if section is None:
            raise DocumentError("record outside of a section", line=n, source=source)
        try:
            tokens = shlex.split(line, comments=True)
        except ValueError as exc:
            raise DocumentError(str(exc), line=n, source=source) from None
        record: dict = {"__line__": n}
        for tok in tokens:
            if "=" not in tok:
                raise DocumentError(f"expected key=value, got {tok!r}", line=n, source=source)
            key, value = tok.split("=", 1)
            target = record
            parts = key.split(".")
            for part in parts[:-1]:
                target = target.setdefault(part, {})
                if not isinstance(target, dict):
                    raise DocumentError("key used both as value and group", line=n, field=key, source=source)
            if parts[-1] in target:
                raise DocumentError("duplicate key", line=n, field=key, source=source)
            target[parts[-1]] = value
        tree[section].append(record)
    return dict(tree)


def parse_document(text: str, source=None) -> dict[str, list[dict]]:
    """Detect the encoding and return the tree form."""
    if text.lstrip().startswith("{"):
        try:
            tree = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(exc.msg, line=exc.lineno, source=source) from None
        if not isinstance(tree, dict):
            raise DocumentError("top level must be an object", source=source)
        return tree
    return parse_line_document(text, source)


class _Reader:
    """Field access on one record with line/field context in errors."""

    def __init__(self, record: dict, section: str, source=None):
        self.record = record
        self.section = section
        self.source = source
        self.line = record.get("__line__") if isinstance(record, dict) else None
        if not isinstance(record, dict):
            raise DocumentError(f"{section} entries must be records", source=source)

    def error(self, msg, field=None):
        return DocumentError(f"[{self.section}] {msg}", line=self.line, field=field, source=self.source)

    def get(self, key, conv=str, default=...):
        if key not in self.record or self.record[key] is None:
            if default is ...:
                raise self.error("missing field", key)
            return default
        try:
            return conv(self.record[key])
        except (TypeError, ValueError) as exc:
            raise self.error(str(exc), key) from None

    def sub(self, key):
        value = self.record.get(key)
        if value is None:
            raise self.error("missing field", key)
        if not isinstance(value, dict):
            raise self.error("expected a group of fields", key)
        value = dict(value)
        value.setdefault("__line__", self.line)
        return _Reader(value, self.section, self.source)


def _records(tree, section, source):
    value = tree.get(section, [])
    if not isinstance(value, list):
        raise DocumentError(f"section {section!r} must be a list", source=source)
    return [_Reader(r, section, source) for r in value]


def _transition(r: _Reader) -> Transition:
    return Transition(
        station=r.get("station"),
        station_track=r.get("track"),
        segment=r.get("segment"),
        segment_track=r.get("segment_track"),
        direction=r.get("direction", _direction),
    )


# ------------------------------------------------------------------ loaders


def load_network(document: str, source=None) -> Network:
    tree = parse_document(document, source)
    stations = []
    for r in _records(tree, "stations", source):
        cons = StationConstraints(
            min_dwell=r.get("min_dwell", parse_duration, 0),
            arrival=r.get("arrival_window", _window, None),
            departure=r.get("departure_window", _window, None),
        )
        tracks = r.get("tracks", _tracks)
        if not tracks:
            raise r.error("station needs at least one track", "tracks")
        sid = r.get("id")
        stations.append(Station(sid, r.get("name", str, sid), tracks, cons))
    segments = []
    for r in _records(tree, "segments", source):
        tracks = r.get("tracks", _tracks)
        if not tracks:
            raise r.error("segment needs at least one track", "tracks")
        segments.append(
            Segment(
                id=r.get("id"),
                start=r.get("from"),
                end=r.get("to"),
                tracks=tracks,
                blocks=r.get("blocks", int, 1),
                resource=r.get("resource", str, None),
            )
        )
    transitions = [_transition(r) for r in _records(tree, "transitions", source)]
    conflicts = [(_transition(r.sub("a")), _transition(r.sub("b"))) for r in _records(tree, "conflicts", source)]
    _unique([s.id for s in stations], "station")
    _unique([s.id for s in segments], "segment")
    net = Network(stations, segments, transitions, conflicts)
    lost = net.unreachable_stations()
    if lost:
        log.warning("network is disconnected; unreachable stations: %s", ", ".join(lost))
    return net


def _unique(ids, kind):
    seen = set()
    for i in ids:
        if i in seen:
            raise ParameterError(f"duplicate {kind} id {i!r}")
        seen.add(i)


def load_timetable(document: str, network: Network, source=None) -> Timetable:
    tree = parse_document(document, source)
    raw: dict[str, list] = defaultdict(list)
    if isinstance(tree.get("trains"), dict):
        for tid, evs in tree["trains"].items():
            for ev in evs:
                raw[str(tid)].append(_Reader(dict(ev, train=tid), "trains", source))
    for r in _records(tree, "events", source):
        raw[r.get("train")].append(r)

    trains = {}
    for tid, readers in raw.items():
        rows = []
        for r in readers:
            arr = r.get("arrival", parse_time)
            dep = r.get("departure", parse_time, arr)
            if arr > dep:
                raise TimetableError(
                    f"train {tid} departs {r.get('station')} at {dep} before arriving at {arr}"
                    + (f" (line {r.line})" if r.line else "")
                )
            rows.append((arr, dep, r))
        rows.sort(key=lambda x: (x[0], x[1]))
        trains[tid] = _resolve_events(tid, rows, network)
    return Timetable(trains, network)


def _resolve_events(tid, rows, network: Network) -> list[TrainEvent]:
    stations = [r.get("station") for _, _, r in rows]
    tracks = [r.get("track") for _, _, r in rows]
    for sid, j in zip(stations, tracks):
        st = network.stations.get(sid)
        if st is None:
            raise DanglingReferenceError("station", sid, f"train {tid}")
        if j not in st.tracks:
            raise DanglingReferenceError("track", j, f"train {tid} at station {sid}")
    seen = set()
    for sid in stations:
        if sid in seen:
            raise TimetableError(f"train {tid} revisits station {sid}; trains visit each station at most once")
        seen.add(sid)
    exits: list[Transition | None] = []
    entries: list[Transition | None] = [None]
    for i in range(len(rows) - 1):
        r = rows[i][2]
        s1, s2 = stations[i], stations[i + 1]
        seg_id = r.get("out_segment", str, None)
        if seg_id is None:
            cands = network.segments_between(s1, s2)
            if not cands:
                raise TimetableError(f"train {tid}: no segment from {s1} to {s2}")
            if len(cands) > 1:
                raise r.error(f"several segments from {s1} to {s2}; give out_segment", "out_segment")
            seg = cands[0]
        else:
            seg = network.segments.get(seg_id)
            if seg is None:
                raise DanglingReferenceError("segment", seg_id, f"train {tid}")
            if (seg.start, seg.end) != (s1, s2):
                raise TimetableError(f"train {tid}: segment {seg_id} does not lead from {s1} to {s2}")
        k = r.get("out_track", str, None)
        if k is None:
            usable = [
                kk
                for kk in seg.tracks
                if network.departing(s1, tracks[i], seg.id, kk) and network.arriving(s2, tracks[i + 1], seg.id, kk)
            ]
            if len(usable) != 1:
                raise r.error(f"cannot infer the track used on segment {seg.id}; give out_track", "out_track")
            k = usable[0]
        dep_tr = network.departing(s1, tracks[i], seg.id, k)
        arr_tr = network.arriving(s2, tracks[i + 1], seg.id, k)
        if dep_tr is None:
            raise DanglingReferenceError("transition", f"{s1}:{tracks[i]}>{seg.id}:{k}", f"train {tid}")
        if arr_tr is None:
            raise DanglingReferenceError("transition", f"{seg.id}:{k}>{s2}:{tracks[i + 1]}", f"train {tid}")
        exits.append(dep_tr)
        entries.append(arr_tr)
    exits.append(None)
    return [
        TrainEvent(stations[i], rows[i][0], rows[i][1], tracks[i], entries[i], exits[i]) for i in range(len(rows))
    ]


def load_parameters(document: str, network: Network, timetable: Timetable | None = None, source=None) -> ParameterSet:
    tree = parse_document(document, source)
    params = ParameterSet()
    for r in _records(tree, "defaults", source):
        for key in ("beta", "gamma", "delta", "delta_block"):
            if key in r.record:
                setattr(params, f"{key}_default", r.get(key, parse_duration))
    trains = set(timetable.trains) if timetable is not None else None

    def check_train(r):
        tid = r.get("train")
        if trains is not None and tid not in trains:
            raise DanglingReferenceError("train", tid, f"line {r.line}" if r.line else "")
        return tid

    def margins(r):
        return Margins(r.get("before", parse_duration), r.get("after", parse_duration))

    for r in _records(tree, "run_times", source):
        seg = r.get("segment")
        if seg not in network.segments:
            raise DanglingReferenceError("segment", seg, "run_times")
        for p in PATTERN_PAIRS:
            if p in r.record:
                params.run_time[(seg, p)] = r.get(p, parse_duration)
    for r in _records(tree, "beta", source):
        seg = r.get("segment")
        if seg not in network.segments:
            raise DanglingReferenceError("segment", seg, "beta")
        params.beta[(check_train(r), seg)] = margins(r)
    for r in _records(tree, "gamma", source):
        sid, j = r.get("station"), r.get("track")
        st = network.stations.get(sid)
        if st is None:
            raise DanglingReferenceError("station", sid, "gamma")
        if j not in st.tracks:
            raise DanglingReferenceError("track", j, f"gamma at {sid}")
        params.gamma[(check_train(r), sid, j)] = margins(r)
    for r in _records(tree, "delta", source):
        tr = _transition(r)
        if tr not in network.transitions:
            raise DanglingReferenceError("transition", str(tr), "delta")
        params.delta[(check_train(r), tr)] = margins(r)
    params.check()
    return params


# ---------------------------------------------------------------- writers


def _quote(value) -> str:
    s = str(value)
    return shlex.quote(s) if s == "" or re.search(r"[\s'\"#\\]", s) else s


def _line(record: dict, prefix="") -> list[str]:
    toks = []
    for key, value in record.items():
        if value is None:
            continue
        if isinstance(value, dict):
            toks.extend(_line(value, f"{prefix}{key}."))
        elif isinstance(value, (list, tuple)):
            if key.endswith("window"):
                toks.append(f"{prefix}{key}={value[0]}..{value[1]}")
            else:
                toks.append(f"{prefix}{key}={_quote(','.join(str(v) for v in value))}")
        else:
            toks.append(f"{prefix}{key}={_quote(value)}")
    return toks


def write_tree(tree: dict[str, list[dict]], fmt="text") -> str:
    if fmt == "json":
        return json.dumps(tree, indent=1) + "\n"
    out = []
    for section, records in tree.items():
        out.append(f"[{section}]")
        out.extend(" ".join(_line(r)) for r in records)
        out.append("")
    return "\n".join(out)


def _tr_record(tr: Transition) -> dict:
    return {
        "station": tr.station,
        "track": tr.station_track,
        "segment": tr.segment,
        "segment_track": tr.segment_track,
        "direction": tr.direction.value,
    }


def network_tree(net: Network) -> dict:
    stations = []
    for st in sorted(net.stations.values(), key=lambda s: s.id):
        rec = {"id": st.id, "name": st.name, "tracks": list(st.tracks)}
        c = st.constraints
        if c.min_dwell:
            rec["min_dwell"] = c.min_dwell
        if c.arrival is not None:
            rec["arrival_window"] = list(c.arrival)
        if c.departure is not None:
            rec["departure_window"] = list(c.departure)
        stations.append(rec)
    segments = []
    for seg in sorted(net.segments.values(), key=lambda s: s.id):
        rec = {"id": seg.id, "from": seg.start, "to": seg.end, "tracks": list(seg.tracks), "blocks": seg.blocks}
        if seg.resource is not None:
            rec["resource"] = seg.resource
        segments.append(rec)
    return {
        "stations": stations,
        "segments": segments,
        "transitions": [_tr_record(t) for t in sorted(net.transitions)],
        "conflicts": [{"a": _tr_record(a), "b": _tr_record(b)} for a, b in sorted(net.conflicts)],
    }


def timetable_tree(tt: Timetable) -> dict:
    events = []
    for tid in sorted(tt.trains):
        for ev in tt.trains[tid]:
            rec = {"train": tid, "station": ev.station, "arrival": ev.arrival, "departure": ev.departure, "track": ev.track}
            if ev.exit_transition is not None:
                rec["out_segment"] = ev.exit_transition.segment
                rec["out_track"] = ev.exit_transition.segment_track
            events.append(rec)
    return {"events": events}


def parameters_tree(params: ParameterSet) -> dict:
    runs = defaultdict(dict)
    for (seg, p), v in sorted(params.run_time.items()):
        runs[seg][p] = v
    return {
        "defaults": [
            {
                "beta": params.beta_default,
                "gamma": params.gamma_default,
                "delta": params.delta_default,
                "delta_block": params.delta_block_default,
            }
        ],
        "run_times": [{"segment": seg, **vals} for seg, vals in runs.items()],
        "beta": [
            {"train": a, "segment": seg, "before": m.before, "after": m.after}
            for (a, seg), m in sorted(params.beta.items())
        ],
        "gamma": [
            {"train": a, "station": s, "track": j, "before": m.before, "after": m.after}
            for (a, s, j), m in sorted(params.gamma.items())
        ],
        "delta": [
            {"train": a, **_tr_record(tr), "before": m.before, "after": m.after}
            for (a, tr), m in sorted(params.delta.items())
        ],
    }


def dump_network(net: Network, fmt="text") -> str:
    return write_tree(network_tree(net), fmt)


def dump_timetable(tt: Timetable, fmt="text") -> str:
    return write_tree(timetable_tree(tt), fmt)


def dump_parameters(params: ParameterSet, fmt="text") -> str:
    return write_tree(parameters_tree(params), fmt)


def read_file(path) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()
