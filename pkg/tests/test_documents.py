from pathlib import Path

import pytest
from helpers import line, params, timetable

from pathinsert.documents import (
    dump_network,
    dump_parameters,
    dump_timetable,
    format_clock,
    load_network,
    load_parameters,
    load_timetable,
    parse_time,
    read_file,
)
from pathinsert.errors import DanglingReferenceError, DocumentError, MissingRunTimeError, TimetableError
from pathinsert.generate import GenConfig, generate
from pathinsert.model import Direction, Margins, Transition
from pathinsert.verify import validate

TOY = Path(__file__).parent / "data" / "toy"

ABC = """
[stations]
id=A tracks=1
id=B tracks=1
id=C tracks=1
[segments]
id=AB from=A to=B tracks=1 resource=ab
id=BA from=B to=A tracks=1 resource=ab
id=BC from=B to=C tracks=1 resource=bc
id=CB from=C to=B tracks=1 resource=bc
[transitions]
station=A track=1 segment=AB segment_track=1 direction=departing
station=B track=1 segment=BC segment_track=1 direction=departing
station=B track=1 segment=BA segment_track=1 direction=departing
station=C track=1 segment=CB segment_track=1 direction=departing
station=B track=1 segment=AB segment_track=1 direction=arriving
station=C track=1 segment=BC segment_track=1 direction=arriving
station=A track=1 segment=BA segment_track=1 direction=arriving
station=B track=1 segment=CB segment_track=1 direction=arriving
"""

RUNS = """
[run_times]
segment=AB RR=300 SR=330 RS=330 SS=360
segment=BA RR=300 SR=330 RS=330 SS=360
segment=BC RR=300 SR=330 RS=330 SS=360
segment=CB RR=300 SR=330 RS=330 SS=360
"""


def toy():
    net = load_network(read_file(TOY / "network.txt"), TOY / "network.txt")
    tt = load_timetable(read_file(TOY / "timetable.txt"), net)
    return net, tt, load_parameters(read_file(TOY / "params.txt"), net, tt)


def test_parse_time_forms():
    assert parse_time(42) == 42
    assert parse_time("07:30") == 27000
    assert parse_time("07:30:15") == 27015
    assert parse_time("2+01:00") == 2 * 86400 + 3600
    assert parse_time("1970-01-02T00:00:10") == 86410
    assert format_clock(2 * 86400 + 3600) == "2+01:00:00"
    assert parse_time(32 * 86400) == 32 * 86400
    with pytest.raises(ValueError):
        parse_time("seven")


def test_three_station_line():
    net = load_network(ABC)
    assert len(net.segments) == 4
    fwd = [s for s in net.segments.values() if s.start < s.end]
    assert len(fwd) == 2
    deps = [t for t in net.transitions if t.direction is Direction.DEPARTING]
    assert len(deps) == 4 and len(net.transitions) == 8


def test_dangling_track():
    with pytest.raises(DanglingReferenceError) as exc:
        load_network(ABC + "station=A track=2 segment=AB segment_track=1 direction=departing\n")
    assert "'2'" in str(exc.value)


def test_syntax_error_has_line():
    with pytest.raises(DocumentError) as exc:
        load_network("[stations]\nid=A tracks\n")
    assert exc.value.line == 2


def test_segment_occupation_from_events():
    net = load_network(ABC.replace("tracks=1\nid=B tracks=1", "tracks=1\nid=B tracks=1,2"))
    doc = "[events]\ntrain=T station=A arrival=07:00 departure=07:02 track=1\n"
    doc += "train=T station=B arrival=07:20 departure=07:21 track=1\n"
    tt = load_timetable(doc, net)
    occ = tt.segment_use[("AB", "1")]
    assert [(o.train, o.entry, o.exit) for o in occ] == [("T", parse_time("07:02"), parse_time("07:20"))]


def test_monotonicity_error():
    doc = "[events]\ntrain=T station=A arrival=07:00 departure=07:00 track=1\n"
    doc += "train=T station=B arrival=07:20 departure=07:19 track=1\n"
    with pytest.raises(TimetableError, match="before arriving"):
        load_timetable(doc, load_network(ABC))


def test_revisit_error():
    doc = "[events]\n"
    for s, t in (("A", "07:00"), ("B", "07:10"), ("A", "07:20")):
        doc += f"train=T station={s} arrival={t} departure={t} track=1\n"
    with pytest.raises(TimetableError, match="at most once"):
        load_timetable(doc, load_network(ABC))


def test_parameter_defaults():
    net = load_network(ABC)
    p = load_parameters("[beta]\n" + RUNS, net)
    assert p.resolve_beta("T", "AB") == Margins(180, 180)
    tr = Transition("B", "1", "BC", "1", Direction.DEPARTING)
    # existing train arrives, inserted train departs afterwards
    assert p.resolve_delta("T", tr, Direction.ARRIVING).after == 60
    assert p.resolve_delta("T", tr, Direction.DEPARTING) == Margins(180, 180)


def test_missing_run_time_named():
    net = load_network(ABC)
    with pytest.raises(MissingRunTimeError) as exc:
        load_parameters(RUNS.replace(" SS=360\nsegment=BA", "\nsegment=BA", 1), net)
    assert (exc.value.segment, exc.value.pattern) == ("AB", "SS")


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_round_trip(fmt):
    net, tt, p = toy()
    net2 = load_network(dump_network(net, fmt))
    assert net2 == net
    tt2 = load_timetable(dump_timetable(tt, fmt), net2)
    assert tt2.trains == tt.trains
    p.delta[("N1", sorted(net.transitions)[0])] = Margins(30, 90)
    p2 = load_parameters(dump_parameters(p, fmt), net2, tt2)
    assert p2 == p


def test_generated_round_trip():
    inst = generate(GenConfig(stations=40, trains=20, seed=5))
    text = dump_network(inst.network)
    assert load_network(text) == inst.network
    assert len(inst.network.segments) == 39 * 2


def test_validate_toy_clean():
    assert validate(*toy()) == []


def test_validate_segment_headway():
    net = line(["A", "B"])
    tt = timetable(net, {"T1": [("A", 0, 0, "1"), ("B", 300, 300, "1")], "T2": [("A", 60, 60, "1"), ("B", 360, 360, "1")]})
    diags = validate(net, tt, params(net))
    seg = [d for d in diags if "segment" in d.message]
    assert len(seg) == 1
    assert seg[0].trains == ("T1", "T2") and seg[0].element == "A-B:1"


def test_validate_transition_conflict():
    net = line(["A", "B"], tracks=("1", "2"))
    # T2 leaves A on the same segment track 170 s after T1: 10 s short of 180
    tt = timetable(
        net,
        {"T1": [("A", 0, 0, "1"), ("B", 600, 600, "1")], "T2": [("A", 170, 170, "2"), ("B", 800, 800, "2")]},
    )
    p = params(net, beta_default=0)
    diags = validate(net, tt, p)
    moves = [d for d in diags if d.message.startswith("transition")]
    assert moves and all(d.trains == ("T1", "T2") for d in moves)
    assert "margin 180" in moves[0].message
