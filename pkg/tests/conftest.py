import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

TOY = Path(__file__).parent / "data" / "toy"


@pytest.fixture
def toy_instance():
    from pathinsert.documents import load_network, load_parameters, load_timetable, read_file

    net = load_network(read_file(TOY / "network.txt"))
    tt = load_timetable(read_file(TOY / "timetable.txt"), net)
    return net, tt, load_parameters(read_file(TOY / "params.txt"), net, tt)
