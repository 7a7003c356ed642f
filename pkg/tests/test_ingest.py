import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import random_routes
from routeautomata.frl import AsSymbol, IpPrefix, LoopDetected, Route
from routeautomata.ingest import (
    AsSetPath, Malformed, dump_simple, ingest_file, ingest_lines, parse_bgpdump_m, parse_simple,
)

P22 = IpPrefix.parse("24.120.56.0/22")


def bgpdump_line(path, prefix, peer_as=3356):
    return f"TABLE_DUMP2|1438387200|B|4.69.184.193|{peer_as}|{prefix}|{path}|IGP|4.69.184.193|0|0||NAG||"


def test_parse_simple():
    r = parse_simple("701 3356 20195|24.120.56.0/22")
    assert r == Route.from_asns([701, 3356, 20195], P22)
    assert parse_simple("701 701 20195|24.120.56.0/22").path[:2] == (AsSymbol(701, 1), AsSymbol(701, 2))


@pytest.mark.parametrize("line", ["701 3356|not-a-prefix", "701 3356 24.120.56.0/22", "701 x|1.0.0.0/8", "|1.0.0.0/8"])
def test_parse_simple_malformed(line):
    with pytest.raises(Malformed):
        parse_simple(line)


def test_parse_simple_loop():
    with pytest.raises(LoopDetected):
        parse_simple("1 2 1|1.0.0.0/8")


def test_parse_bgpdump():
    r = parse_bgpdump_m(bgpdump_line("3356 22822 23005 20195", "24.120.56.0/22"))
    assert r == Route.from_asns([3356, 22822, 23005, 20195], P22)


def test_parse_bgpdump_as_set_and_arity():
    with pytest.raises(AsSetPath):
        parse_bgpdump_m(bgpdump_line("3356 {64512,64513}", "24.120.56.0/22"))
    with pytest.raises(Malformed):
        parse_bgpdump_m("TABLE_DUMP2|1438387200|B|4.69.184.193|3356")


def test_parse_bgpdump_skips_non_rib_lines():
    assert parse_bgpdump_m("BGP4MP|1438387200|W|4.69.184.193|3356|24.120.56.0/22") is None


def test_duplicate_counted(tmp_path):
    f = tmp_path / "r.txt"
    f.write_text("# comment\n1 2|10.0.0.0/8\n\n1 2|10.0.0.0/8\n3 2|10.0.0.0/8\n")
    routes, rep = ingest_file(f)
    assert len(routes) == 2
    assert rep.duplicate_routes == 1
    assert rep.accepted == 2
    assert rep.distinct_asns == 3
    assert rep.distinct_paths == 2


def test_empty_file(tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("")
    routes, rep = ingest_file(f)
    assert routes == set()
    assert all(v == 0 for v in rep.as_dict().values())


def test_missing_file_raises(tmp_path):
    with pytest.raises(OSError):
        ingest_file(tmp_path / "nope.txt")


def test_bgpdump_fixture_with_as_sets(tmp_path):
    rng = random.Random(3)
    lines = []
    as_set_at = set(rng.sample(range(1000), 5))
    for i in range(1000):
        prefix = f"10.{i // 256}.{i % 256}.0/24"
        if i in as_set_at:
            lines.append(bgpdump_line("3356 174 {64512,64513}", prefix))
        else:
            lines.append(bgpdump_line(f"3356 {1000 + i % 37} {5000 + i}", prefix))
    f = tmp_path / "rib.txt"
    f.write_text("\n".join(lines) + "\n")
    routes, rep = ingest_file(f, "bgpdump-m")
    assert rep.accepted == 995
    assert rep.dropped_as_set == 5
    assert len(routes) == 995
    assert rep.route_lines == 1000


def test_ipv6_counted_separately():
    routes, rep = ingest_lines([bgpdump_line("3356 20195", "2001:db8::/32")], "bgpdump-m")
    assert not routes
    assert rep.dropped_ipv6 == 1


def test_round_trip(tmp_path):
    routes = random_routes(random.Random(5), 300)
    f = tmp_path / "dump.txt"
    with open(f, "w") as fp:
        dump_simple(routes, fp)
    again, rep = ingest_file(f)
    assert again == routes
    assert rep.duplicate_routes == 0


def test_dump_is_sorted_and_stable():
    routes = random_routes(random.Random(8), 50)
    a, b = io.StringIO(), io.StringIO()
    dump_simple(routes, a)
    dump_simple(list(routes)[::-1], b)
    assert a.getvalue() == b.getvalue()


good = st.builds(
    lambda path, octet: " ".join(map(str, path)) + f"|10.{octet}.0.0/16",
    st.lists(st.integers(1, 9), min_size=1, max_size=5), st.integers(0, 255),
)
junk = st.sampled_from(["1 2", "x|1.0.0.0/8", "1 2|300.0.0.0/8", "1 2|1.0.0.0/40", "1 {2,3}|1.0.0.0/8", "|", "1 2 1|1.0.0.0/8"])


@settings(max_examples=200)
@given(st.lists(st.one_of(good, junk), max_size=40))
def test_counter_conservation(lines):
    _, rep = ingest_lines(lines)
    assert rep.route_lines == len(lines)
