import math

import pytest

from trajmatch.geo import GeoPoint
from trajmatch.io import (
    ParseError,
    Trajectory,
    TrajectoryRecord,
    build_network,
    parse_ground_truth,
    parse_road_network,
    parse_trajectory,
    write_trajectory,
)


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_trajectory_basic(tmp_path):
    p = write(tmp_path / "t.csv",
              "timestamp,lat,lon\n0,47.0,-122.0\n1,47.001,-122.0\n2,47.002,-122.0\n")
    traj = parse_trajectory(p)
    assert len(traj) == 3
    assert [r.source_index for r in traj] == [0, 1, 2]
    assert traj[1].position == GeoPoint(47.001, -122.0)


def test_parse_trajectory_iso_timestamps(tmp_path):
    p = write(tmp_path / "t.csv",
              "timestamp,lat,lon\n"
              "2020-01-01T00:00:00Z,47.0,-122.0\n"
              "2020-01-01T00:00:01Z,47.001,-122.0\n")
    traj = parse_trajectory(p)
    assert traj[1].timestamp - traj[0].timestamp == 1.0


def test_parse_trajectory_comment_lines(tmp_path):
    p = write(tmp_path / "t.csv",
              "# a comment\ntimestamp,lat,lon\n0,47.0,-122.0\n# mid comment\n1,47.0,-122.0\n")
    assert len(parse_trajectory(p)) == 2


def test_parse_trajectory_bad_latitude(tmp_path):
    p = write(tmp_path / "t.csv", "timestamp,lat,lon\n0,91.0,-122.0\n")
    with pytest.raises(ParseError, match="row 2"):
        parse_trajectory(p)


def test_parse_trajectory_non_monotonic(tmp_path):
    p = write(tmp_path / "t.csv", "timestamp,lat,lon\n5,47.0,-122.0\n4,47.0,-122.0\n")
    with pytest.raises(ParseError, match="non-monotonic"):
        parse_trajectory(p)


def test_parse_trajectory_equal_timestamps_ok(tmp_path):
    p = write(tmp_path / "t.csv", "timestamp,lat,lon\n5,47.0,-122.0\n5,47.0001,-122.0\n")
    assert len(parse_trajectory(p)) == 2


def test_parse_trajectory_empty(tmp_path):
    p = write(tmp_path / "t.csv", "")
    with pytest.raises(ParseError):
        parse_trajectory(p)


def test_trajectory_roundtrip(tmp_path):
    p = write(tmp_path / "t.csv",
              "timestamp,lat,lon\n0,47.123456789,-122.987654321\n"
              "1.5,47.2,-122.1\n3,47.3,-122.2\n")
    traj = parse_trajectory(p)
    out = tmp_path / "out.csv"
    write_trajectory(traj, out)
    again = parse_trajectory(out)
    assert [(r.timestamp, r.position, r.source_index) for r in traj] == \
           [(r.timestamp, r.position, r.source_index) for r in again]


NET_CSV = (
    "edge_id,node_from,node_to,wkt\n"
    'e1,n1,n2,"LINESTRING (-122.0 47.0, -122.0 47.001)"\n'
    'e2,n2,n3,"LINESTRING (-122.0 47.001, -121.999 47.001)"\n'
)


def test_parse_network_adjacency(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    assert set(net.edges) == {"e1", "e2"}
    assert net.adjacency["n2"] == {"e1", "e2"}
    assert net.adjacency["n1"] == {"e1"}


def test_parse_network_duplicate_edge(tmp_path):
    dup = NET_CSV + 'e1,n3,n4,"LINESTRING (-121.999 47.001, -121.998 47.001)"\n'
    with pytest.raises(ParseError, match="duplicate"):
        parse_road_network(write(tmp_path / "n.csv", dup))


def test_parse_network_short_geometry(tmp_path):
    bad = 'edge_id,node_from,node_to,wkt\ne1,n1,n2,"LINESTRING (-122.0 47.0)"\n'
    with pytest.raises(ParseError):
        parse_road_network(write(tmp_path / "n.csv", bad))


def test_network_edge_length_consistency(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    for e in net.edges.values():
        total = 0.0
        for u, v in zip(e.geometry.vertices, e.geometry.vertices[1:]):
            total += math.hypot(v.x - u.x, v.y - u.y)
        assert e.length == pytest.approx(total, abs=1e-6)
        assert e.length > 0


def test_network_adjacency_symmetry(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    for node, ids in net.adjacency.items():
        for eid in ids:
            e = net.edges[eid]
            assert node in (e.node_from, e.node_to)
    for e in net.edges.values():
        assert e.edge_id in net.adjacency[e.node_from]
        assert e.edge_id in net.adjacency[e.node_to]


def test_parse_ground_truth(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    p = write(tmp_path / "truth.txt", "e1\ne2\ne1\n")
    route = parse_ground_truth(p, net)
    assert route.edge_ids == ("e1", "e2", "e1")


def test_parse_ground_truth_unknown_edge(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    p = write(tmp_path / "truth.txt", "e1\nXYZ\n")
    with pytest.raises(ParseError, match="XYZ"):
        parse_ground_truth(p, net)


def test_parse_ground_truth_empty(tmp_path):
    net = parse_road_network(write(tmp_path / "n.csv", NET_CSV))
    with pytest.raises(ParseError):
        parse_ground_truth(write(tmp_path / "truth.txt", ""), net)


def test_trajectory_class_rejects_decreasing():
    r0 = TrajectoryRecord(5.0, GeoPoint(0, 0), 0)
    r1 = TrajectoryRecord(4.0, GeoPoint(0, 0), 1)
    with pytest.raises(ParseError):
        Trajectory([r0, r1])


def test_build_network_origin_is_centroid():
    edges = [("e1", "a", "b", [GeoPoint(10.0, 20.0), GeoPoint(12.0, 22.0)])]
    net = build_network(edges)
    assert net.projection.origin == GeoPoint(11.0, 21.0)
