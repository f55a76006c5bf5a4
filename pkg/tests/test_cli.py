from trajmatch.cli import main
from conftest import FIXTURES

MINI = FIXTURES / "mini"


def run(argv):
    return main(argv)


def test_knn_curve_writes_csv(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    assert run(["knn-curve", "--traj", str(MINI / "trajectory.csv"),
                "--k", "3", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "rank,distance"
    assert len(lines) == 402  # header + one row per point
    assert "elbow candidate" in capsys.readouterr().out


def test_knn_curve_missing_k(tmp_path, capsys):
    assert run(["knn-curve", "--traj", str(MINI / "trajectory.csv"),
                "--out", str(tmp_path / "c.csv")]) == 1


def test_knn_curve_k_too_large(tmp_path, capsys):
    rc = run(["knn-curve", "--traj", str(MINI / "trajectory.csv"),
              "--k", "5000", "--out", str(tmp_path / "c.csv")])
    assert rc == 2
    assert "smaller than" in capsys.readouterr().err


def test_staypoints_prints_counts(tmp_path, capsys):
    assert run(["staypoints", "--traj", str(MINI / "trajectory.csv"),
                "--eps", "0.00004", "--min-pts", "3",
                "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "cluster_count=2" in out
    assert "noise_count=159" in out
    assert "output_size=161" in out
    assert (tmp_path / "staypoints.csv").exists()
    assert (tmp_path / "reduced.csv").exists()


def test_staypoints_eps_zero_usage_error(tmp_path):
    assert run(["staypoints", "--traj", str(MINI / "trajectory.csv"),
                "--eps", "0", "--min-pts", "3",
                "--out-dir", str(tmp_path)]) == 1


def test_staypoints_all_noise_identity(tmp_path):
    assert run(["staypoints", "--traj", str(MINI / "trajectory.csv"),
                "--eps", "1e-12", "--min-pts", "3",
                "--out-dir", str(tmp_path)]) == 0
    reduced = (tmp_path / "reduced.csv").read_text()
    original = (MINI / "trajectory.csv").read_text()
    assert reduced == original


def test_reduce_command(tmp_path):
    out = tmp_path / "reduced.csv"
    assert run(["reduce", "--traj", str(MINI / "trajectory.csv"),
                "--eps", "0.00004", "--min-pts", "3", "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 162  # header + 161


def test_match_straight_fixture(tmp_path, capsys):
    net = tmp_path / "net.csv"
    traj = tmp_path / "traj.csv"
    net.write_text(
        "edge_id,node_from,node_to,wkt\n"
        'e1,a,b,"LINESTRING (-122.3 47.6, -122.3 47.604)"\n')
    rows = ["timestamp,lat,lon"]
    rows += [f"{i},{47.6 + i * 1e-4},-122.3" for i in range(10)]
    traj.write_text("\n".join(rows) + "\n")
    assert run(["match", "--network", str(net), "--traj", str(traj),
                "--out-dir", str(tmp_path / "out")]) == 0
    seq = (tmp_path / "out" / "edge_sequence.txt").read_text().split()
    assert seq == ["e1"]


def test_match_deterministic_outputs(tmp_path):
    args = ["match", "--network", str(MINI / "network.csv"),
            "--traj", str(MINI / "trajectory.csv")]
    assert run(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert run(args + ["--out-dir", str(tmp_path / "b")]) == 0
    for name in ("matched.csv", "edge_sequence.txt"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_match_corrupt_network(tmp_path, capsys):
    net = tmp_path / "net.csv"
    net.write_text('edge_id,node_from,node_to,wkt\ne1,a,b,"not-wkt"\n')
    rc = run(["match", "--network", str(net),
              "--traj", str(MINI / "trajectory.csv"),
              "--out-dir", str(tmp_path / "out")])
    assert rc == 2
    assert "row 2" in capsys.readouterr().err


def test_match_short_trajectory(tmp_path, capsys):
    traj = tmp_path / "t.csv"
    traj.write_text("timestamp,lat,lon\n0,47.6,-122.295\n")
    rc = run(["match", "--network", str(MINI / "network.csv"),
              "--traj", str(traj), "--out-dir", str(tmp_path / "out")])
    assert rc == 3


def test_eval_command(capsys, tmp_path):
    edges = tmp_path / "seq.txt"
    edges.write_text((MINI / "truth.txt").read_text())
    assert run(["eval", "--network", str(MINI / "network.csv"),
                "--edges", str(edges), "--truth", str(MINI / "truth.txt")]) == 0
    out = capsys.readouterr().out
    assert "correct_links=12" in out
    assert "total_truth_links=12" in out


def test_pipeline_fixture(tmp_path, capsys):
    assert run(["pipeline", "--network", str(MINI / "network.csv"),
                "--traj", str(MINI / "trajectory.csv"),
                "--truth", str(MINI / "truth.txt"),
                "--eps", "0.00004", "--min-pts", "3",
                "--out-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "volume_reduction_pct=" in out
    assert "accuracy_delta=0" in out
    assert (tmp_path / "report.txt").exists()
    assert (tmp_path / "eps_sweep.csv").exists()


def test_pipeline_missing_truth(tmp_path):
    rc = run(["pipeline", "--network", str(MINI / "network.csv"),
              "--traj", str(MINI / "trajectory.csv"),
              "--truth", str(tmp_path / "nope.txt"),
              "--eps", "0.00004", "--min-pts", "3",
              "--out-dir", str(tmp_path)])
    assert rc == 2


def test_pipeline_deterministic_excluding_timing(tmp_path):
    args = ["pipeline", "--network", str(MINI / "network.csv"),
            "--traj", str(MINI / "trajectory.csv"),
            "--truth", str(MINI / "truth.txt"),
            "--eps", "0.00004", "--min-pts", "3"]
    assert run(args + ["--out-dir", str(tmp_path / "a")]) == 0
    assert run(args + ["--out-dir", str(tmp_path / "b")]) == 0

    def stable_lines(d):
        text = (d / "report.txt").read_text().splitlines()
        return [l for l in text if not l.startswith("timing.")]

    assert stable_lines(tmp_path / "a") == stable_lines(tmp_path / "b")
    for name in ("volume_pair.csv", "eps_sweep.csv"):
        assert (tmp_path / "a" / name).read_bytes() == \
            (tmp_path / "b" / name).read_bytes()


def test_synth_roundtrip(tmp_path):
    assert run(["synth", "--seed", "11", "--dwell", "40:60:2.0",
                "--out-dir", str(tmp_path)]) == 0
    for name in ("network.csv", "trajectory.csv", "truth.txt"):
        assert (tmp_path / name).exists()


def test_synth_bad_dwell(tmp_path):
    assert run(["synth", "--seed", "11", "--dwell", "oops",
                "--out-dir", str(tmp_path)]) == 1
