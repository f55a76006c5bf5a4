"""Full comparison: match the raw trajectory vs the stay-point-reduced one.

Reproduces the headline experiment on the vendored fixture: volume
reduction, matching-time reduction, per-point speed gain, and the
correct-link accuracy delta. Run from the repo root:

    python3 demos/04_raw_vs_reduced.py
"""

from pathlib import Path

from trajmatch.evalbench import run_pipeline
from trajmatch.io import parse_ground_truth, parse_road_network, parse_trajectory

MINI = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "mini"


def main():
    network = parse_road_network(MINI / "network.csv")
    traj = parse_trajectory(MINI / "trajectory.csv")
    truth = parse_ground_truth(MINI / "truth.txt", network)

    rep = run_pipeline(network, traj, truth, eps=4e-05, min_pts=3)

    print(f"points: raw={rep.raw.input_points} reduced={rep.reduced.input_points} "
          f"({rep.volume_reduction_pct:.2f}% volume reduction)")
    print(f"clusters={rep.cluster_count} noise={rep.noise_count}")
    print(f"matching time: raw={rep.raw.matching_wall_time * 1e3:.1f} ms "
          f"reduced={rep.reduced.matching_wall_time * 1e3:.1f} ms "
          f"({rep.time_reduction_pct:.1f}% reduction)")
    print(f"per-point speed gain: {rep.speed_gain_pct:.1f}%")
    print(f"correct links: raw={rep.raw.correct_links} "
          f"reduced={rep.reduced.correct_links} of {rep.raw.total_truth_links} "
          f"(delta={rep.accuracy_delta})")


if __name__ == "__main__":
    main()
