"""Detect stay-points with DBSCAN and reduce the trajectory.

Shows the cluster summaries (mean position, arrival/leave times, member
counts) and the size of the reduced trajectory. Run from the repo root:

    python3 demos/02_staypoint_reduction.py
"""

from pathlib import Path

from trajmatch.io import parse_trajectory
from trajmatch.staypoint import (
    DbscanParams,
    dbscan,
    reduce_trajectory,
    summarize_clusters,
    threshold_staypoint_detect,
)

MINI = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "mini"


def main():
    traj = parse_trajectory(MINI / "trajectory.csv")
    labels = dbscan(traj, DbscanParams(eps=4e-05, min_pts=3))
    print(f"{len(traj)} points -> {labels.cluster_count} clusters, "
          f"{labels.noise_count} noise")

    sps = summarize_clusters(traj, labels)
    for s in sps:
        print(f"  cluster {s.cluster_id}: center=({s.y:.6f}, {s.x:.6f}) "
              f"t=[{s.t_a:.0f}, {s.t_l:.0f}] members={s.member_count}")

    red = reduce_trajectory(traj, labels, sps)
    pct = 100.0 * (len(traj) - len(red.trajectory)) / len(traj)
    print(f"reduced trajectory: {len(red.trajectory)} points "
          f"({pct:.2f}% volume reduction)")

    # a density-free baseline for comparison
    baseline = threshold_staypoint_detect(traj, delta=10.0, tau=60.0)
    print(f"threshold baseline finds {len(baseline)} stay windows:")
    for s in baseline:
        print(f"  window t=[{s.t_a:.0f}, {s.t_l:.0f}] members={s.member_count}")


if __name__ == "__main__":
    main()
