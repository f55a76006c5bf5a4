"""Stay-point detection: DBSCAN clustering, k-NN elbow curve, reduction.

Two metric spaces are supported:
  degree-euclidean: plain Euclidean distance on raw (lon, lat) degrees,
      matching epsilon values quoted in degrees;
  meter-planar: Euclidean distance on locally projected meters.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .geo import GeoPoint, Projection, haversine_distance
from .io import Trajectory, TrajectoryRecord

NOISE = -1

DEGREE_EUCLIDEAN = "degree-euclidean"
METER_PLANAR = "meter-planar"


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int
    metric_space: str = DEGREE_EUCLIDEAN

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be > 0")
        if self.min_pts < 1:
            raise ValueError("min_pts must be >= 1")
        if self.metric_space not in (DEGREE_EUCLIDEAN, METER_PLANAR):
            raise ValueError(f"unknown metric_space {self.metric_space!r}")


@dataclass
class ClusterLabel:
    labels: np.ndarray  # per record: NOISE or cluster ordinal >= 0
    core: np.ndarray    # per record: bool

    @property
    def cluster_count(self) -> int:
        non_noise = self.labels[self.labels != NOISE]
        return int(non_noise.max()) + 1 if non_noise.size else 0

    @property
    def noise_count(self) -> int:
        return int(np.sum(self.labels == NOISE))


@dataclass(frozen=True)
class StayPoint:
    x: float            # mean longitude, degrees
    y: float            # mean latitude, degrees
    t_a: float          # arrival timestamp
    t_l: float          # leave timestamp
    member_count: int
    cluster_id: int


@dataclass
class ReducedTrajectory:
    trajectory: Trajectory
    provenance: tuple[str, ...]  # per record: "original" or "representative:<id>"


@dataclass
class KnnCurve:
    k: int
    distances: np.ndarray  # sorted ascending, one entry per input point


@dataclass(frozen=True)
class ElbowCandidate:
    index: int
    distance: float
    score: float


def _coords(traj: Trajectory, metric_space: str) -> np.ndarray:
    """Point coordinates as an (n, 2) array in the chosen metric space."""
    lats = np.array([r.position.lat for r in traj])
    lons = np.array([r.position.lon for r in traj])
    if metric_space == DEGREE_EUCLIDEAN:
        return np.column_stack([lons, lats])
    origin = GeoPoint(float(lats.mean()), float(lons.mean()))
    proj = Projection(origin)
    pts = [proj.project(r.position) for r in traj]
    return np.array([[p.x, p.y] for p in pts])


def knn_distance_curve(traj: Trajectory, k: int,
                       metric_space: str = DEGREE_EUCLIDEAN) -> KnnCurve:
    """Sorted distances to each point's k-th nearest other point."""
    n = len(traj)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k >= n:
        raise ValueError(f"k={k} must be smaller than the point count ({n})")
    coords = _coords(traj, metric_space)
    tree = cKDTree(coords)
    dists, _ = tree.query(coords, k=k + 1)  # column 0 is the point itself
    return KnnCurve(k=k, distances=np.sort(dists[:, k]))


def dbscan(traj: Trajectory, params: DbscanParams) -> ClusterLabel:
    """DBSCAN with self-inclusive neighborhood counting.

    A point is core iff its eps-ball (including itself) holds >= min_pts
    points. Border points join the first cluster that reaches them; the
    scan runs in source_index order, so output is deterministic.
    """
    n = len(traj)
    coords = _coords(traj, params.metric_space)
    tree = cKDTree(coords)
    neighborhoods = tree.query_ball_point(coords, r=params.eps)

    labels = np.full(n, NOISE, dtype=int)
    core = np.array([len(nb) >= params.min_pts for nb in neighborhoods])
    visited = np.zeros(n, dtype=bool)
    cluster_id = 0
    for start in range(n):
        if visited[start] or not core[start]:
            continue
        # grow one cluster from this core point
        queue = [start]
        visited[start] = True
        labels[start] = cluster_id
        while queue:
            p = queue.pop(0)
            for q in sorted(neighborhoods[p]):
                if labels[q] == NOISE:
                    labels[q] = cluster_id
                if not visited[q] and core[q]:
                    visited[q] = True
                    queue.append(q)
        cluster_id += 1
    return ClusterLabel(labels=labels, core=core)


def summarize_clusters(traj: Trajectory, labels: ClusterLabel) -> list[StayPoint]:
    """Per-cluster mean coordinates plus arrival/leave timestamps."""
    out = []
    for cid in range(labels.cluster_count):
        members = [r for r, lab in zip(traj, labels.labels) if lab == cid]
        out.append(StayPoint(
            x=sum(r.position.lon for r in members) / len(members),
            y=sum(r.position.lat for r in members) / len(members),
            t_a=min(r.timestamp for r in members),
            t_l=max(r.timestamp for r in members),
            member_count=len(members),
            cluster_id=cid,
        ))
    return out


def reduce_trajectory(traj: Trajectory, labels: ClusterLabel,
                      stay_points: list[StayPoint]) -> ReducedTrajectory:
    """Collapse each cluster to one representative at its mean position.

    The representative carries the cluster's arrival timestamp and sits at
    the temporal position of the cluster's earliest member; noise records
    pass through untouched.
    """
    by_id = {s.cluster_id: s for s in stay_points}
    entries = []  # (timestamp, source_index, record, provenance)
    for r, lab in zip(traj, labels.labels):
        if lab == NOISE:
            entries.append((r.timestamp, r.source_index, r, "original"))
    for cid in range(labels.cluster_count):
        s = by_id[cid]
        first = min(r.source_index for r, lab in zip(traj, labels.labels) if lab == cid)
        rec = TrajectoryRecord(s.t_a, GeoPoint(s.y, s.x), source_index=first)
        entries.append((s.t_a, first, rec, f"representative:{cid}"))
    entries.sort(key=lambda e: (e[0], e[1]))
    reduced = Trajectory([e[2] for e in entries], traj_id=traj.id + ":reduced")
    return ReducedTrajectory(reduced, tuple(e[3] for e in entries))


def threshold_staypoint_detect(traj: Trajectory, delta: float = 10.0,
                               tau: float = 60.0) -> list[StayPoint]:
    """Baseline detector: maximal windows where every consecutive hop is
    under delta meters (haversine) and the dwell exceeds tau seconds."""
    if delta <= 0 or tau <= 0:
        raise ValueError("delta and tau must be > 0")
    recs = traj.records
    out = []
    i = 0
    n = len(recs)
    while i < n:
        j = i
        while j + 1 < n and haversine_distance(recs[j].position,
                                               recs[j + 1].position) < delta:
            j += 1
        if recs[j].timestamp - recs[i].timestamp > tau:
            members = recs[i:j + 1]
            out.append(StayPoint(
                x=sum(r.position.lon for r in members) / len(members),
                y=sum(r.position.lat for r in members) / len(members),
                t_a=recs[i].timestamp,
                t_l=recs[j].timestamp,
                member_count=len(members),
                cluster_id=len(out),
            ))
            i = j + 1
        else:
            i += 1
    return out


def elbow_candidates(curve: KnnCurve, n: int = 5) -> list[ElbowCandidate]:
    """Interior points of the sorted curve ranked by discrete curvature.

    Advisory only; epsilon selection stays a human decision made from the
    emitted curve.
    """
    d = curve.distances
    if d.size < 3:
        raise ValueError("curve must have at least 3 points")
    span = float(d[-1] - d[0]) or 1.0
    norm = (d - d[0]) / span
    score = np.abs(norm[2:] - 2 * norm[1:-1] + norm[:-2])
    order = np.argsort(-score, kind="stable")
    top = order[:n] if n < order.size else order
    return [ElbowCandidate(index=int(i) + 1, distance=float(d[i + 1]),
                           score=float(score[i])) for i in top]


def write_knn_curve(curve: KnnCurve, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "distance"])
        for rank, dist in enumerate(curve.distances):
            w.writerow([rank, repr(float(dist))])


def write_staypoints(stay_points: list[StayPoint], path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["cluster_id", "lat", "lon", "t_arrive", "t_leave", "count"])
        for s in stay_points:
            w.writerow([s.cluster_id, repr(s.y), repr(s.x),
                        repr(s.t_a), repr(s.t_l), s.member_count])
