"""UAV route planning over base-station coverage disks.

Two problems, solved in sequence:

1. Max-min SINR: the highest mean-SINR floor gamma such that the coverage
   disks (one per BS, radius = largest distance meeting the floor) still
   connect the start point S to the destination D through overlaps.  Solved
   by bisection on the floor (dB scale) over a disk-graph feasibility test,
   with Dijkstra picking the shortest BS chain at the optimum.

2. Minimal-time trajectory: the shortest polyline from S to D that never
   leaves the union of the chain's disks, travelled at constant speed.  The
   geodesic inside a union of disks bends only where two circles cross, so
   a shortest path over {S, D, circle-intersection points} with
   coverage-checked edges is exact — no boundary discretization needed.

Positions are in meters; realizations sampled in km are converted on entry.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .channel import BsKind
from .config import NetworkConfig
from .coverage import DEFAULT_POLICY, QuadPolicy, max_distance_for_sinr, sinr_curve
from .errors import NoRouteError
from .geometry import NetworkRealization

_M_PER_KM = 1000.0
_SLACK_M = 1e-6  # coverage slack for point-on-segment tests, meters


def default_endpoints(cfg: NetworkConfig) -> tuple[np.ndarray, np.ndarray]:
    """Mission endpoints: L_km apart, centered on the origin, in meters."""
    half = 0.5 * cfg.L_km * _M_PER_KM
    return np.array([-half, 0.0]), np.array([half, 0.0])


# -- BS nodes and the disk-overlap graph ----------------------------------------


@dataclass(frozen=True)
class BsNode:
    """One BS (or a zero-radius S/D anchor, kind None) in the route graph."""

    index: int
    kind: BsKind | None
    x: float
    y: float
    radius: float  # coverage radius at the graph's SINR floor, meters

    @property
    def location(self) -> np.ndarray:
        return np.array([self.x, self.y])

    def radius_at(self, gamma: float, params: NetworkConfig,
                  policy: QuadPolicy = DEFAULT_POLICY) -> float:
        """Coverage radius at another floor (linear), from the live curve."""
        if self.kind is None:
            return 0.0
        return max_distance_for_sinr(gamma, self.kind, params, policy)


def kind_radii(params: NetworkConfig, gamma_db: float,
               policy: QuadPolicy = DEFAULT_POLICY) -> dict[BsKind, float]:
    """Coverage radius per BS kind at the given floor (all BSs of one kind
    share a radius; the mean SINR depends only on kind and distance)."""
    out = {BsKind.Tbs: sinr_curve(params, BsKind.Tbs, policy).radius(gamma_db)}
    if params.lam_l > 0.0 and params.lam_p > 0.0:
        out[BsKind.Dedicated] = sinr_curve(
            params, BsKind.Dedicated, policy).radius(gamma_db)
    else:
        out[BsKind.Dedicated] = 0.0
    return out


class BsGraph:
    """Disk-overlap graph over BS nodes plus S/D anchors.

    Edge (i, j) exists iff |g_i - g_j| <= r_i + r_j; the anchors carry zero
    radius, so S connects to BS i exactly when S lies inside disk i.  Edge
    weight is the Euclidean center distance.
    """

    def __init__(self, pos_m: np.ndarray, kinds, radii: np.ndarray,
                 S, D):
        pos_m = np.asarray(pos_m, dtype=float).reshape(-1, 2)
        radii = np.asarray(radii, dtype=float)
        if radii.shape != (pos_m.shape[0],):
            raise ValueError("one radius per BS position required")
        if np.any(radii < 0.0):
            raise ValueError("radii must be non-negative")
        S = np.asarray(S, dtype=float)
        D = np.asarray(D, dtype=float)
        n = pos_m.shape[0]
        self.pos = np.vstack([pos_m, S[None, :], D[None, :]])
        self.radius = np.concatenate([radii, [0.0, 0.0]])
        self.s_index = n
        self.d_index = n + 1
        kinds = list(kinds)
        if len(kinds) != n:
            raise ValueError("one kind per BS position required")
        self.nodes = tuple(
            BsNode(i, k, float(self.pos[i, 0]), float(self.pos[i, 1]),
                   float(self.radius[i]))
            for i, k in enumerate(kinds + [None, None])
        )
        diff = self.pos[:, None, :] - self.pos[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        reach = self.radius[:, None] + self.radius[None, :]
        mask = dist <= reach
        np.fill_diagonal(mask, False)
        self._dist = dist
        self._adj = csr_matrix((dist[mask], np.nonzero(mask)),
                               shape=dist.shape)

    @property
    def n_bs(self) -> int:
        return len(self.nodes) - 2

    def connected(self) -> bool:
        """True when some chain of overlapping disks joins S to D."""
        _, labels = connected_components(self._adj, directed=False)
        return bool(labels[self.s_index] == labels[self.d_index])

    def neighbors(self, i: int) -> np.ndarray:
        return self._adj.indices[self._adj.indptr[i]:self._adj.indptr[i + 1]]


def build_bs_graph(realization: NetworkRealization, gamma: float,
                   S, D, params: NetworkConfig,
                   policy: QuadPolicy = DEFAULT_POLICY) -> BsGraph:
    """Disk graph of the realization's BSs at floor gamma (linear SINR)."""
    if gamma <= 0.0:
        raise ValueError("gamma must be positive")
    gamma_db = 10.0 * math.log10(gamma)
    radii = kind_radii(params, gamma_db, policy)
    pos, kinds = _bs_arrays(realization)
    r = np.array([radii[k] for k in kinds]) if kinds else np.zeros(0)
    return BsGraph(pos, kinds, r, S, D)


def _bs_arrays(realization: NetworkRealization) -> tuple[np.ndarray, list[BsKind]]:
    """BS positions in meters (terrestrial first, then dedicated) + kinds."""
    tb = np.asarray(realization.tbs, dtype=float).reshape(-1, 2) * _M_PER_KM
    db = np.asarray(realization.dedicated, dtype=float).reshape(-1, 2) * _M_PER_KM
    pos = np.vstack([tb, db])
    kinds = [BsKind.Tbs] * tb.shape[0] + [BsKind.Dedicated] * db.shape[0]
    return pos, kinds


def _dijkstra(adj: csr_matrix, src: int, dst: int) -> list[int] | None:
    """Shortest path by total weight; ties broken by fewer hops, then by
    lowest predecessor index, for run-to-run determinism."""
    n = adj.shape[0]
    settled = np.zeros(n, dtype=bool)
    pred = np.full(n, -1)
    heap = [(0.0, 0, -1, src)]
    while heap:
        d, hops, p, u = heapq.heappop(heap)
        if settled[u]:
            continue
        settled[u] = True
        pred[u] = p
        if u == dst:
            path = [dst]
            while path[-1] != src:
                path.append(int(pred[path[-1]]))
            return path[::-1]
        row = slice(adj.indptr[u], adj.indptr[u + 1])
        for v, w in zip(adj.indices[row], adj.data[row]):
            if not settled[v]:
                heapq.heappush(heap, (d + w, hops + 1, u, int(v)))
    return None


def shortest_bs_sequence(graph: BsGraph) -> tuple[BsNode, ...] | None:
    """Shortest S->D chain of BS nodes, or None when disconnected."""
    path = _dijkstra(graph._adj, graph.s_index, graph.d_index)
    if path is None:
        return None
    return tuple(graph.nodes[i] for i in path[1:-1])


# -- Max-min SINR floor (bisection over disk-graph feasibility) -----------------


@dataclass(frozen=True)
class MaxMinResult:
    """Outcome of the max-min SINR search."""

    gamma_star_db: float
    sequence: tuple[BsNode, ...]
    trace: tuple[tuple[float, bool], ...]  # (probed floor dB, feasible)
    radii: dict = field(repr=False)  # BsKind -> disk radius at gamma*, meters

    @property
    def gamma_star(self) -> float:
        return 10.0 ** (self.gamma_star_db / 10.0)


class _RouteInstance:
    """One realization prepared for repeated feasibility probes: center
    distances are computed once; each probe only re-thresholds them."""

    def __init__(self, realization: NetworkRealization, S, D,
                 params: NetworkConfig, policy: QuadPolicy):
        self.params = params
        self.policy = policy
        self.S = np.asarray(S, dtype=float)
        self.D = np.asarray(D, dtype=float)
        pos, kinds = _bs_arrays(realization)
        self.pos = pos
        self.kinds = kinds
        self.is_db = np.array([k is BsKind.Dedicated for k in kinds])
        anchored = np.vstack([pos, self.S[None, :], self.D[None, :]])
        diff = anchored[:, None, :] - anchored[None, :, :]
        self.dist = np.hypot(diff[..., 0], diff[..., 1])
        self.n = pos.shape[0]

    def radii(self, gamma_db: float) -> np.ndarray:
        per_kind = kind_radii(self.params, gamma_db, self.policy)
        r = np.where(self.is_db, per_kind[BsKind.Dedicated],
                     per_kind[BsKind.Tbs])
        return np.concatenate([r, [0.0, 0.0]])

    def feasible(self, gamma_db: float) -> bool:
        if self.n == 0:
            return False
        r = self.radii(gamma_db)
        mask = self.dist <= r[:, None] + r[None, :]
        np.fill_diagonal(mask, False)
        adj = csr_matrix(mask)
        _, labels = connected_components(adj, directed=False)
        return bool(labels[self.n] == labels[self.n + 1])

    def graph(self, gamma_db: float) -> BsGraph:
        r = self.radii(gamma_db)
        return BsGraph(self.pos, self.kinds, r[:-2], self.S, self.D)

    def gamma_upper_db(self) -> float:
        """Best achievable floor at the worse endpoint: no floor above it
        can cover both S and D."""
        best = math.inf
        for endpoint in (self.S, self.D):
            d = np.hypot(self.pos[:, 0] - endpoint[0],
                         self.pos[:, 1] - endpoint[1])
            top = -math.inf
            for kind, sel in ((BsKind.Tbs, ~self.is_db),
                              (BsKind.Dedicated, self.is_db)):
                if np.any(sel):
                    curve = sinr_curve(self.params, kind, self.policy)
                    top = max(top, float(np.max(_values_db(curve, d[sel]))))
            best = min(best, top)
        return best


def _values_db(curve, d: np.ndarray) -> np.ndarray:
    """Vectorized mean-SINR curve lookup (dB) across its pieces."""
    d = np.asarray(d, dtype=float)
    out = np.empty(d.shape)
    remaining = np.ones(d.shape, dtype=bool)
    for grid, x, db in curve.pieces:
        sel = remaining & (d <= grid[-1])
        out[sel] = np.interp(np.log1p(np.maximum(d[sel], 0.0)), x, db)
        remaining &= ~sel
    out[remaining] = curve.pieces[-1][2][-1]
    return out


def max_min_sinr(realization: NetworkRealization, S, D,
                 params: NetworkConfig, eps_db: float | None = None,
                 policy: QuadPolicy = DEFAULT_POLICY) -> MaxMinResult:
    """Highest SINR floor that still admits an S->D chain of coverage disks.

    Bisects the floor on the dB scale between the configured search floor
    and the endpoint upper bound (the best mean SINR attainable at the
    worse of S and D — above it one endpoint is uncovered outright).
    Feasibility is monotone (radii shrink as the floor rises), so the trace
    of probes brackets gamma* ever tighter; the search stops when the
    bracket is narrower than eps_db and returns the last feasible floor
    with its shortest BS chain.

    Raises NoRouteError when even the search floor is infeasible.
    """
    if eps_db is None:
        eps_db = params.eps_db
    if eps_db <= 0.0:
        raise ValueError("eps_db must be positive")
    inst = _RouteInstance(realization, S, D, params, policy)
    if inst.n == 0:
        raise NoRouteError("realization contains no base stations")
    lo = params.gamma_floor_db
    trace: list[tuple[float, bool]] = []
    if not inst.feasible(lo):
        raise NoRouteError(
            f"no coverage route from S to D at the {lo:g} dB search floor")
    trace.append((lo, True))
    hi = inst.gamma_upper_db()
    if hi <= lo:
        hi = lo  # degenerate: floor == upper bound; fall through to cap
    if inst.feasible(hi):
        # the bound itself is attainable (e.g. one BS covering both
        # endpoints exactly); no bisection needed
        lo = hi
        trace.append((hi, True))
    else:
        trace.append((hi, False))
        while hi - lo > eps_db:
            mid = 0.5 * (lo + hi)
            ok = inst.feasible(mid)
            trace.append((mid, ok))
            if ok:
                lo = mid
            else:
                hi = mid
    graph = inst.graph(lo)
    sequence = shortest_bs_sequence(graph)
    if sequence is None:  # pragma: no cover - feasible(lo) guarantees a path
        raise NoRouteError("feasible floor lost its route; inconsistent graph")
    per_kind = kind_radii(params, lo, policy)
    return MaxMinResult(gamma_star_db=lo, sequence=sequence,
                        trace=tuple(trace), radii=per_kind)


# -- circle geometry -------------------------------------------------------------


def circle_intersections(c1, r1: float, c2, r2: float) -> np.ndarray:
    """Intersection points of two circles: (2, 2), (1, 2) on tangency, or
    (0, 2) when disjoint, nested, or concentric."""
    c1 = np.asarray(c1, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    empty = np.zeros((0, 2))
    d = float(np.hypot(*(c2 - c1)))
    scale = max(r1, r2, d, 1.0)
    tol = 1e-12 * scale
    if d <= tol:
        return empty  # concentric (or identical) circles
    if d > r1 + r2 + tol or d < abs(r1 - r2) - tol:
        return empty
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h_sq = r1 * r1 - a * a
    axis = (c2 - c1) / d
    mid = c1 + a * axis
    h = math.sqrt(max(h_sq, 0.0))
    if h <= tol:
        return mid[None, :]
    perp = np.array([-axis[1], axis[0]])
    return np.vstack([mid + h * perp, mid - h * perp])


class CircleChain:
    """An ordered chain of coverage disks whose consecutive members overlap,
    with the crossing points of each consecutive pair."""

    def __init__(self, centers: np.ndarray, radii: np.ndarray,
                 validate: bool = True):
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        self.radii = np.asarray(radii, dtype=float)
        if self.radii.shape != (self.centers.shape[0],):
            raise ValueError("one radius per center required")
        if self.centers.shape[0] == 0:
            raise ValueError("chain must contain at least one disk")
        if np.any(self.radii <= 0.0):
            raise ValueError("chain disks must have positive radii")
        self.consecutive_intersections: tuple[np.ndarray, ...] = tuple(
            circle_intersections(self.centers[i], self.radii[i],
                                 self.centers[i + 1], self.radii[i + 1])
            for i in range(len(self) - 1)
        )
        if validate:
            for i in range(len(self) - 1):
                gap = float(np.hypot(*(self.centers[i + 1] - self.centers[i])))
                if gap > self.radii[i] + self.radii[i + 1] + _SLACK_M:
                    raise ValueError(
                        f"consecutive disks {i} and {i + 1} do not overlap")

    def __len__(self) -> int:
        return self.centers.shape[0]

    def all_intersections(self) -> np.ndarray:
        """Crossing points of every overlapping disk pair in the chain (the
        only places a shortest in-union path can bend)."""
        pts = [np.zeros((0, 2))]
        k = len(self)
        for i in range(k):
            for j in range(i + 1, k):
                pts.append(circle_intersections(
                    self.centers[i], self.radii[i],
                    self.centers[j], self.radii[j]))
        return np.vstack(pts)

    def contains(self, points: np.ndarray, slack: float = _SLACK_M) -> np.ndarray:
        """Boolean per point: inside the union of the chain's disks."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        d = np.hypot(points[:, None, 0] - self.centers[None, :, 0],
                     points[:, None, 1] - self.centers[None, :, 1])
        return np.any(d <= self.radii[None, :] + slack, axis=1)


def _covered_batch(p: np.ndarray, q: np.ndarray, centers: np.ndarray,
                   radii: np.ndarray) -> np.ndarray:
    """Vectorized segment-cover test: for each row of p/q, is the segment
    p[i] -> q[i] inside the union of the disks?

    Each disk cuts one sub-interval out of the segment parameter t in
    [0, 1]; the segment is covered iff the sorted intervals chain from 0
    to 1 without a gap (1e-6 m slack absorbs roundoff).
    """
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    seg = q - p
    length = np.hypot(seg[:, 0], seg[:, 1])
    out = np.zeros(p.shape[0], dtype=bool)
    r_eff = radii + _SLACK_M

    degenerate = length == 0.0
    if np.any(degenerate):
        pts = p[degenerate]
        d = np.hypot(pts[:, None, 0] - centers[None, :, 0],
                     pts[:, None, 1] - centers[None, :, 1])
        out[degenerate] = np.any(d <= r_eff[None, :], axis=1)
    live = ~degenerate
    if not np.any(live):
        return out
    pl, ql, segl, ll = p[live], q[live], seg[live], length[live]
    rel = centers[None, :, :] - pl[:, None, :]          # (P, K, 2)
    t_c = np.einsum("pkc,pc->pk", rel, segl) / (ll * ll)[:, None]
    d_perp_sq = np.sum(rel * rel, axis=2) - (t_c * ll[:, None]) ** 2
    half_sq = r_eff[None, :] ** 2 - d_perp_sq
    hit = half_sq > 0.0
    half = np.sqrt(np.maximum(half_sq, 0.0)) / ll[:, None]
    lo = np.where(hit, np.clip(t_c - half, 0.0, 1.0), 1.0)
    hi = np.where(hit, np.clip(t_c + half, 0.0, 1.0), 0.0)
    order = np.argsort(lo, axis=1)
    lo = np.take_along_axis(lo, order, axis=1)
    hi = np.take_along_axis(hi, order, axis=1)
    cum = np.maximum.accumulate(hi, axis=1)
    eps = _SLACK_M / np.maximum(ll, _SLACK_M)
    gap = np.any(lo[:, 1:] > cum[:, :-1] + eps[:, None], axis=1) \
        if lo.shape[1] > 1 else np.zeros(lo.shape[0], dtype=bool)
    out[live] = (lo[:, 0] <= eps) & (cum[:, -1] >= 1.0 - eps) & ~gap
    return out


def segment_covered(p, q, chain: CircleChain,
                    span: tuple[int, int] | None = None) -> bool:
    """True when every point of the segment p->q lies in the union of the
    chain's disks (restricted to the span (i, j), inclusive, when given)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    centers, radii = chain.centers, chain.radii
    if span is not None:
        i, j = span
        centers, radii = centers[i:j + 1], radii[i:j + 1]
    return bool(_covered_batch(p[None, :], q[None, :], centers, radii)[0])


# -- minimal-time trajectory ------------------------------------------------------


@dataclass(frozen=True)
class TrajectorySolution:
    """A covered S->D polyline and its travel time at constant speed."""

    gamma_star: float  # linear SINR floor the disks were sized at
    bs_sequence: tuple[BsNode, ...]
    waypoints: np.ndarray  # (k, 2) meters, starts at S, ends at D
    t_min: float  # seconds
    total_length: float  # meters


def _chain_for(sequence: tuple[BsNode, ...], gamma_star: float,
               params: NetworkConfig, policy: QuadPolicy) -> CircleChain:
    if not sequence:
        raise ValueError("BS sequence must not be empty")
    gamma_db = 10.0 * math.log10(gamma_star)
    per_kind = kind_radii(params, gamma_db, policy)
    centers = np.array([[n.x, n.y] for n in sequence])
    radii = np.array([per_kind[n.kind] for n in sequence])
    return CircleChain(centers, radii)


def _polyline_from_graph(points: np.ndarray, adj: csr_matrix,
                         exact_ties: bool) -> tuple[np.ndarray, float] | None:
    """Shortest S->D polyline over a waypoint graph; points[0]=S, [1]=D.
    exact_ties switches to the hop/index tie-broken search (small graphs);
    the plain C-level search is used for the big quantized baseline."""
    if exact_ties:
        path = _dijkstra(adj, 0, 1)
    else:
        _, pred = _csgraph_dijkstra(adj, directed=False, indices=0,
                                    return_predecessors=True)
        if pred[1] < 0:
            return None
        path = [1]
        while path[-1] != 0:
            path.append(int(pred[path[-1]]))
        path = path[::-1]
    if path is None:
        return None
    waypoints = points[path]
    steps = np.diff(waypoints, axis=0)
    return waypoints, float(np.sum(np.hypot(steps[:, 0], steps[:, 1])))


def _pair_graph(points: np.ndarray, ok: np.ndarray) -> csr_matrix:
    """Symmetric waypoint graph from a boolean upper-triangular edge mask
    (ok[i, j] for i < j), weighted by Euclidean distance."""
    ii, jj = np.nonzero(np.triu(ok, k=1))
    w = np.hypot(points[ii, 0] - points[jj, 0], points[ii, 1] - points[jj, 1])
    n = points.shape[0]
    return csr_matrix((np.concatenate([w, w]),
                       (np.concatenate([ii, jj]), np.concatenate([jj, ii]))),
                      shape=(n, n))


def min_time_trajectory(gamma_star: float, sequence: tuple[BsNode, ...],
                        S, D, v: float, params: NetworkConfig,
                        policy: QuadPolicy = DEFAULT_POLICY) -> TrajectorySolution:
    """Minimal-time S->D trajectory inside the union of the chain's disks.

    Candidate waypoints are S, D, and the circle-crossing points of every
    overlapping disk pair (a shortest path inside a disk union is straight
    except where two boundary circles meet); edges require the connecting
    segment to stay covered.  Dijkstra then returns the shortest covered
    polyline, and t_min = length / v.
    """
    if v <= 0.0:
        raise ValueError("speed must be positive")
    S = np.asarray(S, dtype=float)
    D = np.asarray(D, dtype=float)
    chain = _chain_for(sequence, gamma_star, params, policy)
    if not bool(chain.contains(S[None, :])[0]):
        raise ValueError("S lies outside the first disk of the chain")
    if not bool(chain.contains(D[None, :])[0]):
        raise ValueError("D lies outside the last disk of the chain")
    if segment_covered(S, D, chain):
        waypoints = np.vstack([S, D])
        length = float(np.hypot(*(D - S)))
        return TrajectorySolution(gamma_star, tuple(sequence), waypoints,
                                  length / v, length)
    points = np.vstack([S[None, :], D[None, :], chain.all_intersections()])
    n = points.shape[0]
    ii, jj = np.triu_indices(n, k=1)
    ok_flat = np.zeros(ii.size, dtype=bool)
    for start in range(0, ii.size, 200_000):  # bound the (pairs x disks) block
        sl = slice(start, start + 200_000)
        ok_flat[sl] = _covered_batch(points[ii[sl]], points[jj[sl]],
                                     chain.centers, chain.radii)
    ok = np.zeros((n, n), dtype=bool)
    ok[ii, jj] = ok_flat
    found = _polyline_from_graph(points, _pair_graph(points, ok),
                                 exact_ties=True)
    if found is None:  # pragma: no cover - overlap validation precludes this
        raise ValueError("disk chain admits no covered S->D polyline")
    waypoints, length = found
    return TrajectorySolution(gamma_star, tuple(sequence), waypoints,
                              length / v, length)


def boundary_baseline(gamma_star: float, sequence: tuple[BsNode, ...],
                      S, D, v: float, params: NetworkConfig,
                      points_per_circle: int = 64,
                      policy: QuadPolicy = DEFAULT_POLICY) -> TrajectorySolution:
    """Reference solver that quantizes each disk boundary into
    points_per_circle candidate waypoints (plus the exact consecutive
    crossing points, so near-tangent overlaps stay passable) and hops
    between waypoints sharing a disk.  Upper-bounds the exact solver."""
    if v <= 0.0:
        raise ValueError("speed must be positive")
    if points_per_circle < 3:
        raise ValueError("need at least 3 boundary points per circle")
    S = np.asarray(S, dtype=float)
    D = np.asarray(D, dtype=float)
    chain = _chain_for(sequence, gamma_star, params, policy)
    ang = np.linspace(0.0, 2.0 * math.pi, points_per_circle, endpoint=False)
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    boundary = np.vstack([c + r * ring for c, r in zip(chain.centers, chain.radii)])
    points = np.vstack([S[None, :], D[None, :], boundary,
                        *chain.consecutive_intersections])
    d_to_disk = np.hypot(points[:, None, 0] - chain.centers[None, :, 0],
                         points[:, None, 1] - chain.centers[None, :, 1])
    in_disk = (d_to_disk <= chain.radii[None, :] + _SLACK_M).astype(np.uint8)
    shares_disk = (in_disk @ in_disk.T) > 0  # legs stay within one disk
    found = _polyline_from_graph(points, _pair_graph(points, shares_disk),
                                 exact_ties=False)
    if found is None:
        raise ValueError("boundary quantization found no covered polyline")
    waypoints, length = found
    return TrajectorySolution(gamma_star, tuple(sequence), waypoints,
                              length / v, length)
