"""Causal-metric spaces: flat spacetime, weighted causal DAGs, sprinkled samples.

Events of a continuum space are coordinate vectors ``(t, x1, ..., xd)``;
events of a DAG space are integer node ids. Every space exposes the same
five primitives: an auxiliary metric ``d``, the causal relation ``causal``
(written x <= y), the chronological relation ``chronological`` (x << y) and
the time separation ``tau``, plus ``geodesic_point`` where geodesics exist.

The defining requirements, checked exhaustively on finite samples by
:func:`validate_prelength`, are

* ``<<`` is contained in ``<=``; ``<=`` is reflexive and transitive and
  ``<<`` is transitive,
* reverse triangle inequality: tau(x,y) + tau(y,z) <= tau(x,z) whenever
  x <= y <= z,
* tau(x,y) = 0 unless x <= y, and tau(x,y) > 0 exactly when x << y.
"""

from __future__ import annotations

import time
from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ._kernels import dag_all_pairs_longest, masked_maxplus_square

TAU_TOL = 1e-9  # absolute tolerance for all time-separation comparisons


class CausalityError(ValueError):
    """A causal precondition failed (cycle, non-causal pair, ...)."""


class GeodesicsUnavailable(NotImplementedError):
    """The space has no intermediate points; route to its ambient space."""


class LorentzSpace(ABC):
    """Abstract causal-metric structure ``(d, <=, <<, tau)``.

    Instances are immutable after construction and all operations are
    pure, so they are safe to share across threads.
    """

    @abstractmethod
    def d(self, x, y) -> float:
        """Auxiliary metric distance between two events."""

    @abstractmethod
    def tau(self, x, y) -> float:
        """Time separation; nonnegative, zero for non-causal pairs."""

    @abstractmethod
    def causal(self, x, y) -> bool:
        """Whether x <= y."""

    @abstractmethod
    def chronological(self, x, y) -> bool:
        """Whether x << y."""

    def geodesic_point(self, x, y, t):
        raise GeodesicsUnavailable(f"{type(self).__name__} has no geodesics")

    # Vectorised pairwise evaluators. Subclasses override when they can
    # do better than the generic double loop.
    def tau_matrix(self, xs, ys) -> np.ndarray:
        return np.array([[self.tau(x, y) for y in ys] for x in xs], dtype=float)

    def causal_matrix(self, xs, ys) -> np.ndarray:
        return np.array([[self.causal(x, y) for y in ys] for x in xs], dtype=bool)

    def chronological_matrix(self, xs, ys) -> np.ndarray:
        return np.array(
            [[self.chronological(x, y) for y in ys] for x in xs], dtype=bool
        )


@dataclass(frozen=True)
class Box:
    """Axis-aligned coordinate box, lo/hi as coordinate tuples."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        if len(self.lo) != len(self.hi):
            raise ValueError("lo/hi dimension mismatch")
        if any(h <= l for l, h in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(np.asarray(self.hi) - np.asarray(self.lo)))

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return np.all((pts >= lo) & (pts <= hi), axis=1)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.asarray(self.lo)
        hi = np.asarray(self.hi)
        return lo + (hi - lo) * rng.random((n, self.dim))


class MinkowskiSpace(LorentzSpace):
    """Flat spacetime R^{1,d}: coordinates (t, x1, ..., xd).

    tau(x, y) = sqrt(dt^2 - |dx|^2) when dt >= |dx| >= 0 and 0 otherwise;
    lightlike pairs (dt = |dx| > 0) are causal but not chronological.
    The auxiliary metric is the Euclidean one on the coordinates, and
    geodesics are straight segments.
    """

    def __init__(self, spatial_dim: int, box: Box | None = None):
        if spatial_dim < 1:
            raise ValueError("spatial_dim must be >= 1")
        self.spatial_dim = int(spatial_dim)
        self.dim = self.spatial_dim + 1
        self.box = box

    def _delta(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != (self.dim,) or y.shape != (self.dim,):
            raise ValueError(f"expected events of dimension {self.dim}")
        dt = y[0] - x[0]
        dx = float(np.linalg.norm(y[1:] - x[1:]))
        return dt, dx

    def d(self, x, y) -> float:
        return float(np.linalg.norm(np.asarray(y, float) - np.asarray(x, float)))

    def tau(self, x, y) -> float:
        dt, dx = self._delta(x, y)
        if dt < dx:
            return 0.0
        return float(np.sqrt(max(dt * dt - dx * dx, 0.0)))

    def causal(self, x, y) -> bool:
        dt, dx = self._delta(x, y)
        return dt >= dx

    def chronological(self, x, y) -> bool:
        dt, dx = self._delta(x, y)
        return dt > dx

    def geodesic_point(self, x, y, t):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return (1.0 - t) * x + t * y

    def tau_matrix(self, xs, ys) -> np.ndarray:
        dt, dx = self._pair_deltas(xs, ys)
        sq = dt * dt - dx * dx
        return np.where(dt >= dx, np.sqrt(np.maximum(sq, 0.0)), 0.0)

    def causal_matrix(self, xs, ys) -> np.ndarray:
        dt, dx = self._pair_deltas(xs, ys)
        return dt >= dx

    def chronological_matrix(self, xs, ys) -> np.ndarray:
        dt, dx = self._pair_deltas(xs, ys)
        return dt > dx

    def _pair_deltas(self, xs, ys):
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        dt = ys[None, :, 0] - xs[:, None, 0]
        dx = np.linalg.norm(ys[None, :, 1:] - xs[:, None, 1:], axis=-1)
        return dt, dx

    def sample_events(self, n: int, rng: np.random.Generator, box: Box | None = None):
        box = box or self.box
        if box is None:
            raise ValueError("no bounding box configured for sampling")
        return box.sample(n, rng)

    def to_dict(self) -> dict:
        out = {"schema": "causalot/space@1", "kind": "minkowski",
               "spatial_dim": self.spatial_dim}
        if self.box is not None:
            out["box"] = {"lo": list(self.box.lo), "hi": list(self.box.hi)}
        return out


class CausalDagSpace(LorentzSpace):
    """Finite causal set given by a weighted acyclic digraph.

    Edge weights are local time separations (>= 0, strictly positive
    meaning a timelike hop); tau(x, y) is the maximum total weight over
    directed paths from x to y, which makes the reverse triangle
    inequality automatic. The auxiliary metric is the symmetrised hop
    distance, with disconnected pairs pinned at n + 1.
    """

    def __init__(self, n_nodes: int, edges, node_weights=None):
        self.n_nodes = int(n_nodes)
        self.edges = [(int(u), int(v), float(w)) for u, v, w in edges]
        for u, v, w in self.edges:
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise ValueError(f"edge ({u},{v}) out of range")
            if w < 0:
                raise ValueError("edge weights must be >= 0")
        if node_weights is None:
            self.node_weights = np.ones(self.n_nodes)
        else:
            self.node_weights = np.asarray(node_weights, dtype=float)
            if self.node_weights.shape != (self.n_nodes,):
                raise ValueError("node_weights shape mismatch")
            if np.any(self.node_weights <= 0):
                raise ValueError("node weights must be > 0")
        self._topo = self._topological_order()
        self._tau = self._compute_tau_matrix()
        self._hops = self._hop_metric()

    def _topological_order(self):
        indeg = np.zeros(self.n_nodes, dtype=int)
        out = [[] for _ in range(self.n_nodes)]
        for u, v, _ in self.edges:
            out[u].append(v)
            indeg[v] += 1
        queue = deque(int(i) for i in np.flatnonzero(indeg == 0))
        order = []
        while queue:
            u = queue.popleft()
            order.append(u)
            for v in out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
        if len(order) != self.n_nodes:
            raise CausalityError("graph has a directed cycle")
        return order

    def _compute_tau_matrix(self):
        pos = np.empty(self.n_nodes, dtype=np.int64)
        pos[self._topo] = np.arange(self.n_nodes)
        if self.edges:
            src = np.array([e[0] for e in self.edges], dtype=np.int64)
            dst = np.array([e[1] for e in self.edges], dtype=np.int64)
            wgt = np.array([e[2] for e in self.edges], dtype=float)
            by_topo = np.argsort(pos[src], kind="stable")
            src, dst, wgt = src[by_topo], dst[by_topo], wgt[by_topo]
        else:
            src = np.empty(0, dtype=np.int64)
            dst = np.empty(0, dtype=np.int64)
            wgt = np.empty(0, dtype=float)
        return dag_all_pairs_longest(src, dst, wgt, self.n_nodes)

    def _hop_metric(self):
        hops = np.full((self.n_nodes, self.n_nodes), self.n_nodes + 1.0)
        np.fill_diagonal(hops, 0.0)
        adj = [[] for _ in range(self.n_nodes)]
        for u, v, _ in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        for s in range(self.n_nodes):
            seen = {s: 0}
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for v in adj[u]:
                    if v not in seen:
                        seen[v] = seen[u] + 1
                        queue.append(v)
            for v, k in seen.items():
                hops[s, v] = float(k)
        return hops

    @property
    def longest_path_matrix(self) -> np.ndarray:
        """(n, n) matrix of longest path weights, -inf when unreachable."""
        return self._tau

    def d(self, x, y) -> float:
        return float(self._hops[int(x), int(y)])

    def tau(self, x, y) -> float:
        v = self._tau[int(x), int(y)]
        return float(v) if np.isfinite(v) else 0.0

    def causal(self, x, y) -> bool:
        return bool(self._tau[int(x), int(y)] > -np.inf)

    def chronological(self, x, y) -> bool:
        return bool(self._tau[int(x), int(y)] > 0.0)

    def tau_matrix(self, xs, ys) -> np.ndarray:
        sub = self._tau[np.ix_(np.asarray(xs, int), np.asarray(ys, int))]
        return np.where(np.isfinite(sub), sub, 0.0)

    def causal_matrix(self, xs, ys) -> np.ndarray:
        return self._tau[np.ix_(np.asarray(xs, int), np.asarray(ys, int))] > -np.inf

    def chronological_matrix(self, xs, ys) -> np.ndarray:
        return self._tau[np.ix_(np.asarray(xs, int), np.asarray(ys, int))] > 0.0

    def to_dict(self) -> dict:
        return {
            "schema": "causalot/space@1",
            "kind": "dag",
            "n_nodes": self.n_nodes,
            "edges": [[u, v, w] for u, v, w in self.edges],
            "node_weights": self.node_weights.tolist(),
        }


class SprinkledSpace(LorentzSpace):
    """Finite point sample of a continuum space with inherited relations.

    tau and the relations are the parent's restricted to the sample, so
    the pre-length axioms carry over verbatim. The sample is not geodesic
    (intermediate points are generally missing); geodesic evaluation
    raises and points callers at the ambient space.
    """

    def __init__(self, parent: MinkowskiSpace, points, intensity: float, seed: int):
        self.parent = parent
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        if self.points.size and self.points.shape[1] != parent.dim:
            raise ValueError("sample dimension does not match parent space")
        self.intensity = float(intensity)
        self.seed = int(seed)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def d(self, x, y) -> float:
        return self.parent.d(x, y)

    def tau(self, x, y) -> float:
        return self.parent.tau(x, y)

    def causal(self, x, y) -> bool:
        return self.parent.causal(x, y)

    def chronological(self, x, y) -> bool:
        return self.parent.chronological(x, y)

    def geodesic_point(self, x, y, t):
        raise GeodesicsUnavailable(
            "sprinkled samples have no intermediate points; "
            "use space.parent for geodesic evaluation"
        )

    def tau_matrix(self, xs, ys) -> np.ndarray:
        return self.parent.tau_matrix(xs, ys)

    def causal_matrix(self, xs, ys) -> np.ndarray:
        return self.parent.causal_matrix(xs, ys)

    def chronological_matrix(self, xs, ys) -> np.ndarray:
        return self.parent.chronological_matrix(xs, ys)

    def to_dict(self) -> dict:
        out = self.parent.to_dict()
        out.update(
            kind="sprinkled",
            points=[list(map(float, p)) for p in self.points],
            intensity=self.intensity,
            seed=self.seed,
        )
        return out


def space_from_dict(data: dict) -> LorentzSpace:
    """Inverse of the spaces' ``to_dict``; round-trips bit-exactly."""
    kind = data.get("kind")
    if kind == "minkowski":
        box = None
        if "box" in data:
            box = Box(tuple(data["box"]["lo"]), tuple(data["box"]["hi"]))
        return MinkowskiSpace(data["spatial_dim"], box=box)
    if kind == "dag":
        return CausalDagSpace(data["n_nodes"], data["edges"],
                              node_weights=data.get("node_weights"))
    if kind == "sprinkled":
        box = None
        if "box" in data:
            box = Box(tuple(data["box"]["lo"]), tuple(data["box"]["hi"]))
        parent = MinkowskiSpace(data["spatial_dim"], box=box)
        return SprinkledSpace(parent, data["points"], data["intensity"], data["seed"])
    raise ValueError(f"unknown space kind {kind!r}")


def sprinkle(parent: MinkowskiSpace, region: Box, intensity: float,
             seed: int) -> SprinkledSpace:
    """Poisson sprinkling: Poisson(intensity * vol) i.i.d. uniform points.

    Deterministic for a fixed seed.
    """
    if intensity <= 0:
        raise ValueError("intensity must be > 0")
    rng = np.random.default_rng(seed)
    n = int(rng.poisson(intensity * region.volume))
    pts = region.sample(n, rng)
    return SprinkledSpace(parent, pts, intensity, seed)


def tau_length(space: LorentzSpace, chain) -> float:
    """Total time separation of an ordered causal chain.

    Sums tau over consecutive pairs. By the reverse triangle inequality
    this is the infimum over coarsenings of the sample, i.e. the finest
    available partition realises the tau-length.
    """
    chain = list(chain)
    if len(chain) < 2:
        return 0.0
    total = 0.0
    for a, b in zip(chain[:-1], chain[1:]):
        if not space.causal(a, b):
            raise CausalityError("chain has a non-causal consecutive pair")
        total += space.tau(a, b)
    return total


@dataclass
class Violation:
    axiom: str
    indices: tuple
    margin: float

    def to_dict(self):
        return {"axiom": self.axiom, "indices": list(self.indices),
                "margin": self.margin}


@dataclass
class ValidationReport:
    """Outcome of the finite-sample axiom scan."""

    n_events: int
    violations: list = field(default_factory=list)
    worst_rti_margin: float = -np.inf  # max of tau(x,y)+tau(y,z)-tau(x,z)
    elapsed_s: float = 0.0
    notes: tuple = (
        "local causal closedness: assumed, not finitely testable",
        "lower semicontinuity of tau: no finite-sample test, omitted",
    )

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "n_events": self.n_events,
            "passed": self.passed,
            "n_violations": len(self.violations),
            "violations": [v.to_dict() for v in self.violations[:50]],
            "worst_rti_margin": float(self.worst_rti_margin),
            "elapsed_s": self.elapsed_s,
            "notes": list(self.notes),
        }


def validate_prelength(space: LorentzSpace, sample, tol: float = TAU_TOL,
                       max_witnesses: int = 20) -> ValidationReport:
    """Exhaustive pair/triple check of the pre-length axioms on a sample.

    Pairwise: tau >= 0, tau = 0 off the causal relation, tau > 0 exactly
    on the chronological relation, << contained in <=, reflexivity of <=
    and tau(x,x) = 0. Triple-wise: transitivity of both relations and the
    reverse triangle inequality, scanned via a masked max-plus square so
    the n^3 work stays in the kernel backend.
    """
    t0 = time.perf_counter()
    sample = list(sample)
    n = len(sample)
    tau = np.ascontiguousarray(space.tau_matrix(sample, sample), dtype=float)
    causal = space.causal_matrix(sample, sample)
    chron = space.chronological_matrix(sample, sample)

    report = ValidationReport(n_events=n)
    add = report.violations.append

    def witnesses(mask, axiom, margins=None):
        idx = np.argwhere(mask)
        for k, ij in enumerate(idx):
            if k >= max_witnesses:
                break
            m = float(margins[tuple(ij)]) if margins is not None else 0.0
            add(Violation(axiom, tuple(int(v) for v in ij), m))
        return len(idx)

    witnesses(tau < -tol, "tau>=0", -tau)
    witnesses(~causal & (np.abs(tau) > tol), "tau=0 off causal", np.abs(tau))
    witnesses(chron & (tau <= tol), "tau>0 on chronological", tol - tau)
    witnesses(~chron & (tau > tol), "tau=0 off chronological", tau)
    witnesses(chron & ~causal, "chronological within causal")
    if not np.all(np.diag(causal)):
        witnesses(np.diag(~np.diag(causal)), "reflexivity of causal")
    witnesses(np.abs(np.diag(np.diag(tau))) > tol, "tau(x,x)=0",
              np.abs(np.diag(np.diag(tau))))

    ci = causal.astype(np.uint8)
    witnesses(((ci @ ci) > 0) & ~causal, "transitivity of causal")
    hi = chron.astype(np.uint8)
    witnesses(((hi @ hi) > 0) & ~chron, "transitivity of chronological")

    two_step = masked_maxplus_square(tau, np.ascontiguousarray(ci))
    defined = two_step > -np.inf
    rti_margin = np.where(defined, two_step - tau, -np.inf)
    report.worst_rti_margin = float(np.max(rti_margin)) if defined.any() else -np.inf
    witnesses(rti_margin > tol, "reverse triangle inequality", rti_margin)

    report.elapsed_s = time.perf_counter() - t0
    return report
