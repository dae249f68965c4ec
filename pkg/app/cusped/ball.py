"""Finite balls of the cusped space around the identity."""
import json
import logging
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, NamedTuple, Optional

import networkx as nx

from app.cusped.exceptions import (
    BallBudgetError,
    BallFileError,
    CuspedSpaceError,
    VertexNotInBallError,
)
from app.cusped.geodesics import GeodesicPath
from app.cusped.vertices import (
    IDENTITY_VERTEX,
    CayleyVertex,
    Vertex,
    horoball_cost,
    neighbors,
    parse_vertex_label,
    vertex_label,
)
from app.group.words import C_EXPANSION, reduce

logger = logging.getLogger(__name__)

DEFAULT_MAX_VERTICES = 2_000_000


class DistanceResult(NamedTuple):
    value: int
    certified: bool


class NormResult(NamedTuple):
    """|g|_X, exact when g lies in the ball, otherwise an upper bound."""
    value: int
    exact: bool


@dataclass
class CuspedBall:
    """Induced subgraph of X on the vertices within ``radius`` of the identity.

    A distance d(u, v) computed inside the ball equals the distance in X
    whenever |u| + |v| + d ≤ 2R: every vertex of a shortest path in X then
    lies within R of the identity.
    """

    radius: int
    depth_cap: int
    graph: nx.Graph
    base_distance: dict[Vertex, int]
    order: list[Vertex]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._bfs = lru_cache(maxsize=1024)(self._bfs_uncached)

    def __contains__(self, vertex: object) -> bool:
        return vertex in self.base_distance

    def __len__(self) -> int:
        return len(self.order)

    @property
    def vertex_count(self) -> int:
        return len(self.order)

    @property
    def edge_count(self) -> int:
        return self.graph.number_of_edges()

    def _require(self, vertex: Vertex) -> None:
        if vertex not in self.base_distance:
            raise VertexNotInBallError(f"{vertex_label(vertex)} is not in the radius-{self.radius} ball")

    def _bfs_uncached(self, source: Vertex) -> tuple[dict[Vertex, int], dict[Vertex, Vertex]]:
        dist = {source: 0}
        parent: dict[Vertex, Vertex] = {}
        queue = deque([source])
        adjacency = self.graph.adj
        while queue:
            u = queue.popleft()
            for w in adjacency[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue.append(w)
        return dist, parent

    def distances_from(self, source: Vertex) -> dict[Vertex, int]:
        self._require(source)
        return self._bfs(source)[0]

    def norm_of(self, vertex: Vertex) -> int:
        self._require(vertex)
        return self.base_distance[vertex]

    def is_certified(self, u: Vertex, v: Vertex, d: int) -> bool:
        return self.base_distance[u] + self.base_distance[v] + d <= 2 * self.radius

    def distance(self, u: Vertex, v: Vertex) -> DistanceResult:
        self._require(u)
        self._require(v)
        if u == IDENTITY_VERTEX:
            return DistanceResult(self.base_distance[v], True)
        d = self._bfs(u)[0][v]
        return DistanceResult(d, self.is_certified(u, v, d))

    def geodesic(self, u: Vertex, v: Vertex) -> GeodesicPath:
        """Deterministic shortest path; BFS parents follow insertion order."""
        self._require(u)
        self._require(v)
        dist, parent = self._bfs(u)
        path = [v]
        while path[-1] != u:
            path.append(parent[path[-1]])
        path.reverse()
        return GeodesicPath(tuple(path), self.is_certified(u, v, dist[v]))

    def distance_to_set(self, source: Vertex, targets: Iterable[Vertex], cutoff: int) -> Optional[int]:
        """Smallest in-ball distance from ``source`` to ``targets`` up to ``cutoff``."""
        targets = set(targets)
        if source in targets:
            return 0
        lengths = nx.single_source_shortest_path_length(self.graph, source, cutoff=cutoff)
        found = [d for vertex, d in lengths.items() if vertex in targets]
        return min(found) if found else None

    def norm(self, word: str) -> NormResult:
        """|g|_X: exact inside the ball, else a regular-path upper bound."""
        vertex = CayleyVertex(reduce(word))
        if vertex in self.base_distance:
            return NormResult(self.base_distance[vertex], True)
        return NormResult(norm_upper_bound(vertex.word), False)

    def is_complete(self) -> bool:
        """Every vertex closer than R has all of its neighbors in the ball."""
        for vertex, d in self.base_distance.items():
            if d < self.radius and any(w not in self.base_distance for w in neighbors(vertex, self.depth_cap)):
                return False
        return True

    def vertices_within(self, radius: int) -> list[Vertex]:
        return [v for v in self.order if self.base_distance[v] <= radius]

    def to_dict(self) -> dict:
        index = {v: i for i, v in enumerate(self.order)}
        return {
            "metadata": {
                "radius": self.radius,
                "depth_cap": self.depth_cap,
                "vertex_count": self.vertex_count,
                "edge_count": self.edge_count,
                **self.metadata,
            },
            "vertices": [vertex_label(v) for v in self.order],
            "edges": [[index[u], index[v]] for u, v in self.graph.edges()],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CuspedBall":
        try:
            meta = data["metadata"]
            order = [parse_vertex_label(label) for label in data["vertices"]]
            graph = nx.Graph()
            graph.add_nodes_from(order)
            graph.add_edges_from((order[i], order[j]) for i, j in data["edges"])
        except (KeyError, IndexError, ValueError, CuspedSpaceError) as e:
            raise BallFileError(f"Malformed ball data: {e}") from e
        if len(order) != meta.get("vertex_count", len(order)):
            raise BallFileError("Vertex count does not match metadata")
        base = nx.single_source_shortest_path_length(graph, IDENTITY_VERTEX)
        extra = {k: v for k, v in meta.items() if k not in ("radius", "depth_cap", "vertex_count", "edge_count")}
        return cls(meta["radius"], meta["depth_cap"], graph, dict(base), order, extra)


def _run_cost(run: int) -> int:
    cost, _ = horoball_cost(run)
    return min(cost, run)


def norm_upper_bound(word: str) -> int:
    """Upper bound on |g|_X: letters cost 1, each maximal c-run costs its horoball length."""
    reduced = reduce(word)
    letters: list[str] = []
    i = 0
    while i < len(reduced):
        chunk = reduced[i : i + 4]
        if chunk == C_EXPANSION["c"]:
            letters.append("c")
            i += 4
        elif chunk == C_EXPANSION["C"]:
            letters.append("C")
            i += 4
        else:
            letters.append(reduced[i])
            i += 1
    total = 0
    i = 0
    while i < len(letters):
        if letters[i] in "cC":
            j = i
            while j < len(letters) and letters[j] == letters[i]:
                j += 1
            total += _run_cost(j - i)
            i = j
        else:
            total += 1
            i += 1
    return total


def build_ball(
    radius: int,
    depth_cap: Optional[int] = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> CuspedBall:
    """Breadth-first construction of the radius-R ball around the identity."""
    depth_cap = radius if depth_cap is None else depth_cap
    if radius < 0:
        raise CuspedSpaceError(f"Radius must be non-negative, got {radius}")
    if depth_cap < radius:
        raise CuspedSpaceError(f"Depth cap {depth_cap} is below the radius {radius}")

    graph = nx.Graph()
    graph.add_node(IDENTITY_VERTEX)
    base = {IDENTITY_VERTEX: 0}
    order = [IDENTITY_VERTEX]
    frontier = [IDENTITY_VERTEX]
    for level in range(radius):
        next_frontier = []
        for vertex in frontier:
            for w in neighbors(vertex, depth_cap):
                if w not in base:
                    base[w] = level + 1
                    order.append(w)
                    next_frontier.append(w)
                    if len(order) > max_vertices:
                        raise BallBudgetError(
                            f"Radius-{radius} ball exceeds {max_vertices} vertices at level {level + 1}"
                        )
                graph.add_edge(vertex, w)
        frontier = next_frontier
    for vertex in frontier:
        for w in neighbors(vertex, depth_cap):
            if w in base:
                graph.add_edge(vertex, w)

    logger.info(f"Built cusped ball R={radius}: {len(order)} vertices, {graph.number_of_edges()} edges")
    return CuspedBall(radius, depth_cap, graph, base, order)


def ball_to_file(ball: CuspedBall, path: Path) -> None:
    Path(path).write_text(json.dumps(ball.to_dict()))


def ball_from_file(path: Path) -> CuspedBall:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise BallFileError(f"Cannot read ball file {path}: {e}") from e
    return CuspedBall.from_dict(data)
