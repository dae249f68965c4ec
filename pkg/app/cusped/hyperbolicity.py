"""Sampled estimates of the hyperbolicity constant of the cusped space."""
import logging
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from app.cusped.ball import CuspedBall
from app.cusped.geodesics import GeodesicPath
from app.cusped.vertices import Vertex, vertex_label

logger = logging.getLogger(__name__)

# Added to the largest observed defect before δ̂ is fixed.
DELTA_MARGIN = 1


@dataclass
class DeltaEstimate:
    """Slim-triangle estimate δ̂ plus the four-point value for comparison."""

    delta_hat: int
    max_defect: int
    four_point: float
    samples: int
    seed: int
    uncertified: int = 0
    worst_triangle: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "delta_hat": self.delta_hat,
            "max_defect": self.max_defect,
            "four_point": self.four_point,
            "samples": self.samples,
            "seed": self.seed,
            "uncertified": self.uncertified,
            "worst_triangle": self.worst_triangle,
            "note": "finite-ball estimate, not a certified global constant",
        }


def _side_defect(ball: CuspedBall, side: GeodesicPath, others: list[GeodesicPath]) -> int:
    """max over x on ``side`` of the distance to the union of ``others``."""
    sources = {v for path in others for v in path.vertices}
    cutoff = len(side) // 2 + 1
    lengths = nx.multi_source_dijkstra_path_length(ball.graph, sources, cutoff=cutoff)
    return max(lengths.get(v, cutoff) for v in side.vertices)


def triangle_defect(ball: CuspedBall, x: Vertex, y: Vertex, z: Vertex) -> tuple[int, bool]:
    """Thinness of the geodesic triangle xyz and whether all sides are certified."""
    sides = [ball.geodesic(x, y), ball.geodesic(y, z), ball.geodesic(z, x)]
    defect = 0
    for i, side in enumerate(sides):
        others = [s for j, s in enumerate(sides) if j != i]
        defect = max(defect, _side_defect(ball, side, others))
    return defect, all(side.certified for side in sides)


def four_point_defect(ball: CuspedBall, a: Vertex, b: Vertex, c: Vertex, d: Vertex) -> float:
    """Gromov four-point condition: half the gap between the two largest pair sums."""
    dist = ball.distance
    sums = sorted(
        [
            dist(a, b).value + dist(c, d).value,
            dist(a, c).value + dist(b, d).value,
            dist(a, d).value + dist(b, c).value,
        ]
    )
    return (sums[-1] - sums[-2]) / 2


def estimate_delta(ball: CuspedBall, sample_size: int, seed: int = 0) -> DeltaEstimate:
    """Maximum sampled triangle thinness, plus the margin, and at least 1.

    Vertices are drawn from the half-radius ball so every side is a certified
    geodesic of X.
    """
    pool = ball.vertices_within(ball.radius // 2)
    rng = np.random.default_rng(seed)
    max_defect = 0
    worst: list[Vertex] = []
    uncertified = 0
    four_point = 0.0
    if len(pool) >= 3:
        picks = rng.integers(0, len(pool), size=(sample_size, 4))
        for row in picks:
            x, y, z, w = (pool[i] for i in row)
            defect, certified = triangle_defect(ball, x, y, z)
            if not certified:
                uncertified += 1
            if defect > max_defect:
                max_defect, worst = defect, [x, y, z]
            four_point = max(four_point, four_point_defect(ball, x, y, z, w))

    delta_hat = max(1, max_defect + DELTA_MARGIN)
    logger.info(
        f"delta estimate on R={ball.radius}: defect={max_defect}, delta_hat={delta_hat}, "
        f"four-point={four_point}, samples={sample_size}"
    )
    if uncertified:
        logger.warning(f"{uncertified} sampled triangles had uncertified sides")
    return DeltaEstimate(
        delta_hat,
        max_defect,
        four_point,
        sample_size,
        seed,
        uncertified,
        [vertex_label(v) for v in worst],
    )

