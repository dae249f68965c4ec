"""Sampled verification of the cusped-space geometry lemmas on a finite ball.

Each check returns a ``LemmaCheck`` recording how many instances were
examined. Instances need room inside the ball (long transits, deep
horoballs), so small radii can leave a check with nothing to examine; such
checks are reported as vacuous rather than passed silently.
"""
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from app.cusped.ball import CuspedBall
from app.cusped.exceptions import RegularizationError
from app.cusped.geodesics import (
    REGULAR_HAUSDORFF_BOUND,
    GeodesicPath,
    hausdorff_upper,
    horoball_transits,
    regularize,
)
from app.cusped.vertices import (
    IDENTITY_VERTEX,
    CayleyVertex,
    Vertex,
    coset_word,
    horoball_of,
    vertex_label,
)
from app.group.words import enumerate_words, peripheral_coset_decompose

logger = logging.getLogger(__name__)

MAX_WITNESSES = 10
METRIC_SOURCES = 256


@dataclass
class LemmaCheck:
    name: str
    reference: str
    checked: int = 0
    violations: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def vacuous(self) -> bool:
        return self.checked == 0

    @property
    def passed(self) -> bool:
        return not self.violations

    def record(self, witness: dict) -> None:
        if len(self.violations) < MAX_WITNESSES:
            self.violations.append(witness)
        self.details["violation_count"] = self.details.get("violation_count", 0) + 1

    def finish(self) -> "LemmaCheck":
        if self.vacuous:
            logger.warning(f"{self.name}: no instance inside the ball, check is vacuous")
        elif self.violations:
            logger.warning(f"{self.name}: {len(self.violations)} violations out of {self.checked}")
        else:
            logger.info(f"{self.name}: {self.checked} instances passed")
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "reference": self.reference,
            "checked": self.checked,
            "vacuous": self.vacuous,
            "passed": self.passed,
            "violations": self.violations,
            "details": self.details,
        }


def _sample(items: list, count: int, rng: np.random.Generator) -> list:
    if len(items) <= count:
        return list(items)
    picks = rng.choice(len(items), size=count, replace=False)
    return [items[i] for i in sorted(picks)]


def _geodesic_vertex_set(ball: CuspedBall, u: Vertex, v: Vertex) -> set[Vertex]:
    """Vertices lying on some geodesic from u to v."""
    from_u = ball.distances_from(u)
    from_v = ball.distances_from(v)
    d = from_u[v]
    return {x for x, du in from_u.items() if du + from_v.get(x, d + 1) == d}


def check_convexity(ball: CuspedBall, level: int, samples: int, seed: int = 0) -> LemmaCheck:
    """Every geodesic between two points of a ``level``-horoball stays inside it."""
    check = LemmaCheck("horoball_convexity", "k-horoballs are convex", details={"level": level})
    half = ball.radius // 2
    groups: dict[str, list[Vertex]] = defaultdict(list)
    for v in ball.order:
        if v.depth >= level and ball.base_distance[v] <= half:
            groups[v.rep].append(v)

    pairs = [(u, w) for members in groups.values() for i, u in enumerate(members) for w in members[i + 1 :]]
    rng = np.random.default_rng(seed)
    for u, w in _sample(pairs, samples, rng):
        check.checked += 1
        for x in _geodesic_vertex_set(ball, u, w):
            if x.depth < level or horoball_of(x)[0] != u.rep:
                check.record({"u": vertex_label(u), "v": vertex_label(w), "escape": vertex_label(x)})
                break
    return check.finish()


def _certified_geodesics(ball: CuspedBall, samples: int, seed: int) -> list[GeodesicPath]:
    rng = np.random.default_rng(seed)
    targets = _sample(ball.order[1:], samples, rng)
    return [ball.geodesic(IDENTITY_VERTEX, v) for v in targets]


def _regularized(path: GeodesicPath, check: LemmaCheck) -> Optional[GeodesicPath]:
    """Regular replacement of ``path``, or None with a witness on ``check``."""
    try:
        return regularize(path)
    except RegularizationError as e:
        logger.warning(f"{check.name}: {e}")
        check.record({"end": vertex_label(path.end), "reason": str(e)})
        return None


def check_regularization(ball: CuspedBall, samples: int, seed: int = 0) -> LemmaCheck:
    """Regular replacements are geodesics with the regular profile, Hausdorff-close."""
    check = LemmaCheck(
        "regular_geodesics",
        "regular geodesics at Hausdorff distance at most 4",
        details={"max_hausdorff": 0},
    )
    for path in _certified_geodesics(ball, samples, seed):
        if not horoball_transits(path):
            continue
        check.checked += 1
        regular = _regularized(path, check)
        if regular is None:
            continue
        bound = hausdorff_upper(path, regular)
        check.details["max_hausdorff"] = max(check.details["max_hausdorff"], bound)
        if not regular.regular or len(regular) != len(path) or bound > REGULAR_HAUSDORFF_BOUND:
            check.record(
                {
                    "end": vertex_label(path.end),
                    "regular": regular.regular,
                    "hausdorff_upper": bound,
                }
            )
    return check.finish()


def _distance_to_horoball(ball: CuspedBall, x: Vertex, rep: str, cutoff: int) -> Optional[int]:
    """In-ball distance from x to the horoball over ``rep`` (its coset layer included)."""
    lengths = nx.single_source_shortest_path_length(ball.graph, x, cutoff=cutoff)
    found = [d for v, d in lengths.items() if _over_coset(v, rep)]
    return min(found) if found else None


def _over_coset(v: Vertex, rep: str) -> bool:
    if isinstance(v, CayleyVertex):
        return peripheral_coset_decompose(v.word).rep == rep
    return v.rep == rep


def check_quick_approach(ball: CuspedBall, delta_hat: int, samples: int, seed: int = 0) -> LemmaCheck:
    """(a′ − t) − δ̂ ≤ d_X(σ(t), 𝓗) ≤ a′ − t before a long regular transit."""
    threshold = 4 * delta_hat + 3
    check = LemmaCheck(
        "quick_approach",
        "distance to a horoball before a long transit",
        details={"min_transit": threshold},
    )
    for path in _certified_geodesics(ball, samples, seed):
        regular = _regularized(path, check)
        if regular is None:
            continue
        for transit in horoball_transits(regular):
            if transit.length < threshold:
                continue
            entry = transit.entry
            for t in range(entry + 1):
                x = regular.vertices[t]
                d = _distance_to_horoball(ball, x, transit.rep, entry - t)
                check.checked += 1
                if d is None or not (entry - t) - delta_hat <= d <= entry - t:
                    check.record(
                        {"end": vertex_label(path.end), "t": t, "entry": entry, "distance": d}
                    )
    return check.finish()


def check_transit_bounds(
    ball: CuspedBall,
    delta_hat: int,
    rep_length: int = 2,
    max_exponent: int = 64,
) -> LemmaCheck:
    """Geodesics to t·cᵏ spend all but |t|_X + 12δ̂ of their length in the horoball of t⟨c⟩."""
    check = LemmaCheck("transit_bounds", "long transits of geodesics to parabolic translates")
    reps = {peripheral_coset_decompose(w).rep for w in enumerate_words(rep_length, "aAbB")}
    for rep in sorted(reps, key=lambda w: (len(w), w)):
        rep_vertex = CayleyVertex(rep)
        if rep_vertex not in ball:
            continue
        slack = ball.base_distance[rep_vertex] + 12 * delta_hat
        for k in range(-max_exponent, max_exponent + 1):
            target = CayleyVertex(coset_word(rep, k))
            if k == 0 or target not in ball:
                continue
            norm = ball.base_distance[target]
            path = _regularized(ball.geodesic(IDENTITY_VERTEX, target), check)
            if path is None:
                continue
            transits = horoball_transits(path)
            main = max((t.length for t in transits if t.rep == rep), default=0)
            others = max((t.length for t in transits if t.rep != rep), default=0)
            check.checked += 1
            if main < norm - slack or others > slack:
                check.record({"rep": rep, "k": k, "main": main, "others": others, "norm": norm})
    return check.finish()


def check_common_horoballs(
    ball: CuspedBall, delta_hat: int, gap: int, samples: int, seed: int = 0
) -> LemmaCheck:
    """Geodesics with ends at most ``gap`` apart share their long transits."""
    threshold = 4 * gap + 8 * delta_hat + 3
    loss = 4 * gap + 8 * delta_hat
    check = LemmaCheck(
        "common_horoballs",
        "nearby geodesics enter common horoballs",
        details={"gap": gap, "min_transit": threshold},
    )
    for path in _certified_geodesics(ball, samples, seed):
        regular = _regularized(path, check)
        if regular is None:
            continue
        long_transits = [t for t in horoball_transits(regular) if t.length >= threshold]
        if not long_transits:
            continue
        nearby = nx.single_source_shortest_path_length(ball.graph, path.end, cutoff=gap)
        for partner_end in sorted(nearby, key=vertex_label):
            partner = _regularized(ball.geodesic(IDENTITY_VERTEX, partner_end), check)
            if partner is None:
                continue
            lengths: dict[str, int] = defaultdict(int)
            for t in horoball_transits(partner):
                lengths[t.rep] = max(lengths[t.rep], t.length)
            for transit in long_transits:
                check.checked += 1
                if lengths[transit.rep] < transit.length - loss:
                    check.record(
                        {
                            "end": vertex_label(path.end),
                            "partner": vertex_label(partner_end),
                            "rep": transit.rep,
                            "length": transit.length,
                            "partner_length": lengths[transit.rep],
                        }
                    )
    return check.finish()


def check_metric(ball: CuspedBall, samples: int, seed: int = 0) -> LemmaCheck:
    """Symmetry and the triangle inequality for certified distances.

    The first two points of a triple are drawn from at most
    ``METRIC_SOURCES`` sampled vertices; the third from the whole pool.
    """
    check = LemmaCheck("metric_axioms", "d_X is a metric")
    pool = ball.vertices_within(ball.radius // 2)
    if len(pool) < 3:
        return check.finish()
    rng = np.random.default_rng(seed)
    sources = [pool[i] for i in rng.choice(len(pool), size=min(len(pool), METRIC_SOURCES), replace=False)]
    for i, j, k in zip(
        rng.integers(0, len(sources), size=samples),
        rng.integers(0, len(sources), size=samples),
        rng.integers(0, len(pool), size=samples),
    ):
        x, y, z = sources[i], sources[j], pool[k]
        dxy, dyx = ball.distance(x, y).value, ball.distance(y, x).value
        dyz, dxz = ball.distance(y, z).value, ball.distance(x, z).value
        check.checked += 1
        if dxy != dyx or dxz > dxy + dyz:
            check.record({"x": vertex_label(x), "y": vertex_label(y), "z": vertex_label(z)})
    return check.finish()


def run_geometry_checks(
    ball: CuspedBall, delta_hat: int, samples: int, seed: int = 0, metric_samples: Optional[int] = None
) -> list[LemmaCheck]:
    return [
        check_metric(ball, metric_samples or samples, seed),
        check_regularization(ball, samples, seed),
        check_convexity(ball, delta_hat + 1, samples, seed),
        check_quick_approach(ball, delta_hat, samples, seed),
        check_transit_bounds(ball, delta_hat),
        check_common_horoballs(ball, delta_hat, gap=1, samples=samples, seed=seed),
    ]
