"""Baseline online algorithms behind one step-function interface.

Each baseline is a stateless rule ``(current position, request) -> new
position`` that moves only when the current position becomes infeasible
(checked with the same internal tolerance the geometry module uses), so a
feasible position is always returned unchanged.  The ellipsoid and centroid
rules need bounded full-dimensional requests; the harness pre-clips
unbounded bodies before handing them over.

The registry also names "chase", which is not a stateless step rule; the
harness routes it through :class:`nestchase.chaser.NestedChaser`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .convex_ops import centroid, min_volume_enclosing_ellipsoid, project
from .errors import EmptyBodyError
from .geometry import DEFAULT_TOL, Polytope, contains, vertices

CHASE = "chase"


@dataclass(frozen=True)
class OnlineAlgorithm:
    name: str
    step: Callable[[np.ndarray, Polytope], np.ndarray]


def greedy_step(pos, P: Polytope) -> np.ndarray:
    """Move to the closest feasible point (1-competitive in one dimension)."""
    if contains(P, pos, DEFAULT_TOL):
        return np.asarray(pos, dtype=float)
    return project(P, pos)


def ellipsoid_step(pos, P: Polytope) -> np.ndarray:
    """Move to the center of the minimum-volume enclosing ellipsoid."""
    if contains(P, pos, DEFAULT_TOL):
        return np.asarray(pos, dtype=float)
    verts = vertices(P)
    if not len(verts):
        raise EmptyBodyError("request body is empty")
    return min_volume_enclosing_ellipsoid(verts).center


def centroid_step(pos, P: Polytope) -> np.ndarray:
    """Move to the center of mass of the request."""
    if contains(P, pos, DEFAULT_TOL):
        return np.asarray(pos, dtype=float)
    return centroid(P)


ALGORITHMS = {
    "greedy": OnlineAlgorithm("greedy", greedy_step),
    "ellipsoid": OnlineAlgorithm("ellipsoid", ellipsoid_step),
    "centroid": OnlineAlgorithm("centroid", centroid_step),
}

ALGORITHM_NAMES = tuple(ALGORITHMS) + (CHASE,)
