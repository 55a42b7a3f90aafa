"""The nested chasing algorithm: recursive bounded chasing plus guess-and-double.

The bounded chaser serves a stream of nested bodies that all live inside a
ball of known radius ``r`` around its start.  In one dimension it is the
greedy algorithm (move to the closest feasible point).  In dimension d >= 2
it runs in *phases* around a center ``s``: as long as the current request
meets one of the d axis-aligned hyperplanes through ``s``, the request is
served by a (d-1)-dimensional chaser living inside that hyperplane (a
*hyperplane step*), always preferring the smallest axis index that still
works; nesting means a dead axis stays dead, so the active axis only
increases and switches at most d-1 times per phase.  When a request avoids
every hyperplane through ``s``, it is confined to an open orthant of the
phase ball, so the center of its minimum enclosing ball is feasible and its
radius shrinks by at least the factor ``sqrt(1 - 1/d)``: the chaser moves
there and starts a new phase (a *recentering step*).

The guess-and-double wrapper turns that absolute-movement guarantee into a
competitive one for arbitrary nested streams.  It tracks the distance
``delta_i`` from the start to each request, rescales so the first positive
distance is 1, and groups requests into stages by which dyadic interval
``[2^(j-1), 2^j)`` their distance falls in.  Each stage restarts a fresh
bounded chaser from the start point on requests clipped to the box
``B_inf(start, 2^j)``; the box circumscribes the dyadic ball, so the clipped
instance is ``(2^j * sqrt(d))``-bounded and the competitive bound picks up
one factor of ``sqrt(d)`` over the ball-clipped ideal.

A chaser instance is a sequential state machine (one request in, one point
out) and is not safe for concurrent mutation; distinct instances are
independent.  Axis indices are 0-based, matching the geometry module.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .convex_ops import Ball, min_enclosing_ball, project
from .errors import ContractViolation, EmptyBodyError
from .geometry import (DEFAULT_TOL, Chart, Polytope, as_point, clip_box, contains,
                       contains_body, interval_bounds, is_empty, slice_axis,
                       vertices)

EVENT_KINDS = ("hyperplane-step", "axis-switch", "recenter", "stage-change")


def g_bound(d: int) -> float:
    """Movement bound coefficient for the bounded chaser: g(1)=1, g(d)=6*d^2*g(d-1)."""
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise ContractViolation("dimension must be an integer >= 1")
    g = 1.0
    for k in range(2, d + 1):
        g *= 6.0 * k * k
    return g


def f_bound(d: int) -> float:
    """Competitive-ratio bound of the guess-and-double reduction: 4*(g(d)+1)."""
    return 4.0 * (g_bound(d) + 1.0)


@dataclass(frozen=True)
class PhaseEvent:
    """One structural event in a chaser run.

    ``index`` is the 0-based request index in the stream the event belongs
    to, ``dim`` the dimension of the (possibly recursive) chaser that emitted
    it, and ``chaser`` a per-run unique id of that chaser instance.  An
    ``axis-switch`` is emitted whenever a phase activates a hyperplane,
    including the first activation, so a phase with k such events switched
    k-1 times.
    """

    kind: str
    index: int
    dim: int
    chaser: int
    axis: int | None = None
    radius: float | None = None
    prev_radius: float | None = None
    stage: int | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "index": self.index, "dim": self.dim,
               "chaser": self.chaser}
        for key in ("axis", "radius", "prev_radius", "stage"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        return out


@dataclass
class Trajectory:
    """The polyline an online algorithm walked, plus per-step and total cost.

    ``points`` is the full path including the start and any intermediate
    stops (the guess-and-double wrapper walks back to its start point between
    stages), so ``step_costs`` are honest distances between consecutive path
    points.  ``request_positions[i]`` is where the algorithm sat right after
    serving request i; for the bounded chaser and the baselines it equals
    ``points[i + 1]``.
    """

    points: list = field(default_factory=list)
    step_costs: list = field(default_factory=list)
    request_positions: list = field(default_factory=list)
    events: list = field(default_factory=list)

    @property
    def total_cost(self) -> float:
        return float(sum(self.step_costs))

    @property
    def n_requests(self) -> int:
        return len(self.request_positions)

    def append(self, point: np.ndarray):
        if self.points:
            self.step_costs.append(float(np.linalg.norm(point - self.points[-1])))
        self.points.append(np.asarray(point, dtype=float).copy())


def _slice_nonempty(S: Polytope, witness=None) -> bool:
    """Nonemptiness of an already-sliced body, cheaply where possible."""
    if witness is not None and contains(S, witness, DEFAULT_TOL):
        return True
    if S.dim == 1:
        lo, hi = interval_bounds(S)
        return lo <= hi + DEFAULT_TOL * max(1.0, abs(hi) if np.isfinite(hi) else 1.0)
    return not is_empty(S)


def select_hyperplane(s, P: Polytope, min_axis: int = 0) -> int | None:
    """Smallest axis k >= min_axis whose hyperplane ``x_k = s_k`` meets P.

    Returns None when no axis qualifies, which is the trigger for a
    recentering step.  ``min_axis`` is the first axis not yet ruled out in
    the current phase; nesting guarantees ruled-out axes stay empty.
    """
    center = as_point(s, P.dim)
    if min_axis < 0:
        raise ContractViolation("min_axis must be >= 0")
    if min_axis >= P.dim:
        return None
    if contains(P, center, DEFAULT_TOL):
        return min_axis  # the center itself witnesses every slice
    for k in range(min_axis, P.dim):
        S, _ = slice_axis(P, k, center[k], center)
        if _slice_nonempty(S):
            return k
    return None


def recenter(P: Polytope) -> Ball:
    """Minimum enclosing ball of a bounded nonempty body, via its vertices.

    The center is feasible for P, and when P avoided every axis-aligned
    hyperplane through the previous center s of a phase with radius r, the
    new radius is at most ``r * sqrt(1 - 1/d)``.
    """
    verts = vertices(P)
    if not len(verts):
        raise EmptyBodyError("recentering on an empty body")
    return min_enclosing_ball(verts)


class BoundedChaser:
    """Streaming chaser for instances bounded by ``B2(start, radius)``.

    Feed nested nonempty requests one at a time through :meth:`serve`; the
    return value (also available as ``position``) is always feasible for the
    request just served.  Total movement is at most ``g_bound(dim) * radius``.

    ``strict`` validates each request (nonempty, within the ball, nested
    under its predecessor) at O(vertex-enumeration) cost per request;
    production mode trusts the stream.
    """

    def __init__(self, dim: int, start, radius: float, *, strict: bool = False,
                 events: list | None = None, _ids=None):
        if dim < 1:
            raise ContractViolation("dimension must be >= 1")
        if radius <= 0 or not np.isfinite(radius):
            raise ContractViolation("radius must be positive and finite")
        self.dim = int(dim)
        self.start = as_point(start, dim).copy()
        self.radius = float(radius)
        self.strict = bool(strict)
        self.events = events if events is not None else []
        self._ids = _ids if _ids is not None else itertools.count()
        self.chaser_id = next(self._ids)
        self.position = self.start.copy()
        self.path = [self.start.copy()]
        # phase state
        self.phase_center = self.start.copy()
        self.phase_radius = float(radius)
        self.active_axis: int | None = None
        self.min_axis = 0
        self._child: BoundedChaser | None = None
        self._prev_request: Polytope | None = None

    def _emit(self, kind: str, index: int, **kw):
        self.events.append(PhaseEvent(kind=kind, index=index, dim=self.dim,
                                      chaser=self.chaser_id, **kw))

    def _validate(self, P: Polytope):
        verts = vertices(P)
        if not len(verts):
            raise EmptyBodyError("request body is empty")
        dist = np.linalg.norm(verts - self.start, axis=1)
        if np.max(dist) > self.radius * (1 + 1e-9) + 1e-12:
            raise ContractViolation(
                f"request escapes the radius-{self.radius:g} ball "
                f"(vertex at distance {np.max(dist):g})")
        if self._prev_request is not None and not contains_body(
                self._prev_request, P, 1e-9):
            raise ContractViolation("request stream is not nested")
        self._prev_request = P

    def serve(self, P: Polytope, index: int = 0) -> np.ndarray:
        """Move to a feasible point of the next request and return it."""
        if P.dim != self.dim:
            raise ContractViolation(
                f"request dimension {P.dim} != chaser dimension {self.dim}")
        if self.strict:
            self._validate(P)
        pos = self._serve(P, index)
        self.path.append(pos.copy())
        return pos

    def _serve(self, P: Polytope, index: int) -> np.ndarray:
        if self.dim == 1:
            self.position = project(P, self.position, verify=False)
            return self.position.copy()

        while True:
            if self.active_axis is None:
                k = self._select(P)
                if k is None:
                    return self._recenter(P, index)
                self._activate(k, index)
            S, chart = slice_axis(P, self.active_axis,
                                  self.phase_center[self.active_axis],
                                  self.phase_center)
            if _slice_nonempty(S, witness=self._child.position):
                y = self._child.serve(S, index)
                self.position = chart.embed(y)
                self._emit("hyperplane-step", index, axis=self.active_axis)
                return self.position.copy()
            # current hyperplane is dead; nesting keeps it dead, move on
            self.min_axis = self.active_axis + 1
            self.active_axis = None
            self._child = None

    def _select(self, P: Polytope) -> int | None:
        return select_hyperplane(self.phase_center, P, self.min_axis)

    def _activate(self, axis: int, index: int):
        self.active_axis = axis
        chart = Chart(axis=axis, value=float(self.phase_center[axis]),
                      origin=self.phase_center.copy())
        self._child = BoundedChaser(self.dim - 1, chart.project(self.phase_center),
                                    self.phase_radius, strict=False,
                                    events=self.events, _ids=self._ids)
        self._emit("axis-switch", index, axis=axis)

    def _recenter(self, P: Polytope, index: int) -> np.ndarray:
        ball = recenter(P)
        prev = self.phase_radius
        self.phase_center = ball.center.copy()
        self.phase_radius = max(ball.radius, 1e-300)  # guard: radius must stay positive
        self.position = ball.center.copy()
        self.active_axis = None
        self.min_axis = 0
        self._child = None
        self._emit("recenter", index, radius=self.phase_radius, prev_radius=prev)
        return self.position.copy()


class NestedChaser:
    """Streaming guess-and-double wrapper around :class:`BoundedChaser`.

    Serves arbitrary nested nonempty requests from ``start``.  While requests
    still contain the start point nothing moves; the first infeasible request
    fixes the distance scale, after which requests are grouped into dyadic
    stages and each stage runs a fresh bounded chaser on box-clipped requests.
    """

    def __init__(self, start, *, strict: bool = False):
        self.start = as_point(start).copy()
        self.dim = self.start.shape[0]
        self.strict = bool(strict)
        self.position = self.start.copy()
        self.path = [self.start.copy()]
        self.scale: float | None = None
        self.stage: int | None = None
        self.stage_box_radius: float | None = None
        self.events: list[PhaseEvent] = []
        self._ids = itertools.count()
        self._chaser: BoundedChaser | None = None
        self._last_delta = 0.0

    def serve(self, P: Polytope, index: int = 0) -> np.ndarray:
        if P.dim != self.dim:
            raise ContractViolation(
                f"request dimension {P.dim} != chaser dimension {self.dim}")
        if self.scale is None and contains(P, self.start, DEFAULT_TOL):
            self.path.append(self.position.copy())
            return self.position.copy()  # free until the first infeasible body

        delta = float(np.linalg.norm(
            project(P, self.start, verify=self.strict) - self.start))
        delta = max(delta, self._last_delta)  # nested streams: non-decreasing
        self._last_delta = delta
        if self.scale is None:
            self.scale = delta

        stage = max(self.stage or 1, 1)
        while delta >= self.scale * (2.0 ** stage):
            stage += 1
        if stage != self.stage:
            self.stage = stage
            box_r = self.scale * (2.0 ** stage)
            self.stage_box_radius = box_r
            if np.any(self.position != self.start):
                self.path.append(self.start.copy())  # walk back before restarting
            self.position = self.start.copy()
            self._chaser = BoundedChaser(
                self.dim, self.start, box_r * math.sqrt(self.dim),
                strict=self.strict, events=self.events, _ids=self._ids)
            self.events.append(PhaseEvent(
                kind="stage-change", index=index, dim=self.dim,
                chaser=self._chaser.chaser_id, stage=stage, radius=box_r))
        # the per-stage bounded chaser re-validates nestedness and boundedness
        # of the clipped stream when strict
        clipped = clip_box(P, self.start, self.stage_box_radius)
        self.position = self._chaser.serve(clipped, index)
        self.path.append(self.position.copy())
        return self.position.copy()


def _assemble(path, request_positions, events) -> Trajectory:
    traj = Trajectory(events=list(events),
                      request_positions=[p.copy() for p in request_positions])
    for p in path:
        traj.append(p)
    return traj


def chase_bounded(dim: int, start, r: float, requests, *,
                  strict: bool = False) -> Trajectory:
    """Run the bounded chaser over an iterable of nested requests.

    Every request must be a nonempty polytope inside ``B2(start, r)``
    (validated when ``strict``); the resulting trajectory visits a feasible
    point of each request and moves at most ``g_bound(dim) * r`` in total.
    """
    chaser = BoundedChaser(dim, start, r, strict=strict)
    served = [chaser.serve(P, i) for i, P in enumerate(requests)]
    return _assemble(chaser.path, served, chaser.events)


def chase_nested(start, requests, *, strict: bool = False) -> Trajectory:
    """Run the full nested chasing algorithm over an iterable of requests."""
    chaser = NestedChaser(start, strict=strict)
    served = [chaser.serve(P, i) for i, P in enumerate(requests)]
    return _assemble(chaser.path, served, chaser.events)
