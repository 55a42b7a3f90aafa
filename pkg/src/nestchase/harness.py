"""Experiment harness: run algorithms on instances, score them, persist results.

File formats
------------
Instance files are JSON::

    {"dimension": d, "start": [...],
     "batches": [[{"a": [...], "b": 0.5, "sense": "le"}, ...], ...]}

``sense`` may be "le" (``a.x <= b``) or "ge" (``a.x >= b``); "ge" rows are
canonicalized to "le" by negation on load, and files are always written in
canonical "le" form, so save -> load round-trips bit-exactly.  Trajectory
files store the walked polyline, per-step costs, per-request positions and
the structural event list.  Summaries are CSV with one row per run.

The offline optimum of a nested stream is the distance from the start to the
final body: moving there immediately is feasible for every earlier request.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .adversary import NestedInstance
from .baselines import ALGORITHMS, CHASE
from .chaser import NestedChaser, PhaseEvent, Trajectory
from .convex_ops import project
from .errors import ContractViolation, ParseError
from .geometry import Halfspace, Polytope, as_point, clip_box, is_bounded

SUMMARY_COLUMNS = ("algorithm", "instance", "d", "n", "total_cost", "opt",
                   "ratio", "phases", "recenterings", "wall_time_s")


def opt(instance: NestedInstance) -> float:
    """Offline optimum of a nested instance: distance from start to the final
    body (infeasibility error if that body is empty)."""
    final = instance.final_body()
    start = as_point(instance.start, instance.dimension)
    return float(np.linalg.norm(project(final, start) - start))


@dataclass
class RunReport:
    """Bookkeeping for one (algorithm, instance) run."""

    algorithm: str
    instance: str
    dimension: int
    n_requests: int
    total_cost: float
    opt_cost: float
    ratio: float
    phase_events: list = field(default_factory=list)
    wall_time_s: float = 0.0
    clipped_requests: int = 0

    @property
    def phases(self) -> int:
        """Top-level phase starts: stage changes plus top-dimension recenters."""
        return sum(1 for e in self.phase_events
                   if e["kind"] == "stage-change"
                   or (e["kind"] == "recenter" and e["dim"] == self.dimension))

    @property
    def recenterings(self) -> int:
        return sum(1 for e in self.phase_events if e["kind"] == "recenter")

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "instance": self.instance,
            "dimension": self.dimension,
            "n_requests": self.n_requests,
            "total_cost": self.total_cost,
            "opt_cost": self.opt_cost,
            "ratio": "inf" if np.isinf(self.ratio) else self.ratio,
            "phase_events": self.phase_events,
            "wall_time_s": self.wall_time_s,
            "clipped_requests": self.clipped_requests,
        }


def _ratio(total_cost: float, opt_cost: float) -> float:
    if opt_cost > 0:
        return total_cost / opt_cost
    return float("inf") if total_cost > 0 else 0.0


def run(algorithm: str, source, *, n: int | None = None, start=None,
        strict: bool = False, instance_id: str | None = None,
        ) -> tuple[RunReport, Trajectory]:
    """Run a registered algorithm against an instance or adaptive adversary.

    ``source`` is either a :class:`NestedInstance` (oblivious stream) or an
    object with ``next_request(position)`` (adaptive; requires ``n``).  For
    the "chase" algorithm requests go through the guess-and-double chaser;
    baselines get unbounded requests pre-clipped to the box
    ``B_inf(start, 2 * max_delta_so_far + 1)``, recorded in the report.
    """
    adaptive = hasattr(source, "next_request")
    if adaptive:
        if n is None:
            raise ContractViolation("adaptive sources need an explicit request count")
        dim = source.dim
        if start is None:
            start = getattr(source, "start", None)
            if start is None:
                raise ContractViolation("adaptive source has no default start point")
        name = instance_id or f"{type(source).__name__}-n{n}"
    else:
        dim = source.dimension
        if start is None:
            start = source.start
        count = source.n_requests if n is None else min(n, source.n_requests)
        name = instance_id or f"instance-d{dim}-n{count}"
    start = as_point(start, dim)

    if algorithm == CHASE:
        stepper = None
        chaser = NestedChaser(start, strict=strict)
        position = chaser.position
    elif algorithm in ALGORITHMS:
        stepper = ALGORITHMS[algorithm].step
        chaser = None
        position = start.copy()
        path = [start.copy()]
    else:
        raise ContractViolation(f"unknown algorithm {algorithm!r}")

    served: list[np.ndarray] = []
    bodies: list[Polytope] = []
    clipped_count = 0
    max_delta = 0.0
    t0 = time.perf_counter()

    if adaptive:
        def stream():
            while len(served) < n:
                req = source.next_request(position)
                if req is None:
                    return
                yield req
        requests = stream()
    else:
        def stream():
            for i, body in enumerate(source.bodies()):
                if i >= count:
                    return
                yield body
        requests = stream()

    for index, body in enumerate(requests):
        bodies.append(body)
        if stepper is None:
            position = chaser.serve(body, index)
        else:
            delta = float(np.linalg.norm(project(body, start, verify=strict) - start))
            max_delta = max(max_delta, delta)
            fed = body
            if not is_bounded(body):
                fed = clip_box(body, start, 2.0 * max_delta + 1.0)
                clipped_count += 1
            position = stepper(position, fed)
            path.append(position.copy())
        served.append(np.asarray(position, dtype=float).copy())
    wall = time.perf_counter() - t0

    if stepper is None:
        event_objs = list(chaser.events)
        full_path = chaser.path
    else:
        event_objs = []
        full_path = path
    events = [e.to_dict() for e in event_objs]

    traj = Trajectory(request_positions=[p.copy() for p in served],
                      events=event_objs)
    for p in full_path:
        traj.append(p)

    opt_cost = 0.0
    if bodies:
        opt_cost = float(np.linalg.norm(project(bodies[-1], start) - start))
    total = traj.total_cost
    report = RunReport(
        algorithm=algorithm, instance=name, dimension=dim,
        n_requests=len(served), total_cost=total, opt_cost=opt_cost,
        ratio=_ratio(total, opt_cost), phase_events=events,
        wall_time_s=wall, clipped_requests=clipped_count)
    return report, traj


# ---------------------------------------------------------------------------
# persistence


def _require(cond: bool, message: str):
    if not cond:
        raise ParseError(message)


def save_instance(instance: NestedInstance, path):
    doc = {
        "dimension": instance.dimension,
        "start": list(map(float, instance.start)),
        "batches": [[{"a": list(map(float, h.normal)), "b": float(h.offset),
                      "sense": "le"} for h in batch]
                    for batch in instance.batches],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_instance(path) -> NestedInstance:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    _require(isinstance(doc, dict), f"{path}: top level must be an object")
    for key in ("dimension", "start", "batches"):
        _require(key in doc, f"{path}: missing key {key!r}")
    dim = doc["dimension"]
    _require(isinstance(dim, int) and dim >= 1,
             f"{path}: dimension must be a positive integer")
    start = doc["start"]
    _require(isinstance(start, list) and len(start) == dim,
             f"{path}: start must be a list of {dim} numbers")
    batches = []
    for bi, batch in enumerate(doc["batches"]):
        _require(isinstance(batch, list) and batch,
                 f"{path}: batch {bi} must be a nonempty list")
        rows = []
        for ri, row in enumerate(batch):
            where = f"{path}: batch {bi} row {ri}"
            _require(isinstance(row, dict), f"{where}: not an object")
            for key in ("a", "b"):
                _require(key in row, f"{where}: missing key {key!r}")
            a = row["a"]
            _require(isinstance(a, list) and len(a) == dim,
                     f"{where}: normal must have length {dim}")
            sense = row.get("sense", "le")
            _require(sense in ("le", "ge"), f"{where}: sense must be 'le' or 'ge'")
            try:
                normal = np.array([float(v) for v in a])
                offset = float(row["b"])
            except (TypeError, ValueError) as exc:
                raise ParseError(f"{where}: non-numeric entry") from exc
            if sense == "ge":
                normal = -normal
                offset = -offset
            try:
                rows.append(Halfspace(normal, offset))
            except ContractViolation as exc:
                raise ParseError(f"{where}: {exc}") from exc
        batches.append(rows)
    return NestedInstance(dimension=dim, start=np.array([float(v) for v in start]),
                          batches=batches)


def save_trajectory(trajectory: Trajectory, path):
    doc = {
        "points": [list(map(float, p)) for p in trajectory.points],
        "step_costs": list(map(float, trajectory.step_costs)),
        "total_cost": trajectory.total_cost,
        "request_positions": [list(map(float, p))
                              for p in trajectory.request_positions],
        "events": [e.to_dict() if isinstance(e, PhaseEvent) else e
                   for e in trajectory.events],
    }
    Path(path).write_text(json.dumps(doc, indent=1))


def load_trajectory(path) -> Trajectory:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    _require(isinstance(doc, dict) and "points" in doc,
             f"{path}: not a trajectory file")
    traj = Trajectory(
        request_positions=[np.array(p, dtype=float)
                           for p in doc.get("request_positions", [])],
        events=doc.get("events", []))
    for p in doc["points"]:
        traj.append(np.array(p, dtype=float))
    return traj


def save_report(report: RunReport, path):
    Path(path).write_text(json.dumps(report.to_dict(), indent=1))


def load_report(path) -> RunReport:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    _require(isinstance(doc, dict) and "algorithm" in doc,
             f"{path}: not a report file")
    ratio = doc.get("ratio", 0.0)
    if ratio == "inf":
        ratio = float("inf")
    try:
        return RunReport(
            algorithm=doc["algorithm"], instance=doc["instance"],
            dimension=int(doc["dimension"]), n_requests=int(doc["n_requests"]),
            total_cost=float(doc["total_cost"]), opt_cost=float(doc["opt_cost"]),
            ratio=float(ratio), phase_events=doc.get("phase_events", []),
            wall_time_s=float(doc.get("wall_time_s", 0.0)),
            clipped_requests=int(doc.get("clipped_requests", 0)))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed report ({exc})") from exc


def emit_summary(reports, path):
    """Write one CSV row per report."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_COLUMNS)
        for r in reports:
            ratio = "inf" if np.isinf(r.ratio) else repr(r.ratio)
            writer.writerow([r.algorithm, r.instance, r.dimension, r.n_requests,
                             repr(r.total_cost), repr(r.opt_cost), ratio,
                             r.phases, r.recenterings, f"{r.wall_time_s:.6f}"])
