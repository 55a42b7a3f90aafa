"""Instance generators: an adaptive lower-bound adversary and random streams.

``AlternatingCutAdversary`` reproduces the two-dimensional construction that
defeats the ellipsoid- and centroid-based baselines.  Every request is the
base strip ``{y >= 0, -1 <= x <= 1}`` cut by one extra halfspace
``2y <= m*x + c`` whose boundary line rocks left and right while sinking
toward the segment ``y = 0``: the right-family line with index i passes
through ``(1, alpha^(2i))`` and ``(-1, alpha^(2i+1))``, the left-family line
through ``(-1, alpha^(2i+1))`` and ``(1, alpha^(2i+2))``.  The adversary is
adaptive: each round it picks, within the family for that round's parity,
the smallest index whose halfspace excludes the algorithm's current
position.  The point (0, 0) stays feasible forever, so the offline optimum
is bounded while a center-tracking algorithm is dragged back and forth.

``gen_random_nested`` and ``gen_covering_lp`` build oblivious
:class:`NestedInstance` streams for test corpora; both are deterministic
under their seed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .geometry import Halfspace, Polytope, as_point

DEFAULT_ALPHA = 0.5
# alpha^(2i) underflows long before i ~ 500; capping the cut index keeps the
# geometry well conditioned, and the oscillation is plain after ~20 rounds.
DEFAULT_INDEX_CAP = 60

ADVERSARY_START = np.array([0.0, 1.0])


def base_halfspaces() -> tuple[Halfspace, Halfspace, Halfspace]:
    """The fixed strip: y >= 0, x >= -1, x <= 1 (canonicalized to a.x <= b)."""
    return (Halfspace(np.array([0.0, -1.0]), 0.0),
            Halfspace(np.array([-1.0, 0.0]), 1.0),
            Halfspace(np.array([1.0, 0.0]), 1.0))


def _line_cut(slope: float, intercept: float) -> Halfspace:
    # 2y <= slope*x + intercept  ==>  -slope*x + 2y <= intercept
    return Halfspace(np.array([-slope, 2.0]), intercept)


def right_cut(alpha: float, i: int) -> Halfspace:
    """Right-family cut i: boundary through (1, a^2i) and (-1, a^(2i+1))."""
    lo = alpha ** (2 * i)
    hi = alpha ** (2 * i + 1)
    return _line_cut(lo - hi, lo + hi)


def left_cut(alpha: float, i: int) -> Halfspace:
    """Left-family cut i: boundary through (-1, a^(2i+1)) and (1, a^(2i+2))."""
    lo = alpha ** (2 * i + 2)
    hi = alpha ** (2 * i + 1)
    return _line_cut(lo - hi, lo + hi)


def opening_cut(alpha: float) -> Halfspace:
    """The first cut: 2y <= (1-alpha)x + (1+alpha), through (-1, alpha), (1, 1)."""
    return right_cut(alpha, 0)


def strip_body(cut: Halfspace) -> Polytope:
    """The base strip intersected with one oscillation cut."""
    return Polytope(2, base_halfspaces() + (cut,))


def first_body(alpha: float = DEFAULT_ALPHA) -> Polytope:
    """The opening request of the oscillating construction."""
    return strip_body(opening_cut(alpha))


class AlternatingCutAdversary:
    """Adaptive request source that oscillates center-tracking algorithms.

    Call :meth:`next_request` with the online algorithm's current position;
    it returns the next (nested) body, or None once every candidate cut up to
    ``index_cap`` already contains the position, meaning the algorithm has
    settled into the always-feasible region and the adversary gives up.
    """

    dim = 2
    start = ADVERSARY_START

    def __init__(self, alpha: float = DEFAULT_ALPHA,
                 index_cap: int = DEFAULT_INDEX_CAP):
        if not 0.0 < alpha < 1.0:
            raise ContractViolation("alpha must lie strictly between 0 and 1")
        if index_cap < 1:
            raise ContractViolation("index cap must be >= 1")
        self.alpha = float(alpha)
        self.index_cap = int(index_cap)
        self.rounds = 0
        self.used_index = -1
        self.base = base_halfspaces()

    def next_request(self, position) -> Polytope | None:
        pos = as_point(position, 2)
        t = self.rounds + 1
        if t == 1:
            cut = opening_cut(self.alpha)
            self.used_index = 0
        else:
            family = right_cut if t % 2 == 1 else left_cut
            cut = None
            for i in range(self.index_cap + 1):
                cand = family(self.alpha, i)
                if cand.violation(pos) > 0.0:
                    cut = cand
                    self.used_index = i
                    break
            if cut is None:
                return None
        self.rounds = t
        return Polytope(2, self.base + (cut,))


@dataclass
class NestedInstance:
    """A start point plus halfspace batches whose cumulative intersections
    form the nested request bodies."""

    dimension: int
    start: np.ndarray
    batches: list = field(default_factory=list)

    @property
    def n_requests(self) -> int:
        return len(self.batches)

    def bodies(self):
        """Yield the cumulative request bodies in order."""
        A = np.empty((0, self.dimension))
        b = np.empty(0)
        for batch in self.batches:
            A = np.vstack([A] + [h.normal[None, :] for h in batch])
            b = np.concatenate([b] + [[h.offset] for h in batch])
            yield Polytope._from_arrays_unsafe(self.dimension, A.copy(), b.copy())

    def body(self, i: int) -> Polytope:
        """The i-th (0-based) cumulative request body."""
        if not 0 <= i < self.n_requests:
            raise ContractViolation(f"request index {i} out of range")
        for j, P in enumerate(self.bodies()):
            if j == i:
                return P
        raise AssertionError("unreachable")

    def final_body(self) -> Polytope:
        return self.body(self.n_requests - 1)


def _ray_exit(A: np.ndarray, b: np.ndarray, p: np.ndarray, u: np.ndarray) -> float:
    """Largest t with p + t*u feasible for A x <= b (p strictly feasible)."""
    au = A @ u
    slack = b - A @ p
    pos = au > 1e-15
    if not np.any(pos):
        return np.inf
    return float(np.min(slack[pos] / au[pos]))


def gen_random_nested(d: int, n: int, seed: int) -> NestedInstance:
    """Random nested stream that can never go empty.

    A hidden target point p gets a box around it as the first batch; each
    later batch adds 1-3 halfspaces cutting at points strictly between the
    current body's boundary and p (found by ray shooting from p), so p stays
    interior forever and the stream is nested by construction.
    """
    if d < 1 or n < 1:
        raise ContractViolation("need d >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    p = rng.uniform(-1.0, 1.0, size=d)
    half = float(rng.uniform(1.0, 2.5))
    center = p + rng.uniform(-0.3, 0.3, size=d) * half
    box = Polytope.box(center, half)
    batches: list[list[Halfspace]] = [list(box.halfspaces)]
    A = box.A.copy()
    b = box.b.copy()

    for _ in range(n - 1):
        batch = []
        for _ in range(int(rng.integers(1, 4))):
            u = rng.normal(size=d)
            u /= np.linalg.norm(u)
            t_exit = _ray_exit(A, b, p, u)
            if not np.isfinite(t_exit) or t_exit <= 1e-12:
                continue
            q = p + float(rng.uniform(0.25, 0.9)) * t_exit * u
            h = Halfspace(u.copy(), float(u @ q))
            batch.append(h)
            A = np.vstack([A, h.normal[None, :]])
            b = np.append(b, h.offset)
        if not batch:  # keep batch count honest even if all cuts degenerated
            hs = Halfspace(np.eye(d)[0].copy(), float(p[0] + half))
            batch.append(hs)
            A = np.vstack([A, hs.normal[None, :]])
            b = np.append(b, hs.offset)
        batches.append(batch)

    if rng.uniform() < 0.25:
        start = p + rng.uniform(-0.2, 0.2, size=d) * half  # inside the box
    else:
        direction = rng.normal(size=d)
        direction /= np.linalg.norm(direction)
        start = center + direction * float(rng.uniform(1.2, 4.0)) * half
    return NestedInstance(dimension=d, start=start, batches=batches)


def gen_random_bounded(d: int, n: int, r: float, seed: int) -> NestedInstance:
    """Random nested stream whose every body lies in ``B2(0, r)``; start at 0.

    Useful for exercising the bounded chaser directly: the first batch is a
    box fully inside the ball, later batches cut toward a hidden interior
    target exactly as in :func:`gen_random_nested`.
    """
    if d < 1 or n < 1 or r <= 0:
        raise ContractViolation("need d >= 1, n >= 1 and r > 0")
    rng = np.random.default_rng(seed)
    direction = rng.normal(size=d)
    direction /= np.linalg.norm(direction)
    center = direction * float(rng.uniform(0.0, 0.5)) * r
    max_half = (r - float(np.linalg.norm(center))) / np.sqrt(d)
    half = float(rng.uniform(0.4, 0.95)) * max_half
    p = center + rng.uniform(-0.3, 0.3, size=d) * half
    box = Polytope.box(center, half)
    batches: list[list[Halfspace]] = [list(box.halfspaces)]
    A = box.A.copy()
    b = box.b.copy()
    for _ in range(n - 1):
        batch = []
        for _ in range(int(rng.integers(1, 4))):
            u = rng.normal(size=d)
            u /= np.linalg.norm(u)
            t_exit = _ray_exit(A, b, p, u)
            if not np.isfinite(t_exit) or t_exit <= 1e-12:
                continue
            q = p + float(rng.uniform(0.25, 0.9)) * t_exit * u
            h = Halfspace(u.copy(), float(u @ q))
            batch.append(h)
            A = np.vstack([A, h.normal[None, :]])
            b = np.append(b, h.offset)
        if not batch:
            hs = Halfspace(np.eye(d)[0].copy(), float(p[0] + half))
            batch.append(hs)
            A = np.vstack([A, hs.normal[None, :]])
            b = np.append(b, hs.offset)
        batches.append(batch)
    return NestedInstance(dimension=d, start=np.zeros(d), batches=batches)


def gen_covering_lp(d: int, n: int, seed: int) -> NestedInstance:
    """Online covering stream: one constraint ``a.x >= b`` per batch with
    nonnegative a and positive b, starting from the origin.

    Every cumulative body is unbounded (the all-ones recession direction
    survives every covering constraint) and the origin violates the first
    request.
    """
    if d < 1 or n < 1:
        raise ContractViolation("need d >= 1 and n >= 1")
    rng = np.random.default_rng(seed)
    batches = []
    for _ in range(n):
        a = rng.uniform(0.1, 1.0, size=d)
        mask = rng.uniform(size=d) < 0.5
        if np.all(mask):
            mask[rng.integers(d)] = False
        a = np.where(mask, 0.0, a)  # sparsify but keep a nonzero
        beta = float(rng.uniform(0.2, 2.0))
        batches.append([Halfspace(-a, -beta)])  # a.x >= b  ==>  -a.x <= -b
    return NestedInstance(dimension=d, start=np.zeros(d), batches=batches)
