"""Halfspace-representation polytopes in low ambient dimension.

A body is an intersection of closed halfspaces ``{x : a.x <= b}``.  The
routines here target desk-scale experiments (dimension <= ~6, at most a few
hundred constraints): emptiness and boundedness are decided by linear
programs, vertices by enumerating d-subsets of constraints, with a
Qhull-backed fast path once the subset count gets large.

All values are immutable after construction and the functions are pure, so
everything in this module is safe to call concurrently.

Axis indices are 0-based throughout.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import HalfspaceIntersection, QhullError

from .errors import ContractViolation, UnboundedBodyError

# Feasibility tolerance for internal logic.  Test assertions use the looser
# 1e-7 so accumulated roundoff across a pipeline cannot flip a verdict.
DEFAULT_TOL = 1e-9

# Largest ambient dimension vertex enumeration will accept.
MAX_VERTEX_DIM = 6

# Above this many constraint subsets, vertices() tries the Qhull path first.
_SUBSET_BUDGET = 50_000


def as_point(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite float vector, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ContractViolation(f"expected a 1-d point, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ContractViolation(f"point has dimension {v.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ContractViolation("point has non-finite coordinates")
    return v


@dataclass(frozen=True)
class Halfspace:
    """The closed halfspace ``{x : normal . x <= offset}``."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        if n.ndim != 1 or n.shape[0] < 1:
            raise ContractViolation("halfspace normal must be a nonempty vector")
        if not np.all(np.isfinite(n)) or not np.isfinite(self.offset):
            raise ContractViolation("halfspace has non-finite data")
        if not np.any(n != 0.0):
            raise ContractViolation("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.normal.shape[0]

    def violation(self, x) -> float:
        """Signed slack ``normal . x - offset`` (positive means outside)."""
        return float(self.normal @ np.asarray(x, dtype=float)) - self.offset


class Polytope:
    """An intersection of halfspaces in an explicit ambient dimension.

    The feasible region may be empty or unbounded; operations that need a
    nonempty or bounded input say so and raise otherwise.  Constraints are
    stored as a stacked ``(m, dim)`` matrix ``A`` and offset vector ``b``
    meaning ``A x <= b``; a unit-row-normalized copy is kept for projection
    and distance work.  Instances are immutable by convention: no method
    mutates ``A`` or ``b`` after construction.
    """

    __slots__ = ("dim", "A", "b", "A_unit", "b_unit")

    def __init__(self, dim: int, halfspaces=()):
        if int(dim) < 1:
            raise ContractViolation("ambient dimension must be >= 1")
        hs = tuple(halfspaces)
        for h in hs:
            if h.dim != dim:
                raise ContractViolation(
                    f"constraint normal has length {h.dim}, expected {dim}")
        A = np.array([h.normal for h in hs], dtype=float).reshape(len(hs), dim)
        b = np.array([h.offset for h in hs], dtype=float)
        self._init_arrays(int(dim), A, b)

    def _init_arrays(self, dim: int, A: np.ndarray, b: np.ndarray):
        self.dim = dim
        self.A = A
        self.b = b
        if len(A):
            norms = np.linalg.norm(A, axis=1)
            self.A_unit = A / norms[:, None]
            self.b_unit = b / norms
        else:
            self.A_unit = A
            self.b_unit = b

    @classmethod
    def from_arrays(cls, A, b, *, validate: bool = True) -> "Polytope":
        """Build from stacked constraint arrays ``A x <= b``."""
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).reshape(-1)
        if A.ndim != 2 or A.shape[0] != b.shape[0]:
            raise ContractViolation("A must be (m, d) with matching b of length m")
        if validate:
            if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
                raise ContractViolation("constraints have non-finite data")
            if len(A) and not np.all(np.any(A != 0.0, axis=1)):
                raise ContractViolation("zero normal in constraint matrix")
        p = cls.__new__(cls)
        p._init_arrays(int(A.shape[1]), A.copy(), b.copy())
        return p

    @classmethod
    def _from_arrays_unsafe(cls, dim: int, A: np.ndarray, b: np.ndarray) -> "Polytope":
        # Internal fast path: caller guarantees well-formed, unaliased arrays.
        p = cls.__new__(cls)
        p._init_arrays(dim, A, b)
        return p

    @classmethod
    def box(cls, center, half_width: float) -> "Polytope":
        """Axis-aligned box ``|x_k - center_k| <= half_width``."""
        c = as_point(center)
        if half_width <= 0:
            raise ContractViolation("box half width must be positive")
        d = c.shape[0]
        A = np.vstack([np.eye(d), -np.eye(d)])
        b = np.concatenate([c + half_width, -(c - half_width)])
        return cls._from_arrays_unsafe(d, A, b)

    @classmethod
    def empty(cls, dim: int) -> "Polytope":
        """A canonical empty body (a contradictory pair of halfspaces)."""
        if int(dim) < 1:
            raise ContractViolation("ambient dimension must be >= 1")
        A = np.zeros((2, dim))
        A[0, 0] = 1.0
        A[1, 0] = -1.0
        b = np.array([-1.0, -1.0])
        return cls._from_arrays_unsafe(int(dim), A, b)

    @property
    def n_constraints(self) -> int:
        return self.A.shape[0]

    @property
    def halfspaces(self) -> tuple[Halfspace, ...]:
        return tuple(Halfspace(a, bi) for a, bi in zip(self.A, self.b))

    def with_extra(self, other) -> "Polytope":
        """Intersection with more constraints (a Polytope or halfspace list)."""
        if isinstance(other, Polytope):
            if other.dim != self.dim:
                raise ContractViolation("dimension mismatch in intersection")
            A2, b2 = other.A, other.b
        else:
            hs = list(other)
            for h in hs:
                if h.dim != self.dim:
                    raise ContractViolation("dimension mismatch in intersection")
            A2 = np.array([h.normal for h in hs]).reshape(len(hs), self.dim)
            b2 = np.array([h.offset for h in hs])
        return Polytope._from_arrays_unsafe(
            self.dim, np.vstack([self.A, A2]), np.concatenate([self.b, b2]))

    def __repr__(self):
        return f"Polytope(dim={self.dim}, m={self.n_constraints})"


@dataclass(frozen=True)
class Chart:
    """Coordinates for the hyperplane ``x_axis = value`` inside R^d.

    ``embed`` inserts the fixed coordinate, ``project`` deletes it; both are
    isometries between the hyperplane and R^(d-1).  ``origin`` records the
    phase center the slice was taken through (bookkeeping only).
    """

    axis: int
    value: float
    origin: np.ndarray

    def embed(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        return np.insert(y, self.axis, self.value)

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.delete(x, self.axis)


def contains(P: Polytope, x, tol: float = DEFAULT_TOL) -> bool:
    """Feasibility of a point: ``a.x <= b + tol * max(1, |b|)`` for every row."""
    if tol < 0:
        raise ContractViolation("tolerance must be nonnegative")
    v = as_point(x, P.dim)
    if P.n_constraints == 0:
        return True
    return bool(np.all(P.A @ v <= P.b + tol * np.maximum(1.0, np.abs(P.b))))


def _linprog(c, P: Polytope, extra_eq=None):
    A_eq = b_eq = None
    if extra_eq is not None:
        A_eq, b_eq = extra_eq
    return linprog(c, A_ub=P.A if P.n_constraints else None,
                   b_ub=P.b if P.n_constraints else None,
                   A_eq=A_eq, b_eq=b_eq, bounds=(None, None), method="highs")


def is_empty(P: Polytope, tol: float = DEFAULT_TOL) -> bool:
    """Decide emptiness by a feasibility LP on slightly relaxed offsets.

    The relaxation means borderline bodies (feasible only up to roundoff)
    count as nonempty, which is the safe direction for every caller here.
    """
    if P.n_constraints == 0:
        return False
    relaxed = Polytope._from_arrays_unsafe(
        P.dim, P.A, P.b + tol * np.maximum(1.0, np.abs(P.b)))
    res = _linprog(np.zeros(P.dim), relaxed)
    if res.status == 2:
        return True
    if res.status in (0, 3):
        return False
    raise RuntimeError(f"feasibility LP failed with status {res.status}")


def is_bounded(P: Polytope) -> bool:
    """True iff the recession cone is trivial (empty bodies count as bounded).

    Decided by 2d linear programs: max of +x_k and -x_k over P for each axis.
    """
    if P.n_constraints == 0:
        return False
    for k in range(P.dim):
        for sign in (1.0, -1.0):
            c = np.zeros(P.dim)
            c[k] = -sign  # linprog minimizes; we want max of sign * x_k
            res = _linprog(c, P)
            if res.status == 3:
                return False
            if res.status == 2:
                return True  # empty: vacuously bounded
            if res.status != 0:
                raise RuntimeError(f"boundedness LP failed with status {res.status}")
    return True


def bounding_box(P: Polytope) -> tuple[np.ndarray, np.ndarray]:
    """Tight axis-aligned bounds (lo, hi) of a bounded nonempty body via LPs."""
    lo = np.empty(P.dim)
    hi = np.empty(P.dim)
    for k in range(P.dim):
        for sign, out in ((1.0, hi), (-1.0, lo)):
            c = np.zeros(P.dim)
            c[k] = -sign
            res = _linprog(c, P)
            if res.status == 3:
                raise UnboundedBodyError("body is unbounded along an axis")
            if res.status == 2:
                raise UnboundedBodyError("bounding box of an empty body")
            out[k] = sign * -res.fun
    return lo, hi


def chebyshev_center(P: Polytope) -> tuple[np.ndarray, float]:
    """Center and radius of a largest inscribed ball (radius 0 if flat).

    Requires the inscribed-ball LP to be bounded, which holds whenever P is
    bounded; raises UnboundedBodyError otherwise.
    """
    if P.n_constraints == 0:
        raise UnboundedBodyError("chebyshev center of the whole space")
    m = P.n_constraints
    c = np.zeros(P.dim + 1)
    c[-1] = -1.0
    A = np.hstack([P.A_unit, np.ones((m, 1))])
    res = linprog(c, A_ub=A, b_ub=P.b_unit, bounds=(None, None), method="highs")
    if res.status == 2:
        raise UnboundedBodyError("chebyshev center of an empty body")
    if res.status != 0:
        raise UnboundedBodyError("inscribed-ball LP unbounded; body is unbounded")
    return res.x[:-1].copy(), float(res.x[-1])


def _axis_bounds_from_rows(P: Polytope) -> tuple[np.ndarray, np.ndarray] | None:
    """Recover (lo, hi) from axis-aligned constraint rows, if all are present.

    Clipped bodies carry explicit box rows, which lets vertices() prune
    without spending 2d LPs on a bounding box.
    """
    lo = np.full(P.dim, -np.inf)
    hi = np.full(P.dim, np.inf)
    for a, b in zip(P.A_unit, P.b_unit):
        nz = np.nonzero(a)[0]
        if nz.shape[0] != 1:
            continue
        k = nz[0]
        if a[k] > 0:
            hi[k] = min(hi[k], b / a[k])
        else:
            lo[k] = max(lo[k], b / a[k])
    if np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)):
        return lo, hi
    return None


def _dedup(points: np.ndarray, tol: float) -> np.ndarray:
    if len(points) <= 1:
        return points
    keep: list[int] = []
    for i in range(len(points)):
        p = points[i]
        if all(np.linalg.norm(p - points[j]) > tol for j in keep):
            keep.append(i)
    return points[keep]


def _enumerate_vertices(A: np.ndarray, b: np.ndarray, P: Polytope,
                        feas_tol: float) -> np.ndarray:
    """All feasible d-subset intersection points of the rows of (A, b)."""
    m, d = A.shape
    subsets = list(itertools.combinations(range(m), d))
    idx = np.array(subsets)
    mats = A[idx]                      # (N, d, d)
    rhs = b[idx][:, :, None]           # (N, d, 1)
    dets = np.abs(np.linalg.det(mats))
    ok = dets > 1e-12
    if not np.any(ok):
        return np.empty((0, d))
    sols = np.linalg.solve(mats[ok], rhs[ok])[:, :, 0]
    finite = np.all(np.isfinite(sols), axis=1)
    sols = sols[finite]
    if not len(sols):
        return np.empty((0, d))
    slack = P.b + feas_tol * np.maximum(1.0, np.abs(P.b))
    feas = np.all(sols @ P.A.T <= slack[None, :], axis=1)
    return sols[feas]


def _qhull_vertices(P: Polytope, interior: np.ndarray) -> np.ndarray:
    halfspaces = np.hstack([P.A_unit, -P.b_unit[:, None]])
    hs = HalfspaceIntersection(halfspaces, interior)
    return np.asarray(hs.intersections)


def _prune_redundant(P: Polytope) -> Polytope:
    """Drop constraints that cannot be active (one LP per constraint)."""
    keep = []
    for i in range(P.n_constraints):
        mask = np.ones(P.n_constraints, dtype=bool)
        mask[i] = False
        rest = Polytope._from_arrays_unsafe(P.dim, P.A[mask], P.b[mask])
        res = _linprog(-P.A[i], rest)
        if res.status == 0 and -res.fun <= P.b[i] + DEFAULT_TOL * max(1.0, abs(P.b[i])):
            continue  # redundant given the others
        keep.append(i)
    return Polytope._from_arrays_unsafe(P.dim, P.A[keep], P.b[keep])


def vertices(P: Polytope, *, max_dim: int = MAX_VERTEX_DIM,
             feas_tol: float = 1e-9) -> np.ndarray:
    """All vertices of a bounded body as an (n, d) array (empty body -> (0, d)).

    Method: enumerate d-subsets of constraints, solve each d x d system and
    keep the solutions feasible for every constraint, deduplicating within
    ``1e-9 * max(1, coordinate scale)`` so degenerate vertices (more than d
    tight constraints) are reported once.  When the subset count is large and
    the body has a strict interior, a Qhull halfspace-intersection fast path
    computes the same set; exhaustive enumeration (after LP-based redundancy
    pruning) remains the fallback for flat or small inputs.
    """
    if P.dim > max_dim:
        raise ContractViolation(
            f"vertex enumeration supports dimension <= {max_dim}, got {P.dim}")
    if P.n_constraints < P.dim or not is_bounded(P):
        if is_empty(P):
            return np.empty((0, P.dim))
        raise UnboundedBodyError("vertex enumeration requires a bounded body")

    work = P
    n_subsets = math.comb(work.n_constraints, work.dim)
    result = None
    if n_subsets > _SUBSET_BUDGET:
        try:
            center, radius = chebyshev_center(P)
            if radius > 1e-10:
                result = _qhull_vertices(P, center)
        except (UnboundedBodyError, QhullError):
            result = None
        if result is None:
            work = _prune_redundant(P)
            n_subsets = math.comb(work.n_constraints, work.dim)
            if n_subsets > 40 * _SUBSET_BUDGET:
                raise ContractViolation(
                    "too many constraints for exhaustive vertex enumeration")
    if result is None:
        result = _enumerate_vertices(work.A_unit, work.b_unit, P, feas_tol)
    if not len(result):
        return np.empty((0, P.dim))
    scale = max(1.0, float(np.max(np.abs(result))))
    return _dedup(result, 1e-9 * scale)


def slice_axis(P: Polytope, axis: int, value: float,
               origin=None) -> tuple[Polytope, Chart]:
    """Restrict to the hyperplane ``x_axis = value`` and drop that coordinate.

    Every constraint gets ``value`` substituted for coordinate ``axis``.
    Constraints whose normal becomes zero are dropped when satisfied; if any
    becomes unsatisfiable the result is the canonical empty body.  The Chart
    maps (d-1)-dimensional points back into R^d.
    """
    if not (0 <= axis < P.dim):
        raise ContractViolation(f"axis {axis} out of range for dimension {P.dim}")
    if P.dim < 2:
        raise ContractViolation("slicing a 1-dimensional body is not supported")
    org = as_point(origin, P.dim) if origin is not None else None
    if org is None:
        org = np.zeros(P.dim)
        org[axis] = value
    chart = Chart(axis=int(axis), value=float(value), origin=org)
    if P.n_constraints == 0:
        return Polytope._from_arrays_unsafe(
            P.dim - 1, np.empty((0, P.dim - 1)), np.empty(0)), chart
    newA = np.delete(P.A, axis, axis=1)
    newb = P.b - P.A[:, axis] * value
    live = np.any(newA != 0.0, axis=1)
    dead_unsat = ~live & (newb < -DEFAULT_TOL * np.maximum(1.0, np.abs(P.b)))
    if np.any(dead_unsat):
        return Polytope.empty(P.dim - 1), chart
    return Polytope._from_arrays_unsafe(P.dim - 1, newA[live], newb[live]), chart


def clip_box(P: Polytope, center, r: float) -> Polytope:
    """Intersect with the axis-aligned box ``|x_k - center_k| <= r``."""
    c = as_point(center, P.dim)
    if r <= 0:
        raise ContractViolation("clip radius must be positive")
    d = P.dim
    boxA = np.vstack([np.eye(d), -np.eye(d)])
    boxb = np.concatenate([c + r, -(c - r)])
    return Polytope._from_arrays_unsafe(
        d, np.vstack([P.A, boxA]), np.concatenate([P.b, boxb]))


def interval_bounds(P: Polytope) -> tuple[float, float]:
    """Closed-form (lo, hi) of a 1-dimensional body; lo > hi when empty."""
    if P.dim != 1:
        raise ContractViolation("interval_bounds requires a 1-dimensional body")
    lo, hi = -np.inf, np.inf
    for a, b in zip(P.A_unit[:, 0], P.b_unit):
        if a > 0:
            hi = min(hi, b / a)
        else:
            lo = max(lo, b / a)
    return lo, hi


def contains_body(P: Polytope, Q: Polytope, tol: float = DEFAULT_TOL) -> bool:
    """True iff Q is a subset of P up to ``tol``: max a.x over Q <= b + tol.

    Each check is one linear program.  Q must be bounded (otherwise some
    support LP is unbounded and the question is ill-posed for this method);
    an empty Q is a subset of everything.
    """
    if P.dim != Q.dim:
        raise ContractViolation("dimension mismatch between bodies")
    for a, b in zip(P.A, P.b):
        res = _linprog(-a, Q)
        if res.status == 2:
            return True  # Q empty
        if res.status == 3:
            raise UnboundedBodyError("contains_body requires a bounded inner body")
        if res.status != 0:
            raise RuntimeError(f"support LP failed with status {res.status}")
        if -res.fun > b + tol:
            return False
    return True
