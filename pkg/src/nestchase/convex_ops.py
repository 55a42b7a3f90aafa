"""Convex-analytic workhorses: projection, enclosing balls and ellipsoids,
centroids.

``project`` runs Dykstra's cyclic projection over the halfspace list (the
inner loop is numba-compiled; a pure-python twin is used when numba is
unavailable).  ``min_enclosing_ball`` is Welzl's move-to-front recursion.
``min_volume_enclosing_ellipsoid`` is Khachiyan-style barycentric coordinate
ascent with Wolfe-Atwood away steps; inputs are centered and axis-rescaled
first, which the method's exact affine equivariance makes free.  ``centroid``
triangulates the vertex hull exactly for d <= 3 and falls back to seeded
rejection sampling above that.

Pure functions over immutable inputs; safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import (ContractViolation, ConvergenceError, DegenerateBodyError,
                     EmptyBodyError)
from .geometry import DEFAULT_TOL, Polytope, as_point, contains, is_empty, vertices

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None


def _dykstra_impl(A, b, v, tol, max_cycles):
    """Cyclic Dykstra over halfspaces {a.x <= b} with unit-norm rows.

    Returns (x, cycles); cycles == -1 means the cap was hit.  Stops when the
    iterate moves less than ``tol`` over a full cycle.
    """
    m, d = A.shape
    x = v.copy()
    corr = np.zeros((m, d))
    x_prev = np.empty(d)
    for cycle in range(max_cycles):
        for j in range(d):
            x_prev[j] = x[j]
        for i in range(m):
            viol = -b[i]
            for j in range(d):
                viol += A[i, j] * (x[j] + corr[i, j])
            if viol > 0.0:
                for j in range(d):
                    z = x[j] + corr[i, j]
                    xn = z - viol * A[i, j]
                    corr[i, j] = z - xn
                    x[j] = xn
            else:
                for j in range(d):
                    x[j] = x[j] + corr[i, j]
                    corr[i, j] = 0.0
        move = 0.0
        for j in range(d):
            move += (x[j] - x_prev[j]) ** 2
        if move ** 0.5 < tol:
            return x, cycle + 1
    return x, -1


if _njit is not None:
    _dykstra = _njit(cache=True)(_dykstra_impl)
else:  # pragma: no cover
    _dykstra = _dykstra_impl


def project(P: Polytope, v, *, move_tol: float = 1e-10,
            max_cycles: int = 100_000, verify: bool = True) -> np.ndarray:
    """Euclidean projection of ``v`` onto a nonempty polytope.

    Dykstra's cyclic projection over the halfspace list, run until successive
    iterates move less than ``move_tol * max(1, ||v||)`` within a cycle cap.
    With ``verify`` (the default) an infeasible-looking input is first checked
    for emptiness by LP so the error reported is the right one; callers that
    already trust their stream can pass ``verify=False`` and still get the
    cheap post-hoc feasibility check on the result.
    """
    x0 = as_point(v, P.dim)
    if contains(P, x0, DEFAULT_TOL):
        return x0.copy()
    if P.n_constraints == 0:
        return x0.copy()
    if verify and is_empty(P):
        raise EmptyBodyError("projection onto an empty body")
    tol = move_tol * max(1.0, float(np.linalg.norm(x0)))
    x, cycles = _dykstra(P.A_unit, P.b_unit, x0, tol, max_cycles)
    if cycles < 0:
        gap = float(np.max(P.A_unit @ x - P.b_unit))
        raise ConvergenceError(
            f"projection hit the {max_cycles}-cycle cap (gap {gap:.3e})",
            last_iterate=x, gap=gap)
    if not contains(P, x, 1e-7):
        if is_empty(P):
            raise EmptyBodyError("projection onto an empty body")
        gap = float(np.max(P.A_unit @ x - P.b_unit))
        raise ConvergenceError(
            f"projection converged to an infeasible point (gap {gap:.3e})",
            last_iterate=x, gap=gap)
    return x


def distance_to(P: Polytope, v, **kwargs) -> float:
    """Euclidean distance from ``v`` to a nonempty polytope."""
    x0 = as_point(v, P.dim)
    return float(np.linalg.norm(project(P, x0, **kwargs) - x0))


@dataclass(frozen=True)
class Ball:
    """Closed Euclidean ball; ``support`` are the points pinning a minimum ball."""

    center: np.ndarray
    radius: float
    support: tuple = field(default=(), compare=False)

    def __post_init__(self):
        c = as_point(self.center)
        if not np.isfinite(self.radius) or self.radius < 0:
            raise ContractViolation("ball radius must be finite and nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    def contains_point(self, x, slack: float = 0.0) -> bool:
        return float(np.linalg.norm(as_point(x) - self.center)) <= self.radius + slack


def _circumball(points: list[np.ndarray]) -> tuple[np.ndarray, float] | None:
    """Smallest ball with all given points on its boundary, None if degenerate."""
    p0 = points[0]
    if len(points) == 1:
        return p0.copy(), 0.0
    Q = np.array([p - p0 for p in points[1:]])
    rhs = 0.5 * np.einsum("ij,ij->i", Q, Q)
    G = Q @ Q.T
    try:
        lam = np.linalg.solve(G, rhs)
    except np.linalg.LinAlgError:
        return None
    center = p0 + Q.T @ lam
    return center, float(np.linalg.norm(center - p0))


def min_enclosing_ball(points) -> Ball:
    """Smallest ball containing all points (Welzl move-to-front recursion).

    The returned center is a convex combination of at most d+1 support
    points, hence lies in the convex hull of the input.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ContractViolation("min_enclosing_ball needs a nonempty (n, d) array")
    if not np.all(np.isfinite(pts)):
        raise ContractViolation("points contain non-finite values")
    pts = np.unique(pts, axis=0)  # exact duplicates confuse the recursion
    n, d = pts.shape
    order = list(np.random.default_rng(0x5EB).permutation(n))

    def mb(n_active: int, boundary: list[int]):
        ball = _circumball([pts[i] for i in boundary]) if boundary else None
        if len(boundary) == d + 1:
            return ball
        pos = 0
        while pos < n_active:
            i = order[pos]
            p = pts[i]
            outside = ball is None
            if not outside:
                c, r = ball
                outside = np.linalg.norm(p - c) > r * (1 + 1e-12) + 1e-14
            if outside:
                grown = mb(pos, boundary + [i])
                if grown is not None:
                    ball = grown
                    order.insert(0, order.pop(pos))
            pos += 1
        return ball

    ball = mb(n, [])
    if ball is None:  # all points coincide after degenerate solves
        return Ball(pts[0], 0.0, support=(pts[0].copy(),))
    center, radius = ball
    # cover roundoff: report the radius that actually encloses every input
    radius = max(radius, float(np.max(np.linalg.norm(pts - center, axis=1))))
    dist = np.linalg.norm(pts - center, axis=1)
    on_boundary = np.nonzero(dist >= radius - 1e-9 * max(1.0, radius))[0]
    support = tuple(pts[i].copy() for i in on_boundary[: d + 2])
    return Ball(center, radius, support=support)


@dataclass(frozen=True)
class Ellipsoid:
    """The set ``{x : (x - center)^T shape (x - center) <= 1}``."""

    center: np.ndarray
    shape: np.ndarray

    def __post_init__(self):
        c = as_point(self.center)
        M = np.asarray(self.shape, dtype=float)
        if M.shape != (c.shape[0], c.shape[0]):
            raise ContractViolation("shape matrix must be d x d")
        if np.max(np.abs(M - M.T)) > 1e-12 * max(1.0, np.max(np.abs(M))):
            raise ContractViolation("shape matrix must be symmetric")
        M = 0.5 * (M + M.T)
        if np.any(np.linalg.eigvalsh(M) <= 0):
            raise ContractViolation("shape matrix must be positive definite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", M)

    def residual(self, x) -> float:
        diff = as_point(x) - self.center
        return float(diff @ self.shape @ diff)


def min_volume_enclosing_ellipsoid(points, eps: float = 1e-7,
                                   max_iter: int = 100_000) -> Ellipsoid:
    """(1+eps)-approximate minimum-volume enclosing ellipsoid of a point set.

    Khachiyan barycentric coordinate ascent with Wolfe-Atwood away steps,
    stopped when every point satisfies the ellipsoid inequality within
    ``1 + eps``.  The iteration is exactly equivariant under affine maps, so
    inputs are centered and axis-rescaled first to keep the linear algebra
    well conditioned even for very flat point sets.
    """
    if eps <= 0:
        raise ContractViolation("eps must be positive")
    if max_iter < 1:
        raise ContractViolation("max_iter must be at least 1")
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ContractViolation("expected a nonempty (n, d) point array")
    n, d = pts.shape
    if n < d + 1:
        raise DegenerateBodyError("need at least d+1 points to span R^d")
    mu = pts.mean(axis=0)
    span = np.max(np.abs(pts - mu), axis=0)
    if np.any(span <= 1e-14 * max(1.0, float(np.max(span)))):
        raise DegenerateBodyError("points lie in an axis-aligned hyperplane")
    work = (pts - mu) / span
    if np.linalg.matrix_rank(work, tol=1e-10) < d:
        raise DegenerateBodyError("points do not affinely span R^d")

    Q = np.hstack([work, np.ones((n, 1))])      # (n, d+1)
    u = np.full(n, 1.0 / n)
    target = d + 1 + eps * d                     # residual <= 1 + eps
    for _ in range(max_iter):
        X = Q.T @ (Q * u[:, None])
        try:
            w = np.einsum("ij,ij->i", Q, np.linalg.solve(X, Q.T).T)
        except np.linalg.LinAlgError:
            raise DegenerateBodyError("weight matrix became singular")
        j_plus = int(np.argmax(w))
        kappa = w[j_plus]
        if kappa <= target:
            break
        active = u > 0
        j_minus = int(np.nonzero(active)[0][np.argmin(w[active])])
        w_minus = w[j_minus]
        take_away = (kappa - (d + 1) < (d + 1) - w_minus
                     and u[j_minus] < 1.0 - 1e-12)
        if take_away:
            # move weight off the worst interior point; the unconstrained
            # optimum only applies while w > 1, otherwise drop the point
            drop = -u[j_minus] / (1.0 - u[j_minus])
            if w_minus > 1.0 + 1e-15:
                step = max((w_minus - d - 1) / ((d + 1) * (w_minus - 1)), drop)
            else:
                step = drop
            j = j_minus
        else:
            step = (kappa - d - 1) / ((d + 1) * (kappa - 1))
            j = j_plus
        u *= 1.0 - step
        u[j] += step
        np.clip(u, 0.0, None, out=u)
    else:
        raise ConvergenceError(
            f"ellipsoid fit hit the {max_iter}-iteration cap",
            last_iterate=u, gap=float(kappa - (d + 1)))

    c_w = work.T @ u
    sigma = work.T @ (work * u[:, None]) - np.outer(c_w, c_w)
    M_w = np.linalg.inv(sigma) / d
    M_w = 0.5 * (M_w + M_w.T)
    D = np.diag(1.0 / span)
    M = D @ M_w @ D
    return Ellipsoid(center=mu + span * c_w, shape=0.5 * (M + M.T))


def _exact_centroid_2d(verts: np.ndarray) -> np.ndarray:
    mean = verts.mean(axis=0)
    ang = np.arctan2(verts[:, 1] - mean[1], verts[:, 0] - mean[0])
    ring = verts[np.argsort(ang)]
    total = 0.0
    acc = np.zeros(2)
    for i in range(1, len(ring) - 1):
        a, b, c = ring[0], ring[i], ring[i + 1]
        area = 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
        total += area
        acc += area * (a + b + c) / 3.0
    if abs(total) <= 1e-300:
        raise DegenerateBodyError("body has zero area")
    return acc / total


def _exact_centroid_3d(verts: np.ndarray) -> np.ndarray:
    try:
        hull = ConvexHull(verts)
    except QhullError as exc:
        raise DegenerateBodyError("body is not full-dimensional") from exc
    apex = verts.mean(axis=0)
    total = 0.0
    acc = np.zeros(3)
    for simplex in hull.simplices:
        a, b, c = verts[simplex]
        vol = abs(np.linalg.det(np.stack([a - apex, b - apex, c - apex]))) / 6.0
        total += vol
        acc += vol * (apex + a + b + c) / 4.0
    if total <= 1e-300:
        raise DegenerateBodyError("body has zero volume")
    return acc / total


def centroid(P: Polytope, *, mode: str = "auto", samples: int = 200_000,
             seed: int = 0, with_stderr: bool = False):
    """Center of mass of a bounded full-dimensional polytope.

    Exact mode (d <= 3) fan-triangulates the vertex hull and takes the
    volume-weighted average of simplex centroids.  Monte Carlo mode does
    rejection sampling inside the vertex bounding box with an explicit seed;
    request ``with_stderr=True`` to also get the per-coordinate standard
    error of the estimate.  ``mode`` is "exact", "mc", or "auto" (exact up to
    d = 3, Monte Carlo above).
    """
    if mode not in ("auto", "exact", "mc"):
        raise ContractViolation(f"unknown centroid mode {mode!r}")
    verts = vertices(P)
    if len(verts) < P.dim + 1:
        raise DegenerateBodyError("body is empty or lower-dimensional")
    use_exact = P.dim <= 3 if mode == "auto" else (mode == "exact")
    if use_exact:
        if P.dim > 3:
            raise ContractViolation("exact centroid mode supports d <= 3")
        if P.dim == 1:
            c = np.array([0.5 * (verts.min() + verts.max())])
        elif P.dim == 2:
            c = _exact_centroid_2d(verts)
        else:
            c = _exact_centroid_3d(verts)
        return (c, np.zeros(P.dim)) if with_stderr else c

    lo = verts.min(axis=0)
    hi = verts.max(axis=0)
    if np.any(hi - lo <= 1e-14 * np.maximum(1.0, np.abs(hi))):
        raise DegenerateBodyError("body is lower-dimensional")
    rng = np.random.default_rng(seed)
    draws = rng.uniform(lo, hi, size=(samples, P.dim))
    slack = P.b + DEFAULT_TOL * np.maximum(1.0, np.abs(P.b))
    accepted = draws[np.all(draws @ P.A.T <= slack[None, :], axis=1)]
    if len(accepted) < 10:
        raise DegenerateBodyError("rejection sampling accepted too few points")
    c = accepted.mean(axis=0)
    if with_stderr:
        stderr = accepted.std(axis=0, ddof=1) / np.sqrt(len(accepted))
        return c, stderr
    return c
