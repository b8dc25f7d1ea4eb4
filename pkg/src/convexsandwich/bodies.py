"""Convex bodies exposed through support-function and gauge oracles.

Every body implements the same small protocol:

``support(u)``
    ``h_K(u) = max <u, y>`` over ``y`` in ``K``.
``gauge(x)``
    Minkowski functional ``min {t >= 0 : x in tK}``; needs the origin in
    the interior of ``K``.
``extreme_points()``
    Finite array containing all extreme points, or ``None``.
``max_gauge_on_ball()``
    ``max gauge(x)`` over the Euclidean unit ball, i.e. the reciprocal of
    the inradius about the origin.

``support`` and ``gauge`` are vectorised: a 1-d argument gives a float, a
``(n, d)`` array gives ``n`` values.  All bodies are immutable.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from . import lp
from .errors import (
    DegenerateBody,
    DomainError,
    Infeasible,
    InvalidArgument,
    UnsupportedPair,
)

RANK_TOL = 1e-10
CONTAIN_TOL = 1e-9
INTERIOR_TOL = 1e-12


def _as_points(x, dim):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != dim:
        raise InvalidArgument(f"expected vectors of length {dim}, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidArgument("non-finite coordinates")
    return x


def _out(values, single):
    return float(values[0]) if single else values


class Body:
    dim: int

    def support(self, u):
        u = _as_points(u, self.dim)
        single = u.ndim == 1
        return _out(self._support(np.atleast_2d(u)), single)

    def gauge(self, x):
        x = _as_points(x, self.dim)
        single = x.ndim == 1
        return _out(self._gauge(np.atleast_2d(x)), single)

    def extreme_points(self):
        return None

    def max_gauge_on_ball(self):
        raise UnsupportedPair(f"{type(self).__name__} has no ball-inradius oracle")

    def as_polytope(self):
        ext = self.extreme_points()
        if ext is None:
            raise UnsupportedPair(f"{type(self).__name__} is not a polytope")
        return VPolytope(ext)

    def _support(self, u):
        raise NotImplementedError

    def _gauge(self, x):
        raise NotImplementedError


def _hull_facets(points):
    """Facet normals ``N`` and offsets ``b`` with ``conv(points) = {N x <= b}``.

    Normals have unit length; duplicate (coplanar triangulated) facets merged.
    """
    points = np.asarray(points, dtype=float)
    d = points.shape[1]
    if d == 1:
        return np.array([[1.0], [-1.0]]), np.array([points.max(), -points.min()])
    try:
        hull = ConvexHull(points)
    except QhullError as exc:
        raise DegenerateBody(str(exc)) from exc
    eq = hull.equations
    N, b = eq[:, :-1], -eq[:, -1]
    key = np.round(np.column_stack([N, b]) / max(1.0, np.abs(b).max()), 9)
    _, idx = np.unique(key, axis=0, return_index=True)
    idx.sort()
    return N[idx], b[idx]


class VPolytope(Body):
    """Convex hull of a finite vertex list, required to be full-dimensional."""

    def __init__(self, vertices, dim=None):
        V = np.array(vertices, dtype=float, ndmin=2)
        if V.size == 0:
            raise InvalidArgument("empty vertex list")
        if dim is not None and V.shape[1] != dim:
            raise InvalidArgument(f"vertices have length {V.shape[1]}, expected {dim}")
        if not np.all(np.isfinite(V)):
            raise InvalidArgument("non-finite vertex coordinates")
        self.dim = V.shape[1]
        centered = V - V.mean(axis=0)
        scale = max(1.0, float(np.abs(V).max()))
        if V.shape[0] <= self.dim or np.linalg.matrix_rank(centered, tol=RANK_TOL * scale) < self.dim:
            raise DegenerateBody("vertex set is not full-dimensional")
        V.setflags(write=False)
        self.vertices = V

    def __repr__(self):
        return f"VPolytope(dim={self.dim}, n_vertices={len(self.vertices)})"

    def extreme_points(self):
        return self.vertices

    @cached_property
    def facets(self):
        return _hull_facets(self.vertices)

    @cached_property
    def contains_origin(self):
        _, b = self.facets
        return bool(b.min() > INTERIOR_TOL * max(1.0, float(np.abs(self.vertices).max())))

    def _require_origin(self):
        if not self.contains_origin:
            raise DomainError("origin is not an interior point of the polytope")

    def _support(self, u):
        return (u @ self.vertices.T).max(axis=1)

    def _gauge(self, x):
        self._require_origin()
        N, b = self.facets
        return np.maximum((x @ N.T / b).max(axis=1), 0.0)

    def gauge_lp(self, x):
        """Gauge by the weight program ``min sum(w) : V^T w = x, w >= 0``."""
        self._require_origin()
        x = _as_points(x, self.dim)
        if not np.any(x):
            return 0.0
        _, value = lp.solve(np.ones(len(self.vertices)), self.vertices.T, x)
        return value

    def max_gauge_on_ball(self):
        self._require_origin()
        N, b = self.facets
        return float((np.linalg.norm(N, axis=1) / b).max())

    def translate(self, t):
        return VPolytope(self.vertices + np.asarray(t, dtype=float))

    def linear_image(self, T):
        return VPolytope(self.vertices @ np.asarray(T, dtype=float).T)

    def to_json(self):
        return {"dim": self.dim, "vertices": self.vertices.tolist()}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(obj["vertices"], dim=obj["dim"])


class HPolytope(Body):
    """Intersection of halfspaces ``<normal_i, x> <= offset_i``."""

    def __init__(self, normals, offsets, check=True):
        N = np.array(normals, dtype=float, ndmin=2)
        b = np.array(offsets, dtype=float).ravel()
        if N.shape[0] != b.shape[0]:
            raise InvalidArgument("one offset per facet normal required")
        if not (np.all(np.isfinite(N)) and np.all(np.isfinite(b))):
            raise InvalidArgument("non-finite facet data")
        N.setflags(write=False)
        b.setflags(write=False)
        self.normals, self.offsets = N, b
        self.dim = N.shape[1]
        if check and not self.is_bounded():
            raise InvalidArgument("halfspace system is unbounded")

    def __repr__(self):
        return f"HPolytope(dim={self.dim}, n_facets={len(self.offsets)})"

    @property
    def facets(self):
        return self.normals, self.offsets

    def _support_one(self, u):
        # max <u, x>, x = p - q free, slack s: [N, -N, I] [p; q; s] = b
        N, b = self.normals, self.offsets
        k, d = N.shape
        A = np.hstack([N, -N, np.eye(k)])
        c = np.concatenate([-u, u, np.zeros(k)])
        try:
            _, value = lp.solve(c, A, b)
        except lp.Unbounded:
            return np.inf
        except Infeasible as exc:
            raise DomainError("empty halfspace system") from exc
        return -value

    def _support(self, u):
        return np.array([self._support_one(row) for row in u])

    def is_bounded(self):
        axes = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
        return bool(np.all(np.isfinite(self._support(axes))))

    def _require_origin(self):
        if self.offsets.min() <= INTERIOR_TOL:
            raise DomainError("origin is not an interior point")

    def _gauge(self, x):
        self._require_origin()
        return np.maximum((x @ self.normals.T / self.offsets).max(axis=1), 0.0)

    def max_gauge_on_ball(self):
        self._require_origin()
        return float((np.linalg.norm(self.normals, axis=1) / self.offsets).max())

    def slack(self, x):
        """``offset - <normal, x>`` per facet, normalised by the normal length."""
        x = np.atleast_2d(_as_points(x, self.dim))
        norms = np.linalg.norm(self.normals, axis=1)
        return (self.offsets - x @ self.normals.T) / norms


class UnitBall(Body):
    def __init__(self, dim):
        self.dim = int(dim)

    def __repr__(self):
        return f"UnitBall({self.dim})"

    def _support(self, u):
        return np.linalg.norm(u, axis=1)

    _gauge = _support

    def max_gauge_on_ball(self):
        return 1.0


class CrossPolytope(Body):
    """Unit ball of the l1 norm."""

    def __init__(self, dim):
        self.dim = int(dim)

    def __repr__(self):
        return f"CrossPolytope({self.dim})"

    def _support(self, u):
        return np.abs(u).max(axis=1)

    def _gauge(self, x):
        return np.abs(x).sum(axis=1)

    def extreme_points(self):
        eye = np.eye(self.dim)
        return np.vstack([eye, -eye])

    def max_gauge_on_ball(self):
        return float(np.sqrt(self.dim))


class Cube(Body):
    """Unit ball of the l-infinity norm."""

    MAX_ENUM_DIM = 16

    def __init__(self, dim):
        self.dim = int(dim)

    def __repr__(self):
        return f"Cube({self.dim})"

    def _support(self, u):
        return np.abs(u).sum(axis=1)

    def _gauge(self, x):
        return np.abs(x).max(axis=1)

    def extreme_points(self):
        if self.dim > self.MAX_ENUM_DIM:
            raise UnsupportedPair(f"refusing to enumerate 2^{self.dim} cube vertices")
        return np.array(list(itertools.product((-1.0, 1.0), repeat=self.dim)))

    def max_gauge_on_ball(self):
        return 1.0


class Scaled(Body):
    def __init__(self, body, factor):
        if not factor > 0:
            raise InvalidArgument("scale factor must be positive")
        self.body, self.factor, self.dim = body, float(factor), body.dim

    def __repr__(self):
        return f"Scaled({self.body!r}, {self.factor})"

    def _support(self, u):
        return self.factor * self.body._support(u)

    def _gauge(self, x):
        return self.body._gauge(x) / self.factor

    def extreme_points(self):
        ext = self.body.extreme_points()
        return None if ext is None else self.factor * ext

    def max_gauge_on_ball(self):
        return self.body.max_gauge_on_ball() / self.factor


class AffineImage(Body):
    """The body ``{T x + a : x in body}`` for invertible ``T``."""

    def __init__(self, body, T, a=None):
        T = np.array(T, dtype=float, ndmin=2)
        if T.shape != (body.dim, body.dim):
            raise InvalidArgument("map must be square with the body's dimension")
        if not np.isfinite(np.linalg.cond(T)):
            raise InvalidArgument("map is singular")
        a = np.zeros(body.dim) if a is None else _as_points(a, body.dim)
        self.body, self.map, self.shift, self.dim = body, T, a, body.dim
        self._inv = np.linalg.inv(T)

    def __repr__(self):
        return f"AffineImage({self.body!r})"

    def _support(self, u):
        return self.body._support(u @ self.map) + u @ self.shift

    def extreme_points(self):
        ext = self.body.extreme_points()
        return None if ext is None else ext @ self.map.T + self.shift

    @cached_property
    def _polytope(self):
        return self.as_polytope()

    def _gauge(self, x):
        if not np.any(self.shift):
            return self.body._gauge(x @ self._inv.T)
        if self.extreme_points() is None:
            raise UnsupportedPair("gauge of a translated non-polytope")
        return self._polytope._gauge(x)

    def max_gauge_on_ball(self):
        if isinstance(self.body, UnitBall) and not np.any(self.shift):
            return float(np.linalg.norm(self._inv, 2))
        if self.extreme_points() is None:
            raise UnsupportedPair("ball inradius of a translated non-polytope")
        return self._polytope.max_gauge_on_ball()


class DoubleCone(Body):
    """``conv(T1 + {+-apex})`` with ``T1`` symmetric in the first ``m-1`` coordinates.

    ``base`` is a full-dimensional :class:`VPolytope` in ``R^(m-1)``, embedded
    as the slice ``x_m = 0``; ``apex`` is any vector with ``apex[-1] != 0``.
    Writing ``x = w + s * apex`` with ``w`` in the slice, the gauge is
    ``|s| + gauge_base(w)``.
    """

    def __init__(self, base, apex):
        if not isinstance(base, VPolytope):
            base = VPolytope(base)
        apex = np.array(apex, dtype=float)
        if apex.shape != (base.dim + 1,):
            raise InvalidArgument("apex must live in R^(base.dim + 1)")
        if abs(apex[-1]) <= RANK_TOL * max(1.0, float(np.abs(apex).max())):
            raise InvalidArgument("apex lies in the span of the base")
        V = base.vertices
        dist = np.linalg.norm(V[:, None, :] + V[None, :, :], axis=2).min(axis=1)
        if dist.max() > 1e-12 * max(1.0, float(np.abs(V).max())):
            raise InvalidArgument("base vertex set is not closed under negation")
        apex.setflags(write=False)
        self.base, self.apex, self.dim = base, apex, base.dim + 1

    def __repr__(self):
        return f"DoubleCone(base={self.base!r}, apex={self.apex.tolist()})"

    def split(self, x):
        """Height ``s`` and slice part ``w`` of ``x = w + s * apex``."""
        s = x[..., -1] / self.apex[-1]
        w = x[..., :-1] - s[..., None] * self.apex[:-1]
        return s, w

    def _support(self, u):
        return np.maximum(self.base._support(u[:, :-1]), np.abs(u @ self.apex))

    def _gauge(self, x):
        s, w = self.split(x)
        return np.abs(s) + self.base._gauge(w)

    def extreme_points(self):
        V = self.base.vertices
        lifted = np.hstack([V, np.zeros((len(V), 1))])
        return np.vstack([lifted, self.apex, -self.apex])

    @cached_property
    def _polytope(self):
        return VPolytope(self.extreme_points())

    @property
    def facets(self):
        return self._polytope.facets

    def max_gauge_on_ball(self):
        return self._polytope.max_gauge_on_ball()

    def scaled(self, t):
        return DoubleCone(VPolytope(t * self.base.vertices), t * self.apex)


def b1_cone(m):
    """The cross-polytope ``B_1^m`` as a double cone over ``B_1^(m-1)`` with apex ``e_m``."""
    if m < 2:
        raise InvalidArgument("double cones need m >= 2")
    eye = np.eye(m - 1)
    apex = np.zeros(m)
    apex[-1] = 1.0
    return DoubleCone(VPolytope(np.vstack([eye, -eye])), apex)


@dataclass(frozen=True)
class Subspace:
    """Linear subspace given by an ``m x d`` matrix with orthonormal rows."""

    basis: np.ndarray

    def __post_init__(self):
        B = np.array(self.basis, dtype=float, ndmin=2)
        m, d = B.shape
        if not 1 <= m <= d:
            raise InvalidArgument("basis must be m x d with 1 <= m <= d")
        if np.abs(B @ B.T - np.eye(m)).max() > 1e-10:
            raise InvalidArgument("basis rows are not orthonormal")
        B.setflags(write=False)
        object.__setattr__(self, "basis", B)

    @property
    def dim(self):
        return self.basis.shape[0]

    @property
    def ambient_dim(self):
        return self.basis.shape[1]

    @classmethod
    def coordinate(cls, d, axes):
        return cls(np.eye(d)[list(axes)])

    def lift(self, y):
        """Subspace coordinates to ambient vectors."""
        return np.asarray(y, dtype=float) @ self.basis

    def coords(self, x):
        return np.asarray(x, dtype=float) @ self.basis.T


@dataclass(frozen=True)
class SandwichCertificate:
    """``(T, a, ratio)`` witnessing ``R <= T(K - a) <= ratio * R``."""

    map: np.ndarray
    center: np.ndarray
    ratio: float
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        T = np.array(self.map, dtype=float, ndmin=2)
        if not np.isfinite(np.linalg.cond(T)):
            raise InvalidArgument("certificate map is singular")
        if not self.ratio >= 1 - 1e-12:
            raise InvalidArgument("sandwich ratio below 1")
        object.__setattr__(self, "map", T)
        object.__setattr__(self, "center", np.array(self.center, dtype=float))

    def apply(self, K):
        """The normalised body ``T(K - a)`` as a polytope."""
        return VPolytope((K.extreme_points() - self.center) @ self.map.T)

    def to_json(self):
        return {"map": self.map.tolist(), "center": self.center.tolist(), "ratio": self.ratio}


def _direction(u, dim):
    u = _as_points(u, dim)
    if np.any(np.linalg.norm(np.atleast_2d(u), axis=1) == 0):
        raise InvalidArgument("support direction must be nonzero")
    return u


def support(body, u):
    """Support function ``h_body(u)``; ``u`` must be nonzero."""
    return body.support(_direction(u, body.dim))


def gauge(body, x):
    """Minkowski functional of ``body`` at ``x``."""
    return body.gauge(x)


def polar(P):
    """Polar of a polytope with the origin in its interior.

    Each vertex ``v`` of ``P`` becomes the facet ``<v, x> <= 1``.
    """
    if not P.contains_origin:
        raise DomainError("polar of a body without the origin in its interior is unbounded")
    V = P.vertices
    return HPolytope(V, np.ones(len(V)), check=False)


def difference_body(P):
    """``P - P`` as a polytope on the extreme pairwise differences."""
    V = P.vertices
    diffs = (V[:, None, :] - V[None, :, :]).reshape(-1, P.dim)
    diffs = np.unique(diffs, axis=0)
    if P.dim == 1:
        ext = np.array([[diffs.max()], [diffs.min()]])
    else:
        ext = diffs[ConvexHull(diffs).vertices]
    return VPolytope(ext[np.lexsort(ext.T[::-1])])


def project(P, S):
    """Orthogonal projection of ``P`` onto ``S``, in subspace coordinates."""
    if S.ambient_dim != P.dim:
        raise InvalidArgument(f"subspace lives in R^{S.ambient_dim}, body in R^{P.dim}")
    return VPolytope(S.coords(P.vertices))


def _ball_radius(body):
    """``r`` if ``body`` is ``r * B_2`` about the origin, else ``None``."""
    r = 1.0
    while isinstance(body, Scaled):
        r *= body.factor
        body = body.body
    return r if isinstance(body, UnitBall) else None


def containment_margin(inner, outer):
    """``1 - max gauge_outer`` over ``inner``; positive means strict containment."""
    if inner.dim != outer.dim:
        raise InvalidArgument("bodies live in different dimensions")
    ext = inner.extreme_points()
    if ext is not None:
        return float(1.0 - outer.gauge(ext).max())
    r = _ball_radius(inner)
    if r is not None:
        return float(1.0 - r * outer.max_gauge_on_ball())
    raise UnsupportedPair(f"cannot decide {type(inner).__name__} <= {type(outer).__name__}")


def contains(inner, outer, tol=CONTAIN_TOL):
    """Exact decision of ``inner <= outer`` through extreme points.

    Returns ``(decision, margin)`` with the margin in gauge units of
    ``outer``.  A ball inner body is handled through the inradius of the
    outer body (facet data); other inner bodies without finitely many
    extreme points raise :class:`UnsupportedPair`.
    """
    margin = containment_margin(inner, outer)
    return margin >= -tol, margin


def sandwich_scales(K, R, T=None, a=None):
    """``(inner, outer)`` scales with ``inner*R <= T(K-a) <= outer*R``, both tight."""
    ext = K.extreme_points()
    if ext is None:
        raise UnsupportedPair("K needs an extreme-point enumeration")
    d = K.dim
    T = np.eye(d) if T is None else np.array(T, dtype=float, ndmin=2)
    a = np.zeros(d) if a is None else _as_points(a, d)
    if T.shape != (d, d) or not np.isfinite(np.linalg.cond(T)) or abs(np.linalg.det(T)) == 0:
        raise InvalidArgument("map must be an invertible d x d matrix")
    image = (ext - a) @ T.T
    outer = float(R.gauge(image).max())
    try:
        body = VPolytope(image)
        r_ext = R.extreme_points()
        if r_ext is not None:
            worst = float(body.gauge(r_ext).max())
        elif _ball_radius(R) is not None:
            worst = _ball_radius(R) * body.max_gauge_on_ball()
        else:
            raise UnsupportedPair("R needs extreme points or to be a ball")
    except (DomainError, DegenerateBody):
        return 0.0, outer
    inner = 1.0 / worst if worst > 0 else np.inf
    return inner, outer


def sandwich_ratio(K, R, T=None, a=None):
    """Smallest ``lam`` with ``R <= s T(K - a) <= lam R`` for some ``s > 0``.

    ``+inf`` when ``T(K - a)`` does not contain the origin in its interior.
    """
    inner, outer = sandwich_scales(K, R, T, a)
    if inner <= 0:
        return np.inf
    return max(outer / inner, 1.0)
