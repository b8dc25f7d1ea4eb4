"""Distance to the Euclidean ball: Löwner ellipsoids, facets and spherical ratios."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .bodies import (
    HPolytope,
    SandwichCertificate,
    UnitBall,
    VPolytope,
    Scaled,
    contains,
)
from .errors import DegenerateBody, InvalidArgument, SizeLimitExceeded
from .sampling import sphere_samples

MVEE_TOL = 1e-7
MVEE_MAX_ITER = 100_000
FACET_TOL = 1e-10
MAX_FACET_DIM = 6
MAX_FACET_VERTICES = 64
MAX_SUBSETS = 3_000_000
_BATCH = 20_000


@dataclass(frozen=True)
class Ellipsoid:
    """``{x : (x - center)^T shape (x - center) <= 1}``."""

    center: np.ndarray
    shape: np.ndarray
    weights: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        c = np.array(self.center, dtype=float)
        A = np.array(self.shape, dtype=float, ndmin=2)
        if A.shape != (c.size, c.size):
            raise InvalidArgument("shape matrix does not match center")
        if np.abs(A - A.T).max() > 1e-12 * max(1.0, np.abs(A).max()):
            raise InvalidArgument("shape matrix is not symmetric")
        A = (A + A.T) / 2
        if np.linalg.eigvalsh(A).min() <= 0:
            raise InvalidArgument("shape matrix is not positive definite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "shape", A)

    @property
    def dim(self):
        return self.center.size

    @property
    def radii(self):
        return 1.0 / np.sqrt(np.linalg.eigvalsh(self.shape))

    def level(self, points):
        """``(x-c)^T A (x-c)`` per point; <= 1 inside."""
        y = np.atleast_2d(points) - self.center
        return np.einsum("ij,jk,ik->i", y, self.shape, y)

    def normalizing_map(self):
        """Symmetric ``M`` with ``M (E - c)`` the unit ball."""
        w, U = np.linalg.eigh(self.shape)
        return (U * np.sqrt(w)) @ U.T


def mvee(points, tol=MVEE_TOL, max_iter=MVEE_MAX_ITER):
    """Minimum-volume enclosing ellipsoid by Khachiyan's ascent with away steps.

    Starts from uniform weights, so the result is a deterministic function
    of the input order.  The final shape is rescaled so that every point is
    enclosed; the volume is then within ``(1 + tol)^d`` of optimal.
    """
    P = np.asarray(points, dtype=float)
    n, d = P.shape
    if not 0 < tol <= 0.1:
        raise InvalidArgument("tol must lie in (0, 0.1]")
    if n <= d or np.linalg.matrix_rank(P - P.mean(axis=0)) < d:
        raise DegenerateBody("points do not affinely span the space")
    Q = np.hstack([P, np.ones((n, 1))])
    u = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        X = Q.T @ (u[:, None] * Q)
        M = np.einsum("ij,ij->i", Q @ np.linalg.inv(X), Q)
        j = int(np.argmax(M))
        active = np.flatnonzero(u > 0)
        k = int(active[np.argmin(M[active])])
        grow = M[j] / (d + 1) - 1
        shrink = 1 - M[k] / (d + 1)
        if grow <= tol and shrink <= tol:
            break
        if grow > shrink:
            step = (M[j] - d - 1) / ((d + 1) * (M[j] - 1))
            u *= 1 - step
            u[j] += step
        else:
            # away step (Todd-Yildirim): move weight off the deepest support point
            step = min((d + 1 - M[k]) / ((d + 1) * (M[k] - 1)), u[k] / (1 - u[k]))
            u *= 1 + step
            u[k] -= step
            u[k] = max(u[k], 0.0)
    c = u @ P
    cov = (P - c).T @ (u[:, None] * (P - c))
    A = np.linalg.inv(cov) / d
    E = Ellipsoid(c, A)
    worst = E.level(P).max()
    return Ellipsoid(c, A / worst, u)


def facet_enum(P, tol=FACET_TOL):
    """Brute-force facets of a small polytope.

    Every ``d``-subset of vertices spanning a hyperplane that leaves all
    vertices on one side (up to ``tol``) yields a facet; duplicates from
    coplanar subsets are merged.
    """
    V = P.vertices
    n, d = V.shape
    if d > MAX_FACET_DIM or n > MAX_FACET_VERTICES:
        raise SizeLimitExceeded(f"facet enumeration limited to dim <= {MAX_FACET_DIM}, "
                                f"<= {MAX_FACET_VERTICES} vertices")
    if comb(n, d) > MAX_SUBSETS:
        raise SizeLimitExceeded(f"{comb(n, d)} vertex subsets exceed {MAX_SUBSETS}")
    if d == 1:
        return HPolytope([[1.0], [-1.0]], [V.max(), -V.min()], check=False)
    scale = max(1.0, float(np.abs(V).max()))
    normals, offsets = [], []
    subsets = itertools.combinations(range(n), d)
    while True:
        idx = np.array(list(itertools.islice(subsets, _BATCH)), dtype=int)
        if idx.size == 0:
            break
        pts = V[idx]
        edges = pts[:, 1:, :] - pts[:, :1, :]
        _, s, vt = np.linalg.svd(edges)
        ok = s[:, -1] > FACET_TOL * scale
        nrm = vt[ok, -1, :]
        b = np.einsum("ij,ij->i", nrm, pts[ok, 0, :])
        side = V @ nrm.T - b
        below = np.all(side <= tol * scale, axis=0)
        above = np.all(side >= -tol * scale, axis=0)
        nrm = np.where(above[:, None] & ~below[:, None], -nrm, nrm)
        b = np.where(above & ~below, -b, b)
        keep = below | above
        normals.append(nrm[keep])
        offsets.append(b[keep])
    N = np.vstack(normals)
    b = np.concatenate(offsets)
    key = np.round(np.column_stack([N, b]) / scale, 8)
    _, first = np.unique(key, axis=0, return_index=True)
    first.sort()
    return HPolytope(N[first], b[first], check=False)


def vertex_enum(H, tol=1e-9):
    """Brute-force vertices of a small bounded :class:`HPolytope`."""
    N, b = H.normals, H.offsets
    k, d = N.shape
    if comb(k, d) > MAX_SUBSETS:
        raise SizeLimitExceeded(f"{comb(k, d)} facet subsets exceed {MAX_SUBSETS}")
    scale = max(1.0, float(np.abs(b).max()))
    found = []
    subsets = itertools.combinations(range(k), d)
    while True:
        idx = np.array(list(itertools.islice(subsets, _BATCH)), dtype=int)
        if idx.size == 0:
            break
        A, rhs = N[idx], b[idx]
        det = np.linalg.det(A)
        ok = np.abs(det) > 1e-12
        if not ok.any():
            continue
        x = np.linalg.solve(A[ok], rhs[ok][..., None])[..., 0]
        feas = np.all(x @ N.T <= b + tol * scale, axis=1)
        found.append(x[feas])
    X = np.vstack(found) if found else np.empty((0, d))
    if len(X) == 0:
        return X
    key = np.round(X / scale, 9)
    _, first = np.unique(key, axis=0, return_index=True)
    return X[np.sort(first)]


def ball_distance(P, tol=MVEE_TOL):
    """Concentric ball sandwich of ``P`` about its Löwner ellipsoid.

    Maps the MVEE to the unit ball, measures the inradius ``r`` of the image
    about the origin from its facets, and returns ``(1/r, certificate)``
    with ``B_2 <= T(P - a) <= (1/r) B_2``.  This upper-bounds
    ``d(P, B_2)``; the center is not re-optimised.
    """
    if P.dim > MAX_FACET_DIM:
        raise SizeLimitExceeded(f"ball_distance supports dim <= {MAX_FACET_DIM}")
    E = mvee(P.vertices, tol=tol)
    M = E.normalizing_map()
    image = VPolytope((P.vertices - E.center) @ M.T)
    H = facet_enum(image)
    r = float((H.offsets / np.linalg.norm(H.normals, axis=1)).min())
    if r <= 0:
        raise DegenerateBody("Löwner center lies outside the polytope")
    lam = 1.0 / r
    cert = SandwichCertificate(M / r, E.center, max(lam, 1.0))
    return lam, cert


def verify_ball_certificate(P, cert, tol=1e-8):
    """Re-check ``B_2 <= T(P-a) <= lam B_2`` through :func:`contains`."""
    image = cert.apply(P)
    ball = UnitBall(P.dim)
    ok_in, m_in = contains(ball, image, tol)
    ok_out, m_out = contains(image, Scaled(ball, cert.ratio), tol)
    return ok_in and ok_out, m_in, m_out


def john_shrink_margin(P, E=None):
    """Containment margin of ``c + (E - c)/sqrt(d)`` inside ``P``."""
    E = mvee(P.vertices) if E is None else E
    image = VPolytope((P.vertices - E.center) @ E.normalizing_map().T)
    return contains(Scaled(UnitBall(P.dim), 1.0 / np.sqrt(P.dim)), image)[1]


def spherical_ratio(body, S, n_samples, seed):
    """``max h / min h`` of ``body``'s support over uniform unit directions in ``S``."""
    if n_samples < 100:
        raise InvalidArgument("spherical_ratio needs at least 100 samples")
    if S.ambient_dim != body.dim:
        raise InvalidArgument("subspace and body dimensions differ")
    u = S.lift(sphere_samples(S.dim, n_samples, seed))
    h = body.support(u)
    return max(float(h.max() / h.min()), 1.0)
