"""Named bodies and planted test constructions."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .bodies import Cube, CrossPolytope, Subspace, VPolytope, b1_cone
from .errors import InvalidArgument


def regular_polygon(k, radius=1.0, phase=0.0):
    """Regular ``k``-gon inscribed in the circle of the given radius."""
    t = phase + 2 * np.pi * np.arange(k) / k
    return VPolytope(radius * np.column_stack([np.cos(t), np.sin(t)]))


def centered_simplex(d):
    """``conv{0, e_1, ..., e_d}`` translated to have its centroid at the origin."""
    V = np.vstack([np.zeros(d), np.eye(d)])
    return VPolytope(V - V.mean(axis=0))


def parse_body(spec):
    """Body from a built-in name (``cube:3``, ``ball-ngon:64``...) or a JSON file path.

    ``cube`` and ``crosspolytope`` give closed-form bodies, ``b1cone`` a
    :class:`DoubleCone`; everything else is a :class:`VPolytope`.
    """
    name, _, arg = spec.partition(":")
    builders = {
        "ball-ngon": regular_polygon,
        "cube": Cube,
        "crosspolytope": CrossPolytope,
        "simplex": centered_simplex,
        "b1cone": b1_cone,
    }
    if name in builders and arg:
        try:
            n = int(arg)
        except ValueError:
            raise InvalidArgument(f"bad size in body spec {spec!r}") from None
        return builders[name](n)
    path = Path(spec)
    if not path.is_file():
        raise FileNotFoundError(f"no built-in body or vertex file named {spec!r}")
    with path.open() as fh:
        try:
            return VPolytope.from_json(json.load(fh))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise InvalidArgument(f"{path}: not a VPolytope JSON object ({exc})") from exc


def as_vpolytope(body):
    return body if isinstance(body, VPolytope) else body.as_polytope()


def random_rotation(d, rng):
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    return q * np.sign(np.diag(r))


def planted_cross_instance(rng, bump=0.03, thickness=0.01):
    """Body in ``R^4`` whose projection to a known 3-space is a perturbed ``e/2 + B_1^3/2``.

    Returns ``(K, H, L)`` with ``L`` the projection in ``H`` coordinates.
    """
    T = b1_cone(3)
    e = T.apex
    extra = 0.5 * (1 + bump) * np.array([[1.0, 0.0, 0.0], [0.0, -1.0, 0.0]])
    L = np.vstack([0.5 * T.extreme_points(), extra]) + e / 2
    K0 = np.vstack([np.column_stack([L, np.full(len(L), s)]) for s in (thickness, -thickness)])
    Q = random_rotation(4, rng)
    K = VPolytope(K0 @ Q.T)
    return K, Subspace(Q[:, :3].T), VPolytope(L)


def planted_ball_instance(rng, k=31, height=0.3):
    """Bipyramid in ``R^3`` over a regular odd ``k``-gon, randomly rotated.

    Its projection onto the rotated base plane has a difference body within
    ``1/cos(pi/(2k))`` of the ball.  Returns ``(K, H)``.
    """
    t = 2 * np.pi * np.arange(k) / k
    base = np.column_stack([np.cos(t), np.sin(t), np.zeros(k)])
    apexes = np.array([[0.2, 0.1, height], [-0.1, 0.05, -height]])
    Q = random_rotation(3, rng)
    K = VPolytope(np.vstack([base, apexes]) @ Q.T)
    return K, Subspace(Q[:, :2].T)
