"""Double cones, their self-intersection identity and the stability lemma.

A double cone ``T = conv(T1 + {+-e})`` is irreducible: ``T = L - L`` forces
``L`` to be a translate of ``T/2``.  The stable version says that
``T <= L - L <= delta T`` with ``1 <= delta < 3/2`` gives

    (3/2 - delta) T  <=  L - a  <=  (delta - 1/2) T,

with ``a`` the midpoint of any pair ``l1, l2`` in ``L`` with ``l1 - l2 = e``.
The outer inclusion comes from ``delta T  cap  (delta T + e) = e/2 +
(delta - 1/2) T``; both sides are compared slice by slice over the
hyperplanes ``lambda e + span(T1)``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import lp
from .bodies import (
    CONTAIN_TOL,
    DoubleCone,
    HPolytope,
    Scaled,
    b1_cone,
    VPolytope,
    containment_margin,
    difference_body,
    sandwich_scales,
)
from .ellipsoids import vertex_enum
from .errors import (
    DomainError,
    EmptySection,
    HypothesisViolated,
    Infeasible,
    InvalidArgument,
    PreconditionError,
)

DELTA_MAX = 1.5
SET_LEVEL_MAX_DIM = 4


def _slice_lhs(delta, lam):
    return delta - max(abs(lam), abs(lam - 1))


def _slice_rhs(delta, lam):
    half = Fraction(1, 2) if isinstance(delta, Fraction) else 0.5
    return (delta - half) * (1 - abs(lam - half) / (delta - half))


def section_scale(delta, lam):
    """Base scale of the slice of ``delta T cap (delta T + e)`` at height ``lam``.

    The slice is ``lam e + (delta - max(|lam|, |lam - 1|)) T1``.
    """
    if delta < 1:
        raise InvalidArgument("delta must be at least 1")
    slack = 0 if isinstance(delta, Fraction) else 1e-12 * max(1.0, abs(delta))
    if not (1 - delta - slack <= lam <= delta + slack):
        raise EmptySection(f"height {lam} outside [{1 - delta}, {delta}]")
    return max(_slice_lhs(delta, lam), 0)


@dataclass
class IdentityReport:
    delta: float
    heights: list
    lhs_scales: list
    rhs_scales: list
    exact_discrepancy: float
    float_discrepancy: float
    set_level_checked: bool
    inner_margin: float = float("nan")
    outer_margin: float = float("nan")
    passed: bool = False

    def to_json(self):
        return asdict(self)


def intersection_identity_report(T, delta, grid_size, tol=CONTAIN_TOL):
    """Compare ``delta T cap (delta T + e)`` with ``e/2 + (delta - 1/2) T``.

    Slice scales are compared in exact rational arithmetic on the float
    grid values and again in floating point.  For ``T.dim <= 4`` the sets
    are also compared through extreme points in both directions.
    """
    if not 1 <= delta < DELTA_MAX:
        raise InvalidArgument("delta must lie in [1, 3/2)")
    if grid_size < 8:
        raise InvalidArgument("grid_size must be at least 8")
    heights = np.linspace(1 - delta, delta, grid_size)
    d_exact = Fraction(delta)
    exact = max(abs(_slice_lhs(d_exact, Fraction(h)) - _slice_rhs(d_exact, Fraction(h)))
                for h in heights)
    lhs = [section_scale(delta, float(h)) for h in heights]
    rhs = [float(_slice_rhs(delta, float(h))) for h in heights]
    fdisc = float(np.max(np.abs(np.subtract(lhs, rhs))))
    report = IdentityReport(float(delta), heights.tolist(), lhs, rhs, float(exact), fdisc,
                            T.dim <= SET_LEVEL_MAX_DIM)
    ok = exact == 0 and fdisc <= 1e-12
    if report.set_level_checked:
        report.inner_margin, report.outer_margin = _set_level_margins(T, delta)
        ok = ok and report.inner_margin >= -tol and report.outer_margin >= -tol
    report.passed = bool(ok)
    return report


def _set_level_margins(T, delta):
    e = T.apex
    N, b = T.facets
    lhs = HPolytope(np.vstack([N, N]), np.concatenate([delta * b, delta * b + N @ e]), check=False)
    lhs_vertices = vertex_enum(lhs)
    half = delta - 0.5
    # lhs <= rhs
    outer = 1.0 - float(T.gauge((lhs_vertices - e / 2) / half).max())
    # rhs <= lhs, measured in the gauges of delta T and delta T + e
    rhs_vertices = e / 2 + half * T.extreme_points()
    worst = np.maximum(T.gauge(rhs_vertices), T.gauge(rhs_vertices - e)) / delta
    inner = 1.0 - float(worst.max())
    return inner, outer


def intersection_identity_check(T, delta, grid_size):
    return intersection_identity_report(T, delta, grid_size).passed


def recover_pair(L, e):
    """Points ``l1, l2`` of ``L`` with ``l1 - l2 = e`` (first basic solution)."""
    V = L.vertices
    n, d = V.shape
    W = (V - V[0]).T
    A = np.zeros((d + 2, 2 * n))
    A[:d, :n], A[:d, n:] = W, -W
    A[d, :n] = 1.0
    A[d + 1, n:] = 1.0
    rhs = np.concatenate([np.asarray(e, dtype=float), [1.0, 1.0]])
    try:
        w = lp.feasible_point(A, rhs)
    except Infeasible as exc:
        raise PreconditionError("apex is not a difference of two points of L") from exc
    alpha, beta = w[:n] / w[:n].sum(), w[n:] / w[n:].sum()
    return alpha @ V, beta @ V


def recover_center(L, T):
    """Center ``a = (l1 + l2)/2`` for a pair with ``l1 - l2`` equal to the apex of ``T``."""
    if L.dim != T.dim:
        raise InvalidArgument("L and T live in different dimensions")
    l1, l2 = recover_pair(L, T.apex)
    return (l1 + l2) / 2


@dataclass
class Lemma3Report:
    delta: float
    center: list | None
    inner_margin: float
    outer_margin: float
    verdict: bool
    applicable: bool = True
    scale: float = 1.0
    reason: str = ""
    extra: dict = field(default_factory=dict)

    def to_json(self):
        out = asdict(self)
        out.pop("extra")
        return out


def measure_delta(L, T, tol=CONTAIN_TOL):
    """``(delta, t, D)`` with ``tT <= D = L - L <= delta tT`` both tight.

    Raises :class:`HypothesisViolated` unless ``T <= L - L``.
    """
    D = difference_body(L)
    margin = containment_margin(T, D)
    if margin < -tol:
        raise HypothesisViolated(f"T is not contained in L - L (margin {margin:.3e})")
    inner, outer = sandwich_scales(D, T)
    return max(outer / inner, 1.0), inner, D


def lemma3_verify(L, T, tol=CONTAIN_TOL):
    """Measure ``delta`` for ``L - L`` against ``T`` and check both inclusions.

    If ``L - L`` contains ``tT`` with ``t > 1`` the lemma is applied to the
    double cone ``tT`` (same shape, apex ``t e``); ``scale`` records ``t``.
    """
    if L.dim != T.dim:
        raise InvalidArgument("L and T live in different dimensions")
    delta, t, _ = measure_delta(L, T, tol)
    if delta >= DELTA_MAX:
        return Lemma3Report(delta, None, float("nan"), float("nan"), False,
                            applicable=False, scale=t,
                            reason=f"measured delta {delta:.6g} >= 3/2; lemma does not apply")
    Teff = T if t == 1.0 else T.scaled(t)
    a = recover_center(L, Teff)
    La = L.translate(-a)
    try:
        inner = containment_margin(Scaled(Teff, DELTA_MAX - delta), La)
    except DomainError:
        inner = float("-inf")
    outer = containment_margin(La, Scaled(Teff, delta - 0.5))
    verdict = inner >= -tol and outer >= -tol
    return Lemma3Report(delta, a.tolist(), inner, outer, bool(verdict), scale=t,
                        extra={"double_cone": Teff})


def random_double_cone(m, rng):
    """Double cone with a random symmetric base and a tilted apex."""
    if m < 2:
        raise InvalidArgument("double cones need m >= 2")
    k = m - 1
    while True:
        pts = rng.standard_normal((k + int(rng.integers(0, 3)), k))
        if k == 1:
            pts = np.abs(pts[:1]) + 0.2
        base = np.vstack([pts, -pts])
        if np.linalg.matrix_rank(base) == k:
            break
    apex = np.concatenate([0.3 * rng.standard_normal(k), [rng.uniform(0.5, 1.5)]])
    return DoubleCone(VPolytope(base), apex)


def boundary_points(T, n, rng):
    z = rng.standard_normal((n, T.dim))
    return z / T.gauge(z)[:, None]


def perturbed_half_cone(T, rng, n_extra=3, spread=0.4, shift=None):
    """``conv(T/2 + extra points) + shift`` with extras just outside ``T/2``."""
    extras = boundary_points(T, n_extra, rng) * (0.5 * (1 + rng.uniform(0, spread, (n_extra, 1))))
    V = np.vstack([0.5 * T.extreme_points(), extras])
    if shift is None:
        shift = rng.standard_normal(T.dim)
    return VPolytope(V + shift)


def lemma3_instance(m, rng, max_tries=100):
    """Random ``(L, T)`` with measured ``delta < 3/2``."""
    for _ in range(max_tries):
        T = random_double_cone(m, rng) if rng.random() < 0.5 else b1_cone(m)
        L = perturbed_half_cone(T, rng, n_extra=int(rng.integers(0, 5)),
                                spread=float(rng.uniform(0.05, 0.8)))
        if measure_delta(L, T)[0] < DELTA_MAX:
            return L, T
    raise RuntimeError("could not generate an instance with delta < 3/2")

