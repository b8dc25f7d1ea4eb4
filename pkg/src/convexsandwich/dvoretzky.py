"""Mean norms, near-Euclidean projections and the non-symmetric reduction.

The reduction works on ``D = K - K``.  Given a witness subspace ``H`` on
which the symmetric body ``P_H(D)`` is close to either the Euclidean ball or
the cross-polytope, it transfers the conclusion to ``P_H(K)`` itself:

* ball case: ``P_H(K) - P_H(K) = P_H(D)`` is nearly round, hence the polar
  of ``L = P_H(K)`` has mean norm at least ``1/(2 delta)`` and some
  projection of ``L`` is nearly round as well;
* cross-polytope case: ``B_1^m`` is a double cone, so the stability lemma
  recenters ``P_H(K)`` directly, with no loss in dimension.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import lp
from .bodies import (
    CrossPolytope,
    Subspace,
    VPolytope,
    b1_cone,
    difference_body,
    polar,
    project,
    sandwich_ratio,
)
from .ellipsoids import ball_distance, spherical_ratio, verify_ball_certificate
from .errors import (
    DomainError,
    HypothesisViolated,
    InvalidArgument,
    PreconditionError,
    WitnessError,
)
from .sampling import child_seeds, haar_subspace, parallel_map, sphere_samples
from .symmetrization import DELTA_MAX, lemma3_verify

IDENTITY_TOL = 1e-9


@dataclass(frozen=True)
class MeanNormEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: int

    @property
    def radius(self):
        return 1.0 / self.mean

    def to_json(self):
        return {**asdict(self), "radius": self.radius}


def _seed_int(seed):
    return int(seed.entropy) if isinstance(seed, np.random.SeedSequence) else int(seed)


def mean_norm(body, n_samples, seed):
    """Monte Carlo estimate of the spherical mean of ``gauge(body, .)``."""
    if n_samples < 1000:
        raise InvalidArgument("mean_norm needs at least 1000 samples")
    values = body.gauge(sphere_samples(body.dim, n_samples, seed))
    se = float(values.std(ddof=1) / np.sqrt(n_samples))
    return MeanNormEstimate(float(values.mean()), se, int(n_samples), _seed_int(seed))


@dataclass
class Eq2Report:
    delta: float
    alpha: float
    mean: float
    std_error: float
    raw_polar_mean: float
    bound: float
    polarity_error: float
    symmetrization_error: float
    n_samples: int
    passed: bool

    def to_json(self):
        return asdict(self)


def normalize_for_mean_bound(L):
    """Linear image of ``L`` with ``(1/delta) B_2 <= L - L <= B_2``, recentred at its vertex mean.

    Uses the Löwner ellipsoid of ``L - L`` (centred at the origin by symmetry).
    """
    D = difference_body(L)
    _, cert = ball_distance(D)
    M = cert.map / cert.ratio
    image = L.vertices @ M.T
    return VPolytope(image - image.mean(axis=0))


def eq2_chain_check(L, alpha, n_samples, seed, tol=IDENTITY_TOL):
    """Check the chain ``M(L*) = 1/2 mean(h_L(u) + h_L(-u)) = 1/2 mean h_{L-L} >= 1/(2 delta)``.

    ``L`` must already satisfy ``(1/delta) B_2 <= L - L <= B_2`` with
    ``delta <= 1 + alpha`` and contain the origin in its interior.  The
    first two links are pointwise identities on every sample; the last is
    a statistical bound.  The mean is taken over antithetic pairs
    ``(u, -u)``, an unbiased estimator of ``M(L*)``.
    """
    D = difference_body(L)
    outer = float(np.linalg.norm(D.vertices, axis=1).max())
    if outer > 1 + tol:
        raise PreconditionError(f"L - L is not inside the unit ball (radius {outer:.6g})")
    delta = D.max_gauge_on_ball()
    if delta > 1 + alpha + tol:
        raise PreconditionError(f"measured delta {delta:.6g} exceeds 1 + alpha")
    if not L.contains_origin:
        raise PreconditionError("origin must be interior to L")
    polar_L = polar(L)
    u = sphere_samples(L.dim, n_samples, seed)
    h_plus, h_minus = L.support(u), L.support(-u)
    g_plus, g_minus = polar_L.gauge(u), polar_L.gauge(-u)
    polarity_error = float(max(np.abs(g_plus - h_plus).max(), np.abs(g_minus - h_minus).max()))
    sym = 0.5 * (h_plus + h_minus)
    symmetrization_error = float(np.abs(sym - 0.5 * D.support(u)).max())
    paired = 0.5 * (g_plus + g_minus)
    mean = float(paired.mean())
    se = float(paired.std(ddof=1) / np.sqrt(n_samples))
    bound = 1.0 / (2.0 * delta)
    passed = (polarity_error <= tol and symmetrization_error <= tol and mean >= bound - 3 * se)
    return Eq2Report(delta, float(alpha), mean, se, float(g_plus.mean()), bound,
                     polarity_error, symmetrization_error, int(n_samples), bool(passed))


def projection_ratios(L, m, trials, seed, n_samples=2000):
    """Spherical ratios of ``trials`` Haar projections of ``L`` to dimension ``m``.

    Returns ``(subspaces, ratios)`` in trial order.  The projection is
    evaluated through ``h_{P_S L}(u) = h_L(u)`` for unit ``u`` in ``S``.
    """
    if trials < 1:
        raise InvalidArgument("need at least one trial")

    def trial(ss):
        sub_seed, sample_seed = ss.spawn(2)
        S = haar_subspace(L.dim, m, sub_seed)
        return S, spherical_ratio(L, S, n_samples, sample_seed)

    results = parallel_map(trial, child_seeds(seed, trials))
    return [r[0] for r in results], [r[1] for r in results]


def near_ball_projection_search(L, m, trials, seed, n_samples=2000):
    """Best of ``trials`` Haar ``m``-subspaces by spherical ratio of the projection.

    The ratio is an upper-bound certificate for that subspace, not a claim
    that the subspace is optimal.
    """
    if not 1 <= m < L.dim:
        raise InvalidArgument("need 1 <= m < dim(L)")
    subspaces, ratios = projection_ratios(L, m, trials, seed, n_samples)
    best = int(np.argmin(ratios))
    return subspaces[best], ratios[best]


@dataclass
class ReductionWitness:
    subspace: Subspace
    case_tag: str
    normalizing_map: np.ndarray | None = None

    def __post_init__(self):
        if self.case_tag not in ("Ball", "CrossPolytope"):
            raise InvalidArgument("case_tag must be 'Ball' or 'CrossPolytope'")
        m = self.subspace.dim
        N = np.eye(m) if self.normalizing_map is None else np.array(self.normalizing_map, dtype=float, ndmin=2)
        if N.shape != (m, m) or not np.isfinite(np.linalg.cond(N)):
            raise InvalidArgument("normalizing map must be an invertible m x m matrix")
        self.normalizing_map = N

    def to_json(self):
        return {"subspace": self.subspace.basis.tolist(), "case_tag": self.case_tag,
                "normalizing_map": self.normalizing_map.tolist()}

    @classmethod
    def from_json(cls, obj):
        return cls(Subspace(np.array(obj["subspace"])), obj["case_tag"], obj.get("normalizing_map"))


@dataclass
class ReductionParams:
    alpha: float = 0.5
    k: int | None = None
    trials: int = 50
    n_samples: int = 20000
    search_samples: int = 2000
    seed: int = 0


@dataclass
class ReductionOutcome:
    subspace: Subspace
    center: np.ndarray
    lam: float
    case_tag: str
    delta: float
    details: dict = field(default_factory=dict)

    def to_json(self):
        return {"subspace": self.subspace.basis.tolist(), "center": np.asarray(self.center).tolist(),
                "lambda": self.lam, "case_tag": self.case_tag, "delta": self.delta,
                "details": self.details}


def reduce_nonsymmetric(K, witness, params=None):
    """Transfer a symmetric-case witness for ``K - K`` to ``K``.

    The witness is re-validated against ``D = K - K``; a wrong witness
    raises :class:`WitnessError` instead of producing a certificate.
    """
    params = ReductionParams() if params is None else params
    H = witness.subspace
    if H.ambient_dim != K.dim:
        raise WitnessError("witness subspace lives in a different ambient dimension")
    L = project(K, H).linear_image(witness.normalizing_map)
    if witness.case_tag == "CrossPolytope":
        return _reduce_cross(L, H)
    return _reduce_ball(L, H, params)


def _reduce_cross(L, H):
    m = L.dim
    if m < 2:
        raise WitnessError("cross-polytope case needs m >= 2")
    T = b1_cone(m)
    try:
        report = lemma3_verify(L, T)
    except HypothesisViolated as exc:
        raise WitnessError(f"B_1^m is not inside P_H(K - K): {exc}") from exc
    if not report.applicable:
        raise WitnessError(report.reason)
    delta = report.delta
    a = np.array(report.center)
    lam = (delta - 0.5) / (DELTA_MAX - delta)
    measured = sandwich_ratio(L, CrossPolytope(m), None, a)
    details = {"inner_margin": report.inner_margin, "outer_margin": report.outer_margin,
               "verdict": report.verdict, "scale": report.scale, "measured_ratio": measured}
    if not report.verdict:
        raise WitnessError(f"containment re-verification failed: {details}")
    return ReductionOutcome(H, a, lam, "CrossPolytope", delta, details)


def _reduce_ball(L, H, params):
    m = L.dim
    D = difference_body(L)
    delta_ball, _ = ball_distance(D)
    if delta_ball > 1 + params.alpha:
        raise WitnessError(f"P_H(K - K) is at distance {delta_ball:.6g} > 1 + alpha from the ball")
    normalized = normalize_for_mean_bound(L)
    eq2 = eq2_chain_check(normalized, params.alpha, params.n_samples, params.seed)
    if not eq2.passed:
        raise WitnessError(f"mean-norm chain failed: {eq2.to_json()}")
    k = m if params.k is None else int(params.k)
    if k < m:
        F_local, ratio = near_ball_projection_search(L, k, params.trials, params.seed,
                                                     params.search_samples)
        F = Subspace(F_local.basis @ H.basis)
        LF = project(L, F_local)
    else:
        F, LF = H, L
        ratio = spherical_ratio(L, Subspace(np.eye(m)), params.search_samples, params.seed)
    if k == 1:
        lam, center = 1.0, LF.vertices.mean(axis=0)
        ok = True
    else:
        lam, cert = ball_distance(LF)
        ok, _, _ = verify_ball_certificate(LF, cert)
        center = cert.center
    if not ok:
        raise WitnessError("ball certificate failed re-verification")
    details = {"ball_delta_of_difference": delta_ball, "eq2": eq2.to_json(),
               "spherical_ratio": ratio, "k": k}
    return ReductionOutcome(F, center, lam, "Ball", delta_ball, details)


def polarity_discrepancy(K, S, n_samples, seed):
    """Errors in ``(P_S K)* = K* cap S`` over sampled unit directions of ``S``.

    Returns ``(gauge_error, support_error)``: the gauge of the polar of the
    projection against the gauge of the polar restricted to ``S``, and the
    support of the section ``K* cap S`` (solved as a linear program) against
    the gauge of the projection.
    """
    if not K.contains_origin:
        raise DomainError("origin must be interior to K")
    proj = project(K, S)
    polar_proj = polar(proj)
    polar_K = polar(K)
    y = sphere_samples(S.dim, n_samples, seed)
    lhs = polar_proj.gauge(y)
    rhs = polar_K.gauge(S.lift(y))
    gauge_error = float(np.abs(lhs - rhs).max())
    # section K* cap S in subspace coordinates: {y : <v_i, B^T y> <= 1}
    A_sec = K.vertices @ S.basis.T
    support_error = 0.0
    proj_gauge = proj.gauge(y)
    for yi, gi in zip(y, proj_gauge):
        h = _halfspace_support(A_sec, yi)
        support_error = max(support_error, float(abs(h - gi)) / max(1.0, float(abs(gi))))
    return gauge_error, support_error


def _halfspace_support(A, u):
    # max <u, y> s.t. A y <= 1, y free
    k, d = A.shape
    M = np.hstack([A, -A, np.eye(k)])
    c = np.concatenate([-u, u, np.zeros(k)])
    _, value = lp.solve(c, M, np.ones(k))
    return -value


def polarity_corollary_check(K, S, n_samples, seed, tol=1e-8):
    g, s = polarity_discrepancy(K, S, n_samples, seed)
    return g <= tol and s <= tol
