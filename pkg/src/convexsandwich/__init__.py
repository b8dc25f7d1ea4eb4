"""Convex-geometry toolkit for difference bodies, double cones and ball distances."""

from .bodies import (
    AffineImage,
    Cube,
    CrossPolytope,
    DoubleCone,
    HPolytope,
    SandwichCertificate,
    Scaled,
    Subspace,
    UnitBall,
    VPolytope,
    b1_cone,
    contains,
    difference_body,
    gauge,
    polar,
    project,
    sandwich_ratio,
    support,
)
from .dvoretzky import (
    MeanNormEstimate,
    ReductionOutcome,
    ReductionParams,
    ReductionWitness,
    eq2_chain_check,
    mean_norm,
    near_ball_projection_search,
    polarity_corollary_check,
    reduce_nonsymmetric,
)
from .ellipsoids import Ellipsoid, ball_distance, facet_enum, mvee, spherical_ratio
from .sampling import haar_subspace
from .symmetrization import (
    Lemma3Report,
    intersection_identity_check,
    lemma3_verify,
    recover_center,
    section_scale,
)

__version__ = "0.1.0"

__all__ = [
    "AffineImage",
    "Cube",
    "CrossPolytope",
    "DoubleCone",
    "HPolytope",
    "SandwichCertificate",
    "Scaled",
    "Subspace",
    "UnitBall",
    "VPolytope",
    "b1_cone",
    "contains",
    "difference_body",
    "gauge",
    "polar",
    "project",
    "sandwich_ratio",
    "support",
    "MeanNormEstimate",
    "ReductionOutcome",
    "ReductionParams",
    "ReductionWitness",
    "eq2_chain_check",
    "mean_norm",
    "near_ball_projection_search",
    "polarity_corollary_check",
    "reduce_nonsymmetric",
    "Ellipsoid",
    "ball_distance",
    "facet_enum",
    "mvee",
    "spherical_ratio",
    "haar_subspace",
    "Lemma3Report",
    "intersection_identity_check",
    "lemma3_verify",
    "recover_center",
    "section_scale",
    "__version__",
]
