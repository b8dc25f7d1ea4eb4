import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from convexsandwich.bodies import (
    AffineImage,
    Cube,
    CrossPolytope,
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
from convexsandwich.errors import (
    DegenerateBody,
    DomainError,
    InvalidArgument,
    UnsupportedPair,
)
from convexsandwich.sampling import haar_subspace

from conftest import random_polytope


def _vertex_set(V):
    return {tuple(np.round(v, 12) + 0.0) for v in np.asarray(V)}


# -- support ---------------------------------------------------------------

def test_support_examples(skew_triangle):
    assert support(CrossPolytope(2), [3, -5]) == 5
    assert support(VPolytope([[0, 0], [1, 0], [0, 1]]), [1, 1]) == 1
    assert support(UnitBall(2), [3, 4]) == 5
    assert support(Cube(3), [1, -2, 3]) == 6
    assert support(skew_triangle, [-1, 0]) == 1


def test_support_rejects_zero_direction():
    with pytest.raises(InvalidArgument):
        support(UnitBall(2), [0.0, 0.0])


def test_support_is_vectorised():
    u = np.array([[1.0, 0.0], [3.0, 4.0]])
    assert np.allclose(UnitBall(2).support(u), [1.0, 5.0])


# -- gauge -----------------------------------------------------------------

def test_gauge_examples(skew_triangle):
    assert gauge(UnitBall(2), [0.5, 0]) == 0.5
    assert gauge(Cube(2), [2, -3]) == 3
    assert gauge(skew_triangle, [2, 0]) == pytest.approx(2.0, abs=1e-12)
    assert skew_triangle.gauge_lp([2, 0]) == pytest.approx(2.0, abs=1e-12)
    assert gauge(skew_triangle, [0, 0]) == 0.0


def test_polytope_gauge_facets_agree_with_weight_program(rng):
    for d in (2, 3, 4):
        P = random_polytope(rng, d)
        for x in rng.standard_normal((25, d)):
            assert P.gauge(x) == pytest.approx(P.gauge_lp(x), rel=1e-9, abs=1e-12)


def test_gauge_needs_origin_in_interior():
    P = VPolytope([[1, 0], [2, 0], [1, 1]])
    with pytest.raises(DomainError):
        P.gauge([1, 1])
    with pytest.raises(DomainError):
        P.gauge_lp([1, 1])
    with pytest.raises(DomainError):
        VPolytope([[0, 0], [1, 0], [0, 1]]).gauge([1, 1])


def test_gauge_positive_homogeneity(rng, skew_triangle):
    for x in rng.standard_normal((20, 2)):
        t = rng.uniform(0.1, 5)
        assert skew_triangle.gauge(t * x) == pytest.approx(t * skew_triangle.gauge(x))


def test_double_cone_gauge_matches_its_hull(rng):
    from convexsandwich.symmetrization import random_double_cone

    for m in (2, 3, 4):
        T = random_double_cone(m, rng)
        hull = VPolytope(T.extreme_points())
        x = rng.standard_normal((50, m))
        assert np.allclose(T.gauge(x), hull.gauge(x), rtol=1e-9, atol=1e-12)
        assert np.allclose(T.support(x), hull.support(x), rtol=1e-12)


def test_b1_cone_is_the_cross_polytope(rng):
    T = b1_cone(4)
    x = rng.standard_normal((30, 4))
    assert np.allclose(T.gauge(x), CrossPolytope(4).gauge(x))
    assert np.allclose(T.support(x), CrossPolytope(4).support(x))


def test_affine_image_against_polytope(rng):
    P = random_polytope(rng, 3)
    A = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    img = AffineImage(P, A, [0.01, -0.02, 0.03])
    explicit = VPolytope(P.vertices @ A.T + [0.01, -0.02, 0.03])
    u = rng.standard_normal((40, 3))
    assert np.allclose(img.support(u), explicit.support(u))
    assert np.allclose(img.gauge(u), explicit.gauge(u))
    ellipse = AffineImage(UnitBall(2), np.diag([2.0, 0.5]))
    assert ellipse.gauge([2.0, 0.0]) == pytest.approx(1.0)
    assert ellipse.max_gauge_on_ball() == pytest.approx(2.0)


# -- construction ----------------------------------------------------------

def test_degenerate_polytope_rejected():
    with pytest.raises(DegenerateBody):
        VPolytope([[0, 0], [1, 1], [2, 2]])
    with pytest.raises(InvalidArgument):
        VPolytope([[0, 0], [1, np.nan], [0, 1]])


def test_json_roundtrip(skew_triangle):
    again = VPolytope.from_json(skew_triangle.to_json())
    assert np.array_equal(again.vertices, skew_triangle.vertices)
    with pytest.raises(InvalidArgument):
        VPolytope.from_json({"dim": 3, "vertices": [[0, 0], [1, 0], [0, 1]]})


def test_subspace_validation():
    Subspace.coordinate(3, [0, 2])
    with pytest.raises(InvalidArgument):
        Subspace(np.array([[1.0, 0.0], [1.0, 1.0]]))


def test_certificate_validation():
    with pytest.raises(InvalidArgument):
        SandwichCertificate(np.zeros((2, 2)), [0, 0], 1.5)
    with pytest.raises(InvalidArgument):
        SandwichCertificate(np.eye(2), [0, 0], 0.9)


# -- polar -----------------------------------------------------------------

def test_polar_of_cross_polytope_is_cube(rng):
    P = polar(CrossPolytope(2).as_polytope())
    x = rng.standard_normal((50, 2))
    assert np.allclose(P.gauge(x), Cube(2).gauge(x))


def test_polar_of_square_is_cross_polytope(rng):
    P = polar(Cube(2).as_polytope())
    x = rng.standard_normal((50, 2))
    assert np.allclose(P.gauge(x), CrossPolytope(2).gauge(x))


def test_polar_duality_on_skew_triangle(rng, skew_triangle):
    P = polar(skew_triangle)
    assert len(P.offsets) == 3
    u = rng.standard_normal((100, 2))
    assert np.allclose(P.gauge(u), skew_triangle.support(u), atol=1e-12)


def test_polar_support_by_lp_is_gauge(rng, skew_triangle):
    # h_{P*} = gauge_P, with the left side solved as a linear program
    P = polar(skew_triangle)
    for u in rng.standard_normal((20, 2)):
        assert P.support(u) == pytest.approx(skew_triangle.gauge(u), rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_gauge_support_duality_many_directions(rng, d):
    P = random_polytope(rng, d)
    u = rng.standard_normal((1000, d))
    assert np.abs(polar(P).gauge(u) - P.support(u)).max() <= 1e-9


def test_polar_requires_interior_origin():
    with pytest.raises(DomainError):
        polar(VPolytope([[0, 0], [1, 0], [0, 1]]))


def test_unbounded_halfspace_system_rejected():
    with pytest.raises(InvalidArgument):
        HPolytope([[1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0])


# -- difference body -------------------------------------------------------

def test_difference_of_symmetric_body_is_doubling():
    P = CrossPolytope(2).as_polytope()
    assert _vertex_set(difference_body(P).vertices) == _vertex_set(2 * P.vertices)


def test_difference_of_triangle_is_hexagon(rng):
    tri = VPolytope([[0, 0], [1, 0], [0, 1]])
    D = difference_body(tri)
    # brute force: all 9 pairwise differences
    diffs = np.array([p - q for p in tri.vertices for q in tri.vertices])
    u = rng.standard_normal((200, 2))
    assert np.allclose(D.support(u), (u @ diffs.T).max(axis=1))
    assert _vertex_set(D.vertices) == _vertex_set([[1, 0], [-1, 0], [0, 1], [0, -1], [1, -1], [-1, 1]])


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_difference_body_support_identity(rng, d):
    P = random_polytope(rng, d)
    D = difference_body(P)
    u = rng.standard_normal((100, d))
    assert np.abs(D.support(u) - P.support(u) - P.support(-u)).max() <= 1e-12
    assert np.allclose(D.support(u), D.support(-u))


# -- projection ------------------------------------------------------------

def test_project_cube_to_coordinate_plane(rng):
    S = Subspace.coordinate(3, [0, 1])
    Q = project(Cube(3).as_polytope(), S)
    u = rng.standard_normal((50, 2))
    assert np.allclose(Q.support(u), np.abs(u).sum(axis=1))


def test_project_identity_keeps_vertices(rng):
    P = random_polytope(rng, 3)
    assert np.array_equal(project(P, Subspace(np.eye(3))).vertices, P.vertices)


def test_project_support_identity_haar(rng):
    P = CrossPolytope(3).as_polytope()
    S = haar_subspace(3, 2, 11)
    Q = project(P, S)
    u = rng.standard_normal((100, 2))
    assert np.abs(Q.support(u) - P.support(u @ S.basis)).max() <= 1e-10


def test_project_dimension_mismatch():
    with pytest.raises(InvalidArgument):
        project(Cube(3).as_polytope(), Subspace.coordinate(4, [0, 1]))


# -- containment -----------------------------------------------------------

def test_contains_examples():
    ok, margin = contains(CrossPolytope(2), Cube(2))
    assert ok and margin == pytest.approx(0.0)
    ok, margin = contains(Cube(2), Scaled(CrossPolytope(2), 2))
    assert ok and margin == pytest.approx(0.0)
    ok, margin = contains(Scaled(CrossPolytope(2), 1.01), CrossPolytope(2).as_polytope())
    assert not ok and margin == pytest.approx(-0.01)


def test_ball_inside_polytope_uses_inradius():
    ok, margin = contains(UnitBall(2), Cube(2).as_polytope())
    assert ok and margin == pytest.approx(0.0)
    ok, margin = contains(UnitBall(2), CrossPolytope(2).as_polytope())
    assert not ok and margin == pytest.approx(1 - np.sqrt(2))


def test_unsupported_pair():
    ellipse = AffineImage(UnitBall(2), np.diag([2.0, 1.0]))
    with pytest.raises(UnsupportedPair):
        contains(ellipse, Cube(2).as_polytope())


def test_contains_transitivity(rng):
    bodies = [Scaled(CrossPolytope(2), 0.9), CrossPolytope(2), Cube(2), Scaled(Cube(2), 1.2),
              random_polytope(rng, 2, symmetric=True), Scaled(random_polytope(rng, 2), 3.0)]
    polys = [b.as_polytope() for b in bodies]
    for a, b, c in itertools.permutations(range(len(polys)), 3):
        if contains(polys[a], polys[b])[0] and contains(polys[b], polys[c])[0]:
            assert contains(polys[a], polys[c])[0]


# -- sandwich ratio --------------------------------------------------------

def test_sandwich_cube_in_ball():
    assert sandwich_ratio(Cube(2), UnitBall(2)) == pytest.approx(np.sqrt(2))


def test_sandwich_identity_case(rng):
    R = random_polytope(rng, 3, symmetric=True)
    assert sandwich_ratio(R, R) == pytest.approx(1.0, abs=1e-12)


def test_sandwich_hexagon_against_cross_polytope_brute_force(hexagon):
    outer = max(np.abs(v).sum() for v in hexagon.vertices)
    worst = max(hexagon.gauge_lp(v) for v in CrossPolytope(2).extreme_points())
    expected = outer * worst
    assert expected == pytest.approx(2.0)
    assert sandwich_ratio(hexagon, CrossPolytope(2)) == pytest.approx(expected, rel=1e-12)


def test_sandwich_with_map_and_center(rng):
    A = rng.standard_normal((2, 2)) + 2 * np.eye(2)
    a = np.array([0.3, -0.7])
    K = VPolytope(Cube(2).extreme_points() @ np.linalg.inv(A).T + a)
    assert sandwich_ratio(K, Cube(2), A, a) == pytest.approx(1.0, abs=1e-10)


def test_sandwich_degenerate_translate_is_infinite():
    assert sandwich_ratio(Cube(2), CrossPolytope(2), None, [5.0, 0.0]) == np.inf


def test_sandwich_rejects_singular_map():
    with pytest.raises(InvalidArgument):
        sandwich_ratio(Cube(2), CrossPolytope(2), np.zeros((2, 2)))


def test_sandwich_ratio_one_iff_mutual_containment(rng):
    for _ in range(10):
        A = random_polytope(rng, 2, symmetric=True)
        B = random_polytope(rng, 2, symmetric=True)
        lam = sandwich_ratio(A, B)
        assert lam >= 1
        same = sandwich_ratio(A, A)
        assert same == pytest.approx(1.0, abs=1e-10)
        assert contains(A, A)[1] >= -1e-10


# -- generic support properties -------------------------------------------

def _bodies(d):
    rng = np.random.default_rng(d)
    return [
        UnitBall(d), CrossPolytope(d), Cube(d), Scaled(Cube(d), 2.5),
        random_polytope(rng, d), b1_cone(d), AffineImage(CrossPolytope(d), np.eye(d) + 0.3 * rng.standard_normal((d, d)), 0.1 * rng.standard_normal(d)),
        polar(random_polytope(rng, d, symmetric=True)),
    ]


vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10, allow_nan=False))


@settings(max_examples=60, deadline=None)
@given(u=vec3, v=vec3, t=st.floats(0.01, 100))
def test_support_subadditive_and_homogeneous(u, v, t):
    for body in _bodies(3):
        scale = 1e-9 * (1 + np.abs(u).sum() + np.abs(v).sum()) * 10
        assert body.support(u + v) <= body.support(u) + body.support(v) + scale
        assert body.support(t * u) == pytest.approx(t * body.support(u), rel=1e-9, abs=1e-9 * t)
