"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

The lines are also repeated in the pytest terminal summary.  Run the file
directly (``python3 tests/test_acceptance.py``) to get just the lines.
"""
import json
import time

import numpy as np
import pytest

from convexsandwich.bodies import (
    CrossPolytope,
    Cube,
    Scaled,
    VPolytope,
    b1_cone,
    containment_margin,
    sandwich_ratio,
)
from convexsandwich.cli import main, resolve_config, run
from convexsandwich.dvoretzky import (
    ReductionParams,
    ReductionWitness,
    eq2_chain_check,
    mean_norm,
    normalize_for_mean_bound,
    polarity_discrepancy,
    reduce_nonsymmetric,
)
from convexsandwich.ellipsoids import ball_distance, john_shrink_margin, mvee, verify_ball_certificate
from convexsandwich.reports import deterministic_content
from convexsandwich.sampling import haar_subspace, rng_for, set_workers
from convexsandwich.shapes import planted_ball_instance, planted_cross_instance, regular_polygon
from convexsandwich.symmetrization import (
    intersection_identity_report,
    lemma3_instance,
    lemma3_verify,
    random_double_cone,
    recover_center,
)

CONTAIN_TOL = 1e-9
IDENTITY_TOL = 1e-9
RESULTS = []


def record(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------

def test_criterion_1_stability_lemma_suite():
    set_workers(1)
    start = time.perf_counter()
    worst, failures, max_delta = np.inf, 0, 0.0
    for m in (2, 3, 4):
        rng = rng_for(1000 + m)
        for _ in range(200):
            L, T = lemma3_instance(m, rng)
            rep = lemma3_verify(L, T)
            assert rep.delta < 1.5
            max_delta = max(max_delta, rep.delta)
            worst = min(worst, rep.inner_margin, rep.outer_margin)
            failures += not (rep.verdict and min(rep.inner_margin, rep.outer_margin) >= -CONTAIN_TOL)
    elapsed = time.perf_counter() - start
    set_workers(None)
    record(1, failures == 0 and elapsed < 60,
           f"600 instances (m=2,3,4), failures={failures}, worst margin={worst:.2e}, "
           f"max delta={max_delta:.4f}, {elapsed:.1f}s single-threaded")


# 2 -------------------------------------------------------------------------

def test_criterion_2_intersection_identity():
    cones = {"B1^2": b1_cone(2), "B1^3": b1_cone(3), "random R^3": random_double_cone(3, rng_for(7))}
    worst_exact, worst_float, worst_margin, ok = 0.0, 0.0, np.inf, True
    for name, T in cones.items():
        for delta in (1.0, 1.1, 1.25, 1.4, 1.49):
            rep = intersection_identity_report(T, delta, 32)
            worst_exact = max(worst_exact, rep.exact_discrepancy)
            worst_float = max(worst_float, rep.float_discrepancy)
            worst_margin = min(worst_margin, rep.inner_margin, rep.outer_margin)
            ok &= (rep.set_level_checked and rep.exact_discrepancy == 0
                   and rep.float_discrepancy <= 1e-12
                   and min(rep.inner_margin, rep.outer_margin) >= -CONTAIN_TOL)
    record(2, ok, f"15 (T, delta) pairs on a 32-point grid, exact discrepancy={worst_exact}, "
                  f"float discrepancy={worst_float:.1e}, worst set margin={worst_margin:.1e}")


# 3 -------------------------------------------------------------------------

def test_criterion_3_irreducibility():
    rng = rng_for(3)
    center_err, ratio_err = 0.0, 0.0
    for i in range(50):
        m = 2 + i % 3
        T = random_double_cone(m, rng) if i % 2 else b1_cone(m)
        a = rng.standard_normal(m)
        L = VPolytope(a + 0.5 * T.extreme_points())
        a_rec = recover_center(L, T)
        center_err = max(center_err, float(np.abs(a_rec - a).max()))
        ratio = sandwich_ratio(L.translate(-a_rec), Scaled(T, 0.5))
        ratio_err = max(ratio_err, abs(ratio - 1))
    record(3, center_err <= 1e-9 and ratio_err <= 1e-9,
           f"50 (T, a) pairs, max center error={center_err:.1e}, max |ratio - 1|={ratio_err:.1e}")


# 4 -------------------------------------------------------------------------

def _near_ball_instances(rng):
    """L - L is a 64-gon (half 64-gon) or 62-gon (odd 31-gon), randomly placed."""
    out = []
    for i in range(20):
        base = 0.5 * regular_polygon(64).vertices if i % 2 == 0 else regular_polygon(31).vertices
        A = np.eye(2) + 0.3 * rng.standard_normal((2, 2))
        out.append(VPolytope(base @ A.T + rng.standard_normal(2)))
    return out


def test_criterion_4_mean_norm_chain():
    rng = rng_for(4)
    worst_link, worst_delta, worst_gap, ok = 0.0, 0.0, np.inf, True
    for i, P in enumerate(_near_ball_instances(rng)):
        rep = eq2_chain_check(normalize_for_mean_bound(P), 0.01, 100_000, 40 + i)
        worst_link = max(worst_link, rep.polarity_error, rep.symmetrization_error)
        worst_delta = max(worst_delta, rep.delta)
        worst_gap = min(worst_gap, (rep.mean - rep.bound) / rep.std_error)
        ok &= (rep.delta <= 1.01 and rep.polarity_error <= IDENTITY_TOL
               and rep.symmetrization_error <= IDENTITY_TOL
               and rep.mean >= rep.bound - 3 * rep.std_error)
    est = mean_norm(CrossPolytope(2), 100_000, 42)
    z = abs(est.mean - 4 / np.pi) / est.std_error
    ok &= z <= 3
    record(4, ok, f"20 instances at n=1e5, max delta={worst_delta:.5f}, worst link error="
                  f"{worst_link:.1e}, min (mean - bound)/se={worst_gap:.1f}; "
                  f"cross-polytope mean={est.mean:.5f} vs 4/pi ({z:.2f} se)")


# 5 -------------------------------------------------------------------------

def test_criterion_5_mvee_and_ball_distance():
    lam, _ = ball_distance(Cube(2).as_polytope())
    cube_err = abs(lam - np.sqrt(2))
    rng = rng_for(5)
    worst_john = np.inf
    for i in range(50):
        d = 2 + i % 2
        V = rng.standard_normal((int(rng.integers(d + 1, 3 * d + 2)), d))
        P = VPolytope(np.vstack([V, -V]))
        # John's theorem concerns the exact Löwner ellipsoid; solve it tightly
        worst_john = min(worst_john, john_shrink_margin(P, mvee(P.vertices, tol=1e-10)))
    worst_affine = 0.0
    for i in range(10):
        d = 2 + i % 2
        P = VPolytope(rng.standard_normal((3 * d + 2, d)))
        A = np.eye(d) + 0.5 * rng.standard_normal((d, d))
        Q = VPolytope(P.vertices @ A.T + rng.standard_normal(d))
        worst_affine = max(worst_affine, abs(ball_distance(Q)[0] - ball_distance(P)[0]))
    record(5, cube_err <= 1e-6 and worst_john >= -CONTAIN_TOL and worst_affine <= 1e-6,
           f"cube lambda error={cube_err:.1e}, worst John margin over 50 polytopes={worst_john:.1e}, "
           f"affine invariance error={worst_affine:.1e}")


# 6 -------------------------------------------------------------------------

def _scan_medians(seed):
    cfg = resolve_config("dvoretzky-scan", {"seed": seed})
    report, _ = run("dvoretzky-scan", cfg, threads=1)
    return [s["median_ratio"] for s in report["summary"]["per_dimension"]]


def test_criterion_6_dvoretzky_trend():
    main_medians = _scan_medians(42)
    strict = all(a > b for a, b in zip(main_medians, main_medians[1:]))
    # d = 4, 8, 16 leaves two adjacent pairs; every rerun must decrease in both
    reruns = {s: _scan_medians(s) for s in range(42, 47)}
    counts = {s: sum(a > b for a, b in zip(v, v[1:])) for s, v in reruns.items()}
    ok = strict and all(c == 2 for c in counts.values())
    record(6, ok, f"seed 42 medians (d=4,8,16)={[round(x, 4) for x in main_medians]}, "
                  f"decreasing pairs per seed 42..46={list(counts.values())}")


# 7 -------------------------------------------------------------------------

def test_criterion_7_reduction_pipeline():
    K, H, _ = planted_cross_instance(rng_for(7))
    out = reduce_nonsymmetric(K, ReductionWitness(H, "CrossPolytope"))
    delta, lam = out.delta, out.lam
    formula = (delta - 0.5) / (1.5 - delta)
    # re-verify independently of the pipeline's own report
    L = VPolytope(H.coords(K.vertices)).translate(-np.asarray(out.center))
    T = b1_cone(3)
    inner = containment_margin(Scaled(T, 1.5 - delta), L)
    outer = containment_margin(L, Scaled(T, delta - 0.5))
    measured = sandwich_ratio(L, CrossPolytope(3))
    cross_ok = (delta <= 1.1 and lam <= formula + 1e-12 and inner >= -CONTAIN_TOL
                and outer >= -CONTAIN_TOL and measured <= lam + 1e-9)

    Kb, Hb = planted_ball_instance(rng_for(8))
    outb = reduce_nonsymmetric(Kb, ReductionWitness(Hb, "Ball"), ReductionParams())
    Lb = VPolytope(outb.subspace.coords(Kb.vertices))
    lam_b, cert = ball_distance(Lb)
    ball_ok = outb.lam <= 1.1 and verify_ball_certificate(Lb, cert)[0] and lam_b <= 1.1
    record(7, cross_ok and ball_ok,
           f"cross case delta={delta:.4f}, lambda={lam:.4f} (formula {formula:.4f}), "
           f"margins=({inner:.1e}, {outer:.1e}), measured ratio={measured:.4f}; "
           f"ball case ratio={outb.lam:.5f}")


# 8 -------------------------------------------------------------------------

def test_criterion_8_polarity():
    rng = rng_for(8)
    worst = 0.0
    for i in range(20):
        d = 3 + i % 3
        m = 1 + i % (d - 1)
        V = rng.standard_normal((2 * d + 4, d))
        K = VPolytope(np.vstack([V, -V]) if i % 2 else V - V.mean(axis=0))
        S = haar_subspace(d, m, 800 + i)
        g, s = polarity_discrepancy(K, S, 500, 900 + i)
        worst = max(worst, g, s)
    record(8, worst <= 1e-8, f"20 (K, S) pairs x 500 directions, worst discrepancy={worst:.1e}")


# 9 -------------------------------------------------------------------------

DEFAULT_RUNS = [
    ["verify-lemma3"], ["section-identity"], ["eq2-chain"], ["mvee"], ["ball-distance"],
    ["mean-norm"], ["dvoretzky-scan"], ["reduce", "--planted", "cross"],
    ["reduce", "--planted", "ball"], ["polarity-check"],
]


def test_criterion_9_determinism(tmp_path):
    mismatched = []
    for argv in DEFAULT_RUNS:
        contents = []
        for threads in ("1", "1", "4"):
            assert main([*argv, "--out", str(tmp_path), "--threads", threads]) == 0
            report = json.loads((tmp_path / f"{argv[0]}.json").read_text())
            contents.append((deterministic_content(report), (tmp_path / f"{argv[0]}.csv").read_bytes()))
        if not contents[0] == contents[1] == contents[2]:
            mismatched.append(" ".join(argv))
    record(9, not mismatched, f"{len(DEFAULT_RUNS)} default runs, repeated and at 1 vs 4 threads; "
                              f"mismatches={mismatched or 'none'}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
