"""End-to-end acceptance checks for the fitting library.

Each test covers one numbered criterion and prints a single pass/fail line
so the run log doubles as a checklist.  Tolerances are part of the contract;
do not loosen them.
"""

import time

import numpy as np

from hyperfit import (
    SPECIAL_DATA,
    AffineTransform,
    CurveSpec,
    MonomialBasis,
    NoiseSpec,
    bombieri_weights,
    check_invariance,
    consistency_sweep,
    euclidean_weights,
    fit_als,
    fit_als_known_sigma,
    fit_ols,
    psi_matrix,
    psi_polynomial,
    sigma_sweep,
    sin_angle,
    smallest_eig_min,
    solve_pep,
)

from conftest import CONIC_THETA, WITNESS_POINTS, conic_points, psi_direct


def _report(num, ok: bool, detail: str) -> bool:
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} - {detail}")
    return ok


def _horner(mats, sigma):
    s2 = sigma**2
    out = np.zeros_like(mats[0])
    for c in reversed(mats):
        out = out * s2 + c
    return out


def test_criterion_1_two_path_moment_equivalence():
    rng = np.random.default_rng(20260816)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        q = int(rng.integers(1, 4))
        r = int(rng.integers(1, 4))
        n = int(rng.integers(5, 51))
        sigma = float(rng.uniform(0.0, 2.0))
        basis = MonomialBasis.triangular(q, r)
        pts = rng.standard_normal((n, q)) * float(rng.uniform(0.5, 2.0))
        built = _horner(psi_polynomial(pts, basis), sigma)
        direct = psi_direct(basis, pts, sigma)
        scale = max(1.0, float(np.max(np.abs(direct))))
        worst = max(worst, float(np.max(np.abs(built - direct))) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and elapsed < 10.0
    assert _report(1, ok, f"200 instances, worst relative deviation {worst:.2e}, {elapsed:.1f}s")


def test_criterion_2_closed_form_one_dimensional_root():
    basis = MonomialBasis.triangular(1, 1)
    fit = fit_als(np.array([[1.0], [3.0]]), basis)
    root = -fit.theta[0] / fit.theta[1]
    ok = abs(fit.sigma_sq_hat - 1.0) <= 1e-10 and abs(root - 2.0) <= 1e-8

    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(3, 41))
        data = rng.normal(rng.uniform(-5, 5), rng.uniform(0.2, 3.0), size=(n, 1))
        got = fit_als(data, basis).sigma_sq_hat
        want = float(np.var(data))
        worst = max(worst, abs(got - want) / want)
    ok = ok and worst <= 1e-8
    assert _report(2, ok, f"two-point root exact, 50 random datasets match the biased "
                          f"sample variance to {worst:.2e}")


def test_criterion_3_noiseless_recovery():
    basis = MonomialBasis.triangular(2, 2)
    pts = conic_points(20)
    ols = fit_ols(pts, basis)
    ols_angle = sin_angle(ols.theta, CONIC_THETA)
    als = fit_als(pts, basis)
    als_angle = sin_angle(als.theta, CONIC_THETA)
    ok = ols_angle <= 1e-8 and als.sigma_sq_hat <= 1e-10 and als_angle <= 1e-8
    assert _report(3, ok, f"ols angle {ols_angle:.2e}, estimated noise level "
                          f"{als.sigma_sq_hat:.2e}, als angle {als_angle:.2e}")


def test_criterion_4_sign_structure_below_the_root():
    rng = np.random.default_rng(4)
    bases = [
        MonomialBasis.triangular(1, 2),
        MonomialBasis.triangular(2, 2),
        MonomialBasis.triangular(3, 2),
        MonomialBasis.box((2, 1)),
        MonomialBasis.box((1, 1, 1)),
    ]
    failures = 0
    for trial in range(50):
        basis = bases[trial % len(bases)]
        n = int(rng.integers(20, 45))
        sigma_true = float(rng.uniform(0.05, 0.3))
        pts = rng.standard_normal((n, basis.q)) + sigma_true * rng.standard_normal((n, basis.q))
        mats = psi_polynomial(pts, basis)
        sol = solve_pep(mats)
        sigma_hat = float(np.sqrt(sol.sigma_sq_hat))
        floor = -1e-9 * np.linalg.norm(mats[0])
        grid_ok = all(
            smallest_eig_min(mats, sig) > floor for sig in np.linspace(0.0, sigma_hat, 100)
        )
        above = smallest_eig_min(mats, 1.05 * sigma_hat) < 0
        if not (grid_ok and above):
            failures += 1
    ok = failures == 0
    assert _report(4, ok, f"50 instances, nonnegative up to the root and negative at "
                          f"1.05x, {failures} violations")


def test_criterion_5_existence_for_odd_degree_bases():
    rng = np.random.default_rng(5)
    basis = MonomialBasis.degree(3, 3)
    failures = 0
    for _ in range(50):
        n = int(rng.integers(20, 41))
        pts = rng.standard_normal((n, 3)) * float(rng.uniform(0.5, 2.0))
        pts = pts + 0.1 * rng.standard_normal((n, 3))
        try:
            fit_als(pts, basis)
        except Exception:
            failures += 1
    ok = failures == 0
    assert _report(5, ok, f"all-odd-degree basis solved on 50 random instances, "
                          f"{failures} failures")


def test_criterion_6_invariance_suite():
    basis = MonomialBasis.triangular(2, 2)

    def als(points, basis_, weights):
        return fit_als(points, basis_, weights=weights)

    # (a) translation invariance of the corrected fit on the fixed table
    shift = AffineTransform.translation([-13.0, -3.0])
    rep_a = check_invariance(als, SPECIAL_DATA, shift, basis)
    ok_a = rep_a.angle <= 1e-8

    # (b) estimated noise level scales linearly with the data
    ratio_errs = []
    for b in (MonomialBasis.degree(2, 2), MonomialBasis.triangular(2, 2)):
        s_base = np.sqrt(fit_als(SPECIAL_DATA, b).sigma_sq_hat)
        s_scaled = np.sqrt(fit_als(1.5 * SPECIAL_DATA, b).sigma_sq_hat)
        ratio_errs.append(abs(s_scaled / s_base - 1.5) / 1.5)
    ok_b = max(ratio_errs) <= 1e-8

    # (c) rotation invariance with the weighted norm
    rot = AffineTransform.rotation(2.0 * np.pi / 3.0)
    wb = bombieri_weights(basis)

    def ols(points, basis_, weights):
        return fit_ols(points, basis_, weights=weights)

    def als_known(points, basis_, weights):
        return fit_als_known_sigma(points, basis_, sigma=0.05, weights=weights)

    angle_ols = check_invariance(ols, WITNESS_POINTS, rot, basis, weights=wb).angle
    angle_known = check_invariance(als_known, WITNESS_POINTS, rot, basis, weights=wb).angle
    ok_c = angle_ols <= 1e-8 and angle_known <= 1e-8

    # (d) the plain 2-norm fit is demonstrably not rotation invariant
    we = euclidean_weights(basis.m)
    angle_euclid = check_invariance(ols, WITNESS_POINTS, rot, basis, weights=we).angle
    ok_d = angle_euclid > 1e-3

    ok = ok_a and ok_b and ok_c and ok_d
    assert _report(6, ok, f"translation angle {rep_a.angle:.2e}, scaling ratio error "
                          f"{max(ratio_errs):.2e}, rotation angles {angle_ols:.2e}/"
                          f"{angle_known:.2e}, plain-norm witness {angle_euclid:.2e}")


def test_criterion_7_norm_independence():
    rng = np.random.default_rng(7)
    basis = MonomialBasis.triangular(2, 2)
    wb = bombieri_weights(basis)
    we = euclidean_weights(basis.m)
    worst_sigma = 0.0
    worst_angle = 0.0
    for _ in range(20):
        n = int(rng.integers(15, 40))
        pts = rng.standard_normal((n, 2)) * float(rng.uniform(0.5, 2.0))
        pts = pts + 0.1 * rng.standard_normal((n, 2))
        fb = fit_als(pts, basis, weights=wb)
        fe = fit_als(pts, basis, weights=we)
        worst_sigma = max(worst_sigma,
                          abs(fb.sigma_sq_hat - fe.sigma_sq_hat) / fe.sigma_sq_hat)
        worst_angle = max(worst_angle, sin_angle(fb.theta, fe.theta))
    ok = worst_sigma <= 1e-8 and worst_angle <= 1e-8
    assert _report(7, ok, f"20 instances, noise-level deviation {worst_sigma:.2e}, "
                          f"direction deviation {worst_angle:.2e}")


def test_criterion_8_consistency_at_scale():
    t0 = time.perf_counter()
    spec = CurveSpec.eight_curve()
    basis = MonomialBasis.triangular(2, 4)
    results = {}
    ok = True
    for kind in ("gaussian", "uniform"):
        noise = NoiseSpec(kind, 0.01, seed=2026)
        res = consistency_sweep(spec, noise, basis, ("ols", "als"),
                                [2**8, 2**11, 2**14], realizations=50)
        s = {(int(row.x), row.method): row.spread for row in res.rows}
        shrinks = s[(2**14, "als")] < s[(2**8, "als")] / 4.0
        dominates = s[(2**14, "ols")] > 2.0 * s[(2**14, "als")]
        results[kind] = (s[(2**8, "als")], s[(2**14, "als")], s[(2**14, "ols")])
        ok = ok and shrinks and dominates
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < 300.0
    g, u = results["gaussian"], results["uniform"]
    assert _report(8, ok, f"gaussian als {g[0]:.2e}->{g[1]:.2e} vs ols {g[2]:.2e}; "
                          f"uniform als {u[0]:.2e}->{u[1]:.2e} vs ols {u[2]:.2e}; "
                          f"{elapsed:.0f}s")


def test_criterion_9_corrected_matrix_is_unbiased():
    pts = conic_points(10)
    basis = MonomialBasis.triangular(2, 2)
    sigma = 0.1
    target = psi_matrix(basis, pts).matrix
    rng = np.random.default_rng(9)
    m = 10_000
    acc = np.zeros_like(target)
    acc_sq = np.zeros_like(target)
    for _ in range(m):
        noisy = pts + sigma * rng.standard_normal(pts.shape)
        mat = _horner(psi_polynomial(noisy, basis), sigma)
        acc += mat
        acc_sq += mat * mat
    mean = acc / m
    variance = np.maximum(acc_sq / m - mean**2, 0.0)
    stderr = np.sqrt(variance / m)
    deviation = np.abs(mean - target)
    slack = 4.0 * stderr + 1e-12 * np.linalg.norm(target)
    worst = float(np.max(np.where(stderr > 0, deviation / np.maximum(stderr, 1e-300), 0.0)))
    ok = bool(np.all(deviation <= slack))
    assert _report(9, ok, f"{m} realizations, worst entry at {worst:.2f} standard errors "
                          f"(limit 4)")


def test_criterion_10_sweeps_are_deterministic():
    spec = CurveSpec.eight_curve()
    basis = MonomialBasis.triangular(2, 4)
    noise = NoiseSpec("gaussian", 0.01, seed=11)
    a = consistency_sweep(spec, noise, basis, ("ols", "als"), [64, 128], 4).to_csv()
    b = consistency_sweep(spec, noise, basis, ("ols", "als"), [64, 128], 4).to_csv()
    c = sigma_sweep(spec, basis, 96, [0.01, 0.02], realizations=4, seed=11).to_csv()
    d = sigma_sweep(spec, basis, 96, [0.01, 0.02], realizations=4, seed=11).to_csv()
    ok = a == b and c == d
    assert _report(10, ok, "repeated sweeps produce byte-identical tables")
