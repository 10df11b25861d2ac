import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curved_nbody.dynamics import SystemState, angular_momentum
from curved_nbody.equilibria import (
    EQUATION_IDS,
    EllipticREParams,
    HyperbolicREParams,
    ParabolicAnsatz,
    RelativeEquilibrium,
    build_relative_equilibrium,
    eq4,
    eq5,
    eq7,
    equilateral_state,
    eulerian_omega_sq,
    eulerian_re,
    fixed_point_ngon,
    fixed_point_tetrahedron,
    fixrel_re,
    geodesic_chase_residual,
    hemisphere_no_fixed_point_witness,
    hyperbolic_re,
    hyperbolic_re_omega_sq,
    hyperboloid_no_fixed_point_witness,
    is_fixed_point,
    lagrangian_re,
    ngon_omega_sq_over_m,
    ngon_re,
    parabolic_angular_momentum_x,
    parabolic_nonexistence_check,
    ratio1,
    ratio2,
    solve_roots,
    tilted_ngon_state,
    two_body_hyperbolic_re,
    verify_relative_equilibrium,
)
from curved_nbody.errors import ConstraintViolation, DomainError, SingularityError
from curved_nbody.integrate import IntegratorConfig, integrate

from conftest import hyperboloid_point, sphere_point

TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
RATIO1_THRESHOLD = 64 * np.sqrt(15) / 45


def run(re, span, samples=40):
    times = np.linspace(0, span, samples + 1)[1:]
    traj, stop = integrate(re.state, span, TIGHT, sample_times=times)
    return traj, stop


class TestFixedPoints:
    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_odd_ngon(self, n):
        s = fixed_point_ngon(n)
        assert is_fixed_point(s) and s.n == n

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_even_ngon_rejected(self, n):
        with pytest.raises(DomainError, match="antipodal"):
            fixed_point_ngon(n)

    def test_negative_curvature_rejected(self):
        with pytest.raises(DomainError):
            fixed_point_ngon(3, kappa=-1.0)

    def test_tetrahedron(self):
        assert is_fixed_point(fixed_point_tetrahedron())

    def test_moving_state_is_not_fixed(self):
        assert not is_fixed_point(lagrangian_re(1.0, 0.3).state)

    @pytest.mark.parametrize("seed", range(5))
    def test_no_fixed_points_on_hyperboloid(self, seed):
        rng = np.random.default_rng(seed)
        q = [hyperboloid_point(*p) for p in rng.uniform([0.1, 0], [1.5, 2 * np.pi], (3, 2))]
        s = SystemState.from_arrays(-1.0, rng.uniform(0.5, 2, 3), q)
        assert not is_fixed_point(s, 1e-8)
        i, c = hyperboloid_no_fixed_point_witness(s)
        assert c > 1e-12 and s.q[i, 2] == s.q[:, 2].max()

    def test_hemisphere_witness(self):
        q = [sphere_point(np.arccos(z), phi) for z, phi in [(0.0, 0.3), (0.1, 2.2), (0.5, 4.4)]]
        s = SystemState.from_arrays(1.0, [1, 1, 1], q)
        i, g = hemisphere_no_fixed_point_witness(s)
        assert i == 0 and g > 1e-12

    def test_hemisphere_witness_two_bodies(self):
        q = [sphere_point(np.pi / 2, 0.0), sphere_point(np.arccos(0.3), 1.0)]
        i, g = hemisphere_no_fixed_point_witness(SystemState.from_arrays(1.0, [1, 1], q))
        assert i == 0 and g > 1e-12

    def test_hemisphere_witness_needs_body_off_equator(self):
        with pytest.raises(DomainError):
            hemisphere_no_fixed_point_witness(fixed_point_ngon(3))

    def test_hemisphere_witness_rejects_lower_bodies(self):
        q = [sphere_point(2.0, 0.0), sphere_point(1.0, 1.0)]
        with pytest.raises(DomainError):
            hemisphere_no_fixed_point_witness(SystemState.from_arrays(1.0, [1, 1], q))


class TestOmegaRelations:
    def test_eq4_values(self):
        assert eq4(0.0) == pytest.approx(8 / np.sqrt(3), rel=1e-15)
        assert eq4(1 / np.sqrt(3)) == pytest.approx(3.0, rel=1e-14)
        assert eq4(-1 / np.sqrt(3)) == pytest.approx(3.0, rel=1e-14)

    def test_eq5_value(self):
        assert eq5(np.sqrt(2)) == pytest.approx(8 / (np.sqrt(3) * 7 ** 1.5), rel=1e-14)
        assert eq5(np.sqrt(2)) == pytest.approx(0.24940, abs=1e-5)

    def test_ratio1_values(self):
        assert ratio1(-0.5) == pytest.approx(0.0, abs=1e-15)
        z = np.linspace(0.01, 0.99, 200001)
        assert np.min(ratio1(z)) == pytest.approx(RATIO1_THRESHOLD, rel=1e-9)

    def test_ratio2_value(self):
        assert ratio2(np.sqrt(2)) == pytest.approx(9 / (8 * np.sqrt(2)), rel=1e-14)

    def test_eq7_values(self):
        assert eq7(1.0) == pytest.approx(9 / (8 * np.sqrt(2)), rel=1e-15)
        assert eq7(1e4) < 1e-7
        x = np.linspace(0.01, 50, 5000)
        assert np.all(np.diff(eq7(x)) < 0)

    @pytest.mark.parametrize("z", [-0.7, 0.0, 0.3, 0.8])
    def test_ngon3_is_eq4(self, z):
        assert ngon_omega_sq_over_m(1.0, 3, z) == pytest.approx(eq4(z), rel=1e-13)

    @pytest.mark.parametrize("z", [1.1, np.sqrt(2), 3.0])
    def test_ngon3_is_eq5(self, z):
        assert ngon_omega_sq_over_m(-1.0, 3, z) == pytest.approx(eq5(z), rel=1e-13)

    @pytest.mark.parametrize("z", [-0.6, 0.4])
    def test_eulerian_equal_masses_is_ratio1(self, z):
        assert eulerian_omega_sq(1.0, z) == pytest.approx(ratio1(z), rel=1e-14)

    def test_eulerian_hyperbolic_is_ratio2(self):
        assert eulerian_omega_sq(-1.0, np.sqrt(2)) == pytest.approx(ratio2(np.sqrt(2)))

    def test_eulerian_equator_is_singular(self):
        with pytest.raises(SingularityError):
            eulerian_omega_sq(1.0, 0.0)

    def test_hyperbolic_equal_masses_is_eq7(self):
        assert hyperbolic_re_omega_sq(0.7) == pytest.approx(eq7(0.7), rel=1e-14)

    def test_curvature_scaling(self):
        # on the sphere of curvature 4 (radius 1/2) heights scale by 1/2, omega^2 by 8
        assert ngon_omega_sq_over_m(4.0, 3, 0.15) == pytest.approx(8 * eq4(0.3), rel=1e-13)

    def test_even_ngon_on_equator_is_singular(self):
        with pytest.raises(SingularityError):
            ngon_omega_sq_over_m(1.0, 4, 0.0)

    @pytest.mark.parametrize("M", [4.0, 5.0, 10.0])
    def test_eulerian_heavy_pair_positive_everywhere(self, M):
        z = np.r_[np.linspace(-0.99, -0.01, 50), np.linspace(0.01, 0.99, 50)]
        assert all(eulerian_omega_sq(1.0, zi, 1.0, M) > 0 for zi in z)


class TestSolveRoots:
    @pytest.mark.parametrize("target, count", [(4.0, 4), (8 / np.sqrt(3), 3), (5.0, 2)])
    def test_eq4_counts(self, target, count):
        scan = solve_roots("eq4", target)
        assert len(scan) == count
        assert all(r.residual < 1e-10 for r in scan.roots)

    def test_eq4_tangency(self):
        scan = solve_roots("eq4", 3.0)
        assert len(scan) == 2 and all(r.tangency for r in scan.roots)
        np.testing.assert_allclose(scan.values, [-1 / np.sqrt(3), 1 / np.sqrt(3)], atol=1e-10)

    def test_ratio1_above_threshold_has_three_roots(self):
        scan = solve_roots("ratio1", 6.0)
        v = scan.values
        assert len(v) == 3 and -0.5 < v[0] < 0 < v[1] < v[2] < 1
        assert v[2] == pytest.approx(np.sqrt(0.5), abs=1e-12)

    def test_ratio1_below_threshold_has_one_root(self):
        # the curve on (0, 1) never drops below 64 sqrt(15)/45
        scan = solve_roots("ratio1", 3.0)
        assert len(scan) == 1 and -0.5 < scan.values[0] < 0

    @pytest.mark.parametrize("target", [0.5, 1.0, 2.0])
    def test_eq7_single_positive_root(self, target):
        scan = solve_roots("eq7", target)
        positive = [x for x in scan.values if x > 0]
        assert len(positive) == 1 and len(scan) == 2
        assert scan.values[0] == pytest.approx(-positive[0], rel=1e-12)

    def test_eq7_inverse(self):
        scan = solve_roots("eq7", 0.7955)
        np.testing.assert_allclose(np.abs(scan.values), 1.0, atol=1e-5)

    def test_no_roots(self):
        assert len(solve_roots("eq4", 1.0)) == 0

    def test_scan_range(self):
        scan = solve_roots("eq4", 4.0, scan_range=(0.0, 1.0))
        assert len(scan) == 2 and all(v > 0 for v in scan.values)

    @pytest.mark.parametrize("bad", ["nope", "ngon_X:3"])
    def test_unknown_equation(self, bad):
        with pytest.raises(DomainError):
            solve_roots(bad, 1.0)

    def test_empty_range(self):
        with pytest.raises(DomainError):
            solve_roots("eq4", 4.0, scan_range=(2.0, 3.0))

    def test_ngon_ids(self):
        assert len(solve_roots("ngon_S:3", 4.0)) == 4
        assert "ngon_S:<n>" in EQUATION_IDS

    @settings(max_examples=25, deadline=None)
    @given(st.floats(0.05, 20.0))
    def test_roots_solve_the_equation(self, target):
        for eq in ("eq5", "ratio2", "eq7"):
            for r in solve_roots(eq, target).roots:
                assert r.residual < 1e-10 * max(1.0, target)


class TestRelativeEquilibria:
    def test_lagrangian_verifies(self):
        re = lagrangian_re(1.0, 0.3)
        traj, _ = run(re, 3 * re.period)
        rep = verify_relative_equilibrium(traj, "elliptic")
        assert rep.passed and rep.distance_drift < 1e-7

    def test_hyperbolic_from_root(self):
        x = max(solve_roots("eq7", 1.2).values)
        re = hyperbolic_re(x)
        assert re.omega ** 2 == pytest.approx(1.2, rel=1e-12)
        traj, _ = run(re, 3 * re.period)
        assert verify_relative_equilibrium(traj, "hyperbolic").passed

    @pytest.mark.parametrize("z", [-0.9, -0.5, 0.2, 0.7])
    def test_heavy_pair_eulerian_residual(self, z):
        re = eulerian_re(1.0, z, 1.0, 4.0)
        assert max(re.residual(t, relative=True) for t in np.linspace(0, re.period, 20)) < 1e-10

    @pytest.mark.parametrize("factory", [
        lambda: lagrangian_re(1.0, 0.3),
        lambda: lagrangian_re(-1.0, 1.5),
        lambda: ngon_re(1.0, 5, 0.2),
        lambda: ngon_re(-1.0, 4, 1.3),
        lambda: eulerian_re(1.0, 0.4),
        lambda: eulerian_re(-1.0, 1.4),
        lambda: hyperbolic_re(1.0),
        lambda: hyperbolic_re(0.6, 1.0, 2.0),
        lambda: two_body_hyperbolic_re(0.7),
    ])
    def test_closed_form_residual(self, factory):
        re = factory()
        times = np.linspace(0, 3 * re.period, 20)
        assert max(re.residual(t, relative=True) for t in times) < 1e-10

    def test_negative_omega_squared_rejected(self):
        # below z = -1/2 the equal-mass Eulerian configuration has omega^2 < 0
        with pytest.raises(DomainError):
            eulerian_re(1.0, -0.7)

    def test_eulerian_fixed_point(self):
        re = eulerian_re(1.0, -0.5)
        assert re.omega == 0.0 and is_fixed_point(re.state, 1e-12)

    def test_parameter_validation(self):
        with pytest.raises(ConstraintViolation):
            EllipticREParams(1.0, [1.5], [0.0], 1.0)
        with pytest.raises(ConstraintViolation):
            EllipticREParams(-1.0, [0.5], [0.0], 1.0)
        with pytest.raises(DomainError):
            HyperbolicREParams(1.0, [0.5], [0.0], 1.0)
        with pytest.raises(DomainError):
            build_relative_equilibrium(EllipticREParams(1.0, [0.1, 0.2], [0, 1], 1.0), [1.0])

    def test_hyperbolic_moment_J(self):
        from curved_nbody.diagnostics import moment_inertia_J

        re = hyperbolic_re(0.8)
        rho = re.params.rho[1]
        for t in (0.0, 0.5, 1.5):
            q, v, _ = re.motion(t)
            s = SystemState(-1.0, re.masses, q, re.masses[:, None] * v)
            assert moment_inertia_J(s) == pytest.approx(-(1 + 2 * rho ** 2), rel=1e-12)

    def test_fixrel(self):
        re = fixrel_re(fixed_point_ngon(3), 1.0)
        traj, _ = run(re, 2 * re.period)
        assert verify_relative_equilibrium(traj).passed
        with pytest.raises(DomainError):
            fixrel_re(lagrangian_re(1.0, 0.3).state, 1.0)


class TestRigidity:
    def test_tilted_ngon_fails(self):
        s = tilted_ngon_state(3, 0.4, 1.0)
        traj, _ = integrate(s, 4 * np.pi, TIGHT, sample_times=np.linspace(0, 4 * np.pi, 41)[1:])
        rep = verify_relative_equilibrium(traj)
        assert not rep.passed

    def test_unequal_masses_fail(self):
        s = equilateral_state(1.0, 0.3, [1.0, 1.0, 1.001], np.sqrt(eq4(0.3)))
        span = 2 * 2 * np.pi / np.sqrt(eq4(0.3))
        traj, _ = integrate(s, span, TIGHT, sample_times=np.linspace(0, span, 41)[1:])
        assert not verify_relative_equilibrium(traj).passed

    def test_geodesic_chase_residual_nonzero(self):
        res = geodesic_chase_residual([0.0, 0.7, -0.9], [1, 1, 1], 1.0, np.linspace(0, 2, 5))
        assert np.max(np.abs(res)) > 1e-3

    def test_geodesic_chase_collision(self):
        with pytest.raises(SingularityError):
            geodesic_chase_residual([0.0, 0.0], [1, 1], 1.0, [0.0])

    def test_verifier_rejects_bad_input(self):
        traj, _ = run(lagrangian_re(1.0, 0.3), 1.0, 4)
        with pytest.raises(DomainError):
            verify_relative_equilibrium(traj[:1])
        with pytest.raises(DomainError):
            verify_relative_equilibrium(traj, "parabolic")
        with pytest.raises(DomainError):
            verify_relative_equilibrium(traj, "hyperbolic")


class TestParabolic:
    def test_slope_nonzero(self):
        ans = ParabolicAnsatz.from_ab([0.3, -0.5], [0.2, 1.0])
        v = parabolic_nonexistence_check(ans, [1.0, 2.0])
        assert v.verdict == "nonexistent" and v.reason == "angular_momentum_not_conserved"
        assert v.linear_coefficient < 0

    def test_b_equals_c(self):
        ans = ParabolicAnsatz.unchecked([0.0, 0.4], [1.0, 2.0], [1.0, 2.0])
        v = parabolic_nonexistence_check(ans, [1.0, 1.0])
        assert v.reason == "constraint_unsatisfiable" and v.constraint_residual > 0

    def test_single_body_at_null_direction_rejected(self):
        with pytest.raises(ConstraintViolation):
            ParabolicAnsatz([0.0], [0.0], [0.0])

    def test_slope_matches_direct_evaluation(self):
        ans = ParabolicAnsatz.from_ab([0.3, -0.5, 1.1], [0.2, 1.0, -0.4])
        m = [1.0, 2.0, 0.5]
        v = parabolic_nonexistence_check(ans, m)
        for t in (0.0, 0.7, -1.3):
            assert parabolic_angular_momentum_x(ans, m, t) == pytest.approx(
                v.constant_term + v.linear_coefficient * t, rel=1e-12, abs=1e-12)

    def test_positions_stay_on_sheet(self):
        ans = ParabolicAnsatz.from_ab([0.3, -0.5], [0.2, 1.0])
        for t in (0.0, 1.0, 3.0):
            q = ans.positions(t)
            np.testing.assert_allclose(q[:, 0] ** 2 + q[:, 1] ** 2 - q[:, 2] ** 2, -1.0, rtol=1e-12)
