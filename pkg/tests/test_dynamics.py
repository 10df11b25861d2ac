import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curved_nbody.diagnostics import finite_difference_gradient_check
from curved_nbody.dynamics import (
    SystemState,
    acceleration,
    angular_momentum,
    angular_momentum_per_body,
    energy,
    first_integrals,
    force_function,
    force_function_arrays,
    grad_force_function,
    grad_force_function_homogeneous,
    hamiltonian_rhs,
    min_pair_gap,
    pair_gaps,
)
from curved_nbody.equilibria import (
    fixed_point_ngon,
    fixed_point_tetrahedron,
    hyperbolic_re,
    lagrangian_re,
)
from curved_nbody.errors import ConstraintViolation, DomainError, SingularityError
from curved_nbody.geometry import inner
from curved_nbody.singularities import make_isosceles

from conftest import hyperboloid_point, sphere_point


def two_bodies(kappa, a, b, masses=(1.0, 1.0)):
    return SystemState.from_arrays(kappa, masses, [a, b])


class TestSystemState:
    def test_from_arrays_projects(self):
        s = SystemState.from_arrays(1.0, [1.0], [[2.0, 0.0, 0.0]], [[1.0, 1.0, 0.0]])
        np.testing.assert_array_equal(s.q, [[1.0, 0.0, 0.0]])
        np.testing.assert_array_equal(s.p, [[0.0, 1.0, 0.0]])

    def test_rejects_off_surface(self):
        with pytest.raises(ConstraintViolation):
            SystemState(1.0, [1.0], [[1.1, 0.0, 0.0]], [[0.0, 0.0, 0.0]])

    def test_rejects_non_tangent(self):
        with pytest.raises(ConstraintViolation):
            SystemState(1.0, [1.0], [[1.0, 0.0, 0.0]], [[0.1, 0.0, 0.0]])

    def test_rejects_lower_sheet(self):
        with pytest.raises(ConstraintViolation):
            SystemState(-1.0, [1.0], [[0.0, 0.0, -1.0]], [[0.0, 0.0, 0.0]])

    @pytest.mark.parametrize("masses", [[0.0], [-1.0], [np.nan]])
    def test_rejects_bad_masses(self, masses):
        with pytest.raises(DomainError):
            SystemState(1.0, masses, [[1.0, 0.0, 0.0]], [[0.0, 0.0, 0.0]])

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            SystemState(1.0, [1.0, 1.0], [[1.0, 0.0, 0.0]], [[0.0, 0.0, 0.0]])

    def test_immutable(self, three_body_s2):
        with pytest.raises(ValueError):
            three_body_s2.q[0, 0] = 5.0

    def test_both_velocity_and_momentum_rejected(self):
        with pytest.raises(DomainError):
            SystemState.from_arrays(1.0, [1.0], [[1, 0, 0]], v=[[0, 1, 0]], p=[[0, 1, 0]])


class TestForceFunction:
    def test_orthogonal_pair(self):
        assert force_function(two_bodies(1.0, [1, 0, 0], [0, 1, 0])) == pytest.approx(0.0, abs=1e-16)

    @pytest.mark.parametrize("m", [1.0, 2.5])
    def test_sixty_degrees(self, m):
        s = two_bodies(1.0, [1, 0, 0], [0.5, np.sqrt(3) / 2, 0], (m, m))
        assert force_function(s) == pytest.approx(m * m / np.sqrt(3), rel=1e-14)

    def test_hyperbolic_pair(self):
        s = two_bodies(-1.0, [0, 0, 1], [0, np.sinh(1.0), np.cosh(1.0)])
        assert force_function(s) == pytest.approx(1.0 / np.tanh(1.0), rel=1e-14)

    def test_scaled_sphere(self):
        # radius 2: angle pi/3 means distance 2 pi / 3; U = m^2 ctn_k(d) = sqrt(k) cot(pi/3)
        s = two_bodies(0.25, [2, 0, 0], [1.0, np.sqrt(3), 0])
        assert force_function(s) == pytest.approx(0.5 / np.sqrt(3), rel=1e-14)

    @pytest.mark.parametrize("kappa, a, b", [
        (1.0, [1, 0, 0], [1, 0, 0]),
        (1.0, [1, 0, 0], [-1, 0, 0]),
        (-1.0, [0, 0, 1], [0, 0, 1]),
    ])
    def test_singular_pairs_raise(self, kappa, a, b):
        with pytest.raises(SingularityError):
            force_function_arrays(kappa, [1.0, 1.0], [a, b])

    def test_pair_gap_precision_near_collision(self):
        eps = 1e-7
        s = two_bodies(1.0, sphere_point(1.0, 0.0), sphere_point(1.0 + eps, 0.0))
        # gap = sin^2(d)
        assert pair_gaps(s)[0, 1] == pytest.approx(np.sin(eps) ** 2, rel=1e-8)
        assert min_pair_gap(s) == pair_gaps(s)[0, 1]

    def test_single_body_has_no_gap(self):
        s = SystemState.from_arrays(1.0, [1.0], [[0, 0, 1]])
        assert min_pair_gap(s) == np.inf


class TestGradient:
    def test_tetrahedron_is_critical(self):
        g = grad_force_function(fixed_point_tetrahedron())
        assert np.max(np.linalg.norm(g, axis=1)) < 1e-12

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_odd_ngon_is_critical(self, n):
        g = grad_force_function(fixed_point_ngon(n))
        assert np.max(np.linalg.norm(g, axis=1)) < 1e-12

    @pytest.mark.parametrize("kappa", [1.0, -1.0])
    def test_two_body_finite_differences(self, kappa):
        if kappa > 0:
            s = two_bodies(kappa, sphere_point(0.4, 0.2), sphere_point(1.1, 1.4), (1.0, 2.0))
        else:
            s = two_bodies(kappa, hyperboloid_point(0.3, 0.2), hyperboloid_point(0.9, 1.4), (1.0, 2.0))
        assert finite_difference_gradient_check(s, 1e-6) < 1e-6

    def test_tangent_and_matches_homogeneous_form(self, three_body_s2, three_body_h2):
        for s in (three_body_s2, three_body_h2):
            g = grad_force_function(s)
            assert np.max(np.abs(inner(s.kappa, s.q, g))) < 1e-12
            np.testing.assert_allclose(g, grad_force_function_homogeneous(s), rtol=1e-11,
                                       atol=1e-12)

    def test_single_body(self):
        s = SystemState.from_arrays(1.0, [1.0], [[0, 0, 1]])
        np.testing.assert_array_equal(grad_force_function(s), np.zeros((1, 3)))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.2, 2.9), st.floats(0.2, 2.9), st.floats(0.3, 6.0))
    def test_homogeneous_degree_zero(self, t1, t2, phi):
        q = np.array([sphere_point(t1, 0.0), sphere_point(t2, phi)])
        m = [1.0, 1.5]
        u = force_function_arrays(1.0, m, q)
        assert force_function_arrays(1.0, m, 3.0 * q) == pytest.approx(u, rel=1e-13, abs=1e-13)


class TestEquationsOfMotion:
    def test_isosceles_initial_accelerations(self):
        s = make_isosceles("8m", np.sqrt(2) / 2)
        a = acceleration(s)
        assert a[1, 0] == pytest.approx(-3 * np.sqrt(2), rel=1e-12)
        assert a[1, 1] == pytest.approx(3 * np.sqrt(2), rel=1e-12)
        assert abs(a[1, 2]) < 1e-14

    @pytest.mark.parametrize("x", [0.3, 0.5, 0.8])
    def test_isosceles_matches_closed_form(self, x):
        y = np.sqrt(1 - x * x)
        M, m = 3.0, 1.0
        s = make_isosceles("custom", x, m, M)
        a = acceleration(s)
        f = M / (4 * y * y) - m
        assert a[1, 0] == pytest.approx(-(y / x ** 2) * f, rel=1e-11)
        assert a[1, 1] == pytest.approx(f / x, rel=1e-11)
        np.testing.assert_allclose(a[2], 0.0, atol=1e-13)

    def test_isosceles_m2_rest_point(self):
        a = acceleration(make_isosceles("2m", np.sqrt(2) / 2))
        assert np.max(np.abs(a)) < 1e-14

    def test_pdot_equals_mass_times_acceleration(self, three_body_s2, three_body_h2):
        for s in (three_body_s2, three_body_h2):
            qdot, pdot = hamiltonian_rhs(s)
            np.testing.assert_allclose(pdot, s.masses[:, None] * acceleration(s), rtol=0,
                                       atol=1e-14)
            np.testing.assert_allclose(qdot, s.velocities)

    @pytest.mark.parametrize("kappa", [1.0, -1.0])
    def test_free_body_constraint_force(self, kappa):
        q = sphere_point(0.7, 0.3) if kappa > 0 else hyperboloid_point(0.7, 0.3)
        s = SystemState.from_arrays(kappa, [2.0], [q], [[0.3, -0.2, 0.1]])
        _, pdot = hamiltonian_rhs(s)
        expected = -kappa * inner(kappa, s.p[0], s.p[0]) / 2.0 * s.q[0]
        np.testing.assert_allclose(pdot[0], expected, atol=1e-15)

    def test_fixed_point_derivatives_vanish(self):
        qdot, pdot = hamiltonian_rhs(fixed_point_tetrahedron())
        assert np.max(np.abs(qdot)) == 0.0
        assert np.max(np.abs(pdot)) < 1e-12

    def test_acceleration_keeps_motion_on_surface(self, three_body_s2, three_body_h2):
        # second derivative of <q,q> = 1/kappa: <q,a> + <v,v> = 0
        for s in (three_body_s2, three_body_h2):
            a = acceleration(s)
            v = s.velocities
            np.testing.assert_allclose(inner(s.kappa, s.q, a) + inner(s.kappa, v, v), 0.0,
                                       atol=1e-13)


class TestFirstIntegrals:
    def test_rest_orthogonal_pair_has_zero_energy(self):
        assert energy(two_bodies(1.0, [1, 0, 0], [0, 1, 0])) == pytest.approx(0.0, abs=1e-16)

    def test_hyperbolic_re_body_momentum(self):
        re = hyperbolic_re(1.0)
        for t in (0.0, 0.7, 2.0):
            q, v, _ = re.motion(t)
            s = SystemState(-1.0, re.masses, q, re.masses[:, None] * v)
            L = angular_momentum_per_body(s)
            assert L[0, 0] == pytest.approx(-re.masses[0] * re.omega, rel=1e-12)

    def test_equilateral_re_momentum_along_z(self):
        c = angular_momentum(lagrangian_re(1.0, 0.3).state)
        assert abs(c[0]) < 1e-14 and abs(c[1]) < 1e-14 and abs(c[2]) > 0.1

    def test_first_integrals_consistent(self, three_body_h2):
        fi = first_integrals(three_body_h2)
        assert fi.energy_h == pytest.approx(fi.kinetic_T - fi.potential_U)
        assert fi.energy_h == pytest.approx(energy(three_body_h2))

    def test_isometry_invariance(self, three_body_h2):
        from curved_nbody.geometry import apply_isometry, isometry_hyperbolic

        moved = apply_isometry(isometry_hyperbolic(0.4), three_body_h2)
        assert energy(moved) == pytest.approx(energy(three_body_h2), rel=1e-12)
