"""
Tests unitarios para barreras de control y el filtro CBF-QP estándar
"""
import numpy as np
import pytest

from bwsb.control import (
    ClassKappaFn,
    ControlAffineSystem,
    build_c1_boundary_row,
    build_c1_row,
    build_c2_row,
    build_c3_row,
    cbf_constraint_value,
    central_difference_gradient,
    circle_barrier,
    funnel_barrier,
    standard_filter,
    star_barrier,
)
from bwsb.errors import ConfigurationError, DimensionMismatchError, FilterFailureError
from bwsb.geometry import (BallObstacle, BallWorld, StarObstacle, beta_ball, beta_boundary, containment_margin,
                           pair_separation)

pytestmark = pytest.mark.unit


class TestControlAffineSystem:
    """Tests para x_dot = f(x) + g(x) u"""

    def test_linear_system(self):
        """Test sistema lineal con B = I"""
        sys = ControlAffineSystem.linear([[-6.0, 0.0], [0.0, -1.0]])
        np.testing.assert_allclose(sys.dynamics([1.0, 2.0], [0.5, 0.5]), [-5.5, -1.5])
        assert sys.input_dim == 2

    def test_custom_input_matrix(self):
        """Test entrada escalar"""
        sys = ControlAffineSystem.linear(np.zeros((2, 2)), [[1.0], [0.0]])
        assert sys.input_dim == 1
        np.testing.assert_allclose(sys.dynamics([0.0, 0.0], [2.0]), [2.0, 0.0])

    def test_non_square_drift(self):
        """Test matriz de deriva no cuadrada"""
        with pytest.raises(DimensionMismatchError):
            ControlAffineSystem.linear(np.zeros((2, 3)))


class TestBarriers:
    """Tests para las barreras incluidas"""

    def test_circle_barrier(self):
        """Test h = ||x - c||^2 - r^2 y su gradiente"""
        h = circle_barrier((0.0, 3.0), 1.0)
        assert h((0.0, 4.5)) == pytest.approx(1.25)
        np.testing.assert_allclose(h.gradient((0.0, 4.5)), [0.0, 3.0])

    def test_funnel_gradient_matches_finite_differences(self):
        """Test gradiente analítico del embudo"""
        h = funnel_barrier((0.0, 3.0), ((10.0, 0.0), (0.0, -1.0)))
        for x in ((0.5, 6.0), (-1.0, 5.5), (0.3, 2.0)):
            numeric = central_difference_gradient(h.value, np.array(x))
            np.testing.assert_allclose(h.gradient(x), numeric, rtol=1e-6, atol=1e-6)

    def test_zero_step_scale(self):
        """Test step_scale = 0 explícito"""
        with pytest.raises(ConfigurationError):
            central_difference_gradient(lambda x: float(x @ x), np.array([1.0, 2.0]), step_scale=0.0)

    def test_funnel_vertex(self):
        """Test h = 0 en el vértice del embudo"""
        h = funnel_barrier((0.0, 3.0))
        assert h((0.0, 3.0)) == 0.0

    def test_star_barrier_uses_level_set(self):
        """Test barrera de un obstáculo estrella"""
        obstacle = StarObstacle.two_lobe((0.0, 3.0))
        h = star_barrier(obstacle, name="star_1")
        assert h.name == "star_1"
        assert h((0.0, 6.0)) == pytest.approx(float(obstacle.level_set((0.0, 6.0))))
        assert h.gradient((0.0, 6.0))[1] > 0

    def test_vectorized_value(self):
        """Test evaluación de la barrera sobre una malla"""
        h = circle_barrier((0.0, 0.0), 1.0)
        grid = np.zeros((2, 3, 2))
        assert h.value(grid).shape == (2, 3)

    def test_class_kappa(self):
        """Test gamma(s) = alpha s"""
        assert ClassKappaFn(2.0)(1.5) == 3.0
        with pytest.raises(ConfigurationError):
            ClassKappaFn(0.0)


class TestStandardFilter:
    """Tests para el filtro CBF-QP"""

    def setup_method(self):
        self.sys = ControlAffineSystem.linear([[-6.0, 0.0], [0.0, -1.0]])
        self.h = circle_barrier((0.0, 3.0), 1.0)
        self.gamma = ClassKappaFn(1.0)

    def test_nominal_returned_when_safe(self):
        """Test u_hat sin cambios si cumple la condición"""
        u_hat = np.array([0.3, -0.2])
        u = standard_filter(self.sys, self.h, self.gamma, (0.0, 1.0), u_hat)
        np.testing.assert_array_equal(u, u_hat)

    def test_filtered_input(self):
        """Test proyección sobre la condición CBF en x = (0, 4.5)"""
        u = standard_filter(self.sys, self.h, self.gamma, (0.0, 4.5), np.zeros(2))
        np.testing.assert_allclose(u, [0.0, 12.25 / 3.0], atol=1e-12)
        assert cbf_constraint_value(self.sys, self.h, self.gamma, (0.0, 4.5), u) == pytest.approx(0.0, abs=1e-10)

    def test_several_barriers(self):
        """Test todas las condiciones se cumplen con varias barreras"""
        barriers = [self.h, circle_barrier((2.0, 4.5), 1.0)]
        x = (0.5, 4.5)
        u = standard_filter(self.sys, barriers, self.gamma, x, np.zeros(2))
        for barrier in barriers:
            assert cbf_constraint_value(self.sys, barrier, self.gamma, x, u) >= -1e-9

    def test_infeasible_filter(self):
        """Test L_g h = 0 con condición violada"""
        sys = ControlAffineSystem.linear([[-6.0, 0.0], [0.0, -1.0]], [[1.0], [0.0]])
        with pytest.raises(FilterFailureError):
            standard_filter(sys, self.h, self.gamma, (0.0, 4.5), np.zeros(1))

    def test_wrong_input_dimension(self):
        """Test u_hat de dimensión incorrecta"""
        with pytest.raises(DimensionMismatchError):
            standard_filter(self.sys, self.h, self.gamma, (0.0, 4.5), np.zeros(3))


def _rate(barrier, t: float = 1e-3) -> float:
    """Derivada en t = 0 de una barrera cuadrática en t (diferencia central exacta)"""
    return (barrier(t) - barrier(-t)) / (2.0 * t)


class TestConstraintRowIdentity:
    """a^T u - b = -(h_dot(u) + gamma(h)) para cada constructor, con u aleatorio"""

    def setup_method(self):
        self.rng = np.random.default_rng(11)

    def _gamma(self):
        return ClassKappaFn(float(self.rng.uniform(0.2, 5.0)))

    def test_literal_c1_example(self):
        """Test q_i = (2, 0), q = 0, rho_i = 1, q_dot = (1, 0), gamma = identidad"""
        row = build_c1_row(BallObstacle.at_rest((2.0, 0.0), 1.0), (0.0, 0.0), (1.0, 0.0), ClassKappaFn(1.0))
        np.testing.assert_array_equal(row.coefficients, [-4.0, 0.0, 2.0])
        assert row.bound == -1.0

    def test_literal_boundary_example(self):
        """Test q_0 = 0, rho_0 = 5, q = (3, 0), q_dot = (1, 0)"""
        world = BallWorld((0.0, 0.0), 5.0)
        row = build_c1_boundary_row(world, (3.0, 0.0), (1.0, 0.0), ClassKappaFn(1.0))
        np.testing.assert_array_equal(row.coefficients, [-10.0])
        assert row.bound == 10.0

    def test_c1_identity(self):
        """Test obstáculo i contra q en movimiento"""
        for _ in range(50):
            center, q = self.rng.uniform(-5, 5, 2), self.rng.uniform(-5, 5, 2)
            radius = float(self.rng.uniform(0.1, 2.0))
            qdot, u = self.rng.normal(size=2) * 3, self.rng.normal(size=3) * 3
            gamma = self._gamma()
            ball = BallObstacle.at_rest(center, radius)
            row = build_c1_row(ball, q, qdot, gamma)
            h = lambda t: beta_ball(BallObstacle.at_rest(center + t * u[:2], radius + t * u[2]), q + t * qdot)
            expected = -(_rate(h) + gamma(h(0.0)))
            assert float(row.coefficients @ u) - row.bound == pytest.approx(expected, abs=1e-10)

    def test_c1_boundary_identity(self):
        """Test frontera con radio variable"""
        for _ in range(50):
            q = self.rng.uniform(-3, 3, 2)
            rho0 = float(self.rng.uniform(5.0, 9.0))
            qdot, u = self.rng.normal(size=2) * 3, self.rng.normal(size=1) * 3
            gamma = self._gamma()
            row = build_c1_boundary_row(BallWorld((0.5, -0.5), rho0), q, qdot, gamma)
            h = lambda t: beta_boundary(BallWorld((0.5, -0.5), rho0 + t * u[0]), q + t * qdot)
            expected = -(_rate(h) + gamma(h(0.0)))
            assert float(row.coefficients @ u) - row.bound == pytest.approx(expected, abs=1e-10)

    def test_c2_identity(self):
        """Test par de obstáculos moviéndose y cambiando de radio"""
        for _ in range(50):
            ci, cj = self.rng.uniform(-5, 5, 2), self.rng.uniform(-5, 5, 2)
            ri, rj = self.rng.uniform(0.1, 1.5, 2)
            u = self.rng.normal(size=6) * 3
            gamma = self._gamma()
            row = build_c2_row(BallObstacle.at_rest(ci, ri), BallObstacle.at_rest(cj, rj), gamma)
            h = lambda t: pair_separation(BallObstacle.at_rest(ci + t * u[0:2], ri + t * u[4]),
                                          BallObstacle.at_rest(cj + t * u[2:4], rj + t * u[5]))
            expected = -(_rate(h) + gamma(h(0.0)))
            assert float(row.coefficients @ u) - row.bound == pytest.approx(expected, abs=1e-10)

    def test_c3_identity(self):
        """Test obstáculo contenido en la frontera"""
        for _ in range(50):
            center = self.rng.uniform(-3, 3, 2)
            radius, rho0 = float(self.rng.uniform(0.1, 1.5)), float(self.rng.uniform(6.0, 9.0))
            u = self.rng.normal(size=4) * 3
            gamma = self._gamma()
            row = build_c3_row(BallObstacle.at_rest(center, radius), BallWorld((0.0, 0.0), rho0), gamma)
            h = lambda t: containment_margin(BallObstacle.at_rest(center + t * u[0:2], radius + t * u[2]),
                                             BallWorld((0.0, 0.0), rho0 + t * u[3]))
            expected = -(_rate(h) + gamma(h(0.0)))
            assert float(row.coefficients @ u) - row.bound == pytest.approx(expected, abs=1e-10)
