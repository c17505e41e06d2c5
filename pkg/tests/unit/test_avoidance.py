"""
Tests unitarios para las filas C1-C3, el Main QP y la dinámica de los obstáculos
"""
import numpy as np
import pytest

from bwsb.avoidance import (
    AvoidanceGains,
    ObstacleCommand,
    assemble_main_qp,
    main_qp_rows,
    nominal_obstacle_control,
    solve_main_qp,
    step_obstacles,
)
from bwsb.cli.verify import random_safe_configuration
from bwsb.control import ClassKappaFn, build_c1_boundary_row, build_c1_row, build_c2_row, build_c3_row
from bwsb.errors import ConfigurationError, UnsafeConfigurationError
from bwsb.geometry import BallObstacle, BallWorld

pytestmark = pytest.mark.unit


class TestConstraintRows:
    """Tests para los constructores de filas"""

    def setup_method(self):
        self.gamma = ClassKappaFn(1.0)
        self.world = BallWorld((0.0, 0.0), 10.0, (BallObstacle.at_rest((3.0, 0.0), 1.0),))

    def test_c1_row(self):
        """Test C1 con q = (1.5, 0) y q_dot = (10, 0)"""
        row = build_c1_row(self.world.obstacles[0], (1.5, 0.0), (10.0, 0.0), self.gamma)
        np.testing.assert_allclose(row.coefficients, [-3.0, 0.0, 2.0])
        assert row.bound == pytest.approx(-28.75)

    def test_c1_boundary_row(self):
        """Test C1 de la frontera"""
        row = build_c1_boundary_row(self.world, (1.5, 0.0), (10.0, 0.0), self.gamma)
        np.testing.assert_allclose(row.coefficients, [-20.0])
        assert row.bound == pytest.approx(-30.0 + 97.75)

    def test_c2_row(self):
        """Test C2 entre dos bolas separadas"""
        left, right = BallObstacle.at_rest((-2.0, 0.0), 1.0), BallObstacle.at_rest((2.0, 0.0), 1.0)
        row = build_c2_row(left, right, self.gamma)
        np.testing.assert_allclose(row.coefficients, [8.0, 0.0, -8.0, 0.0, 4.0, 4.0])
        assert row.bound == pytest.approx(12.0)

    def test_c3_row(self):
        """Test C3 de contención"""
        row = build_c3_row(self.world.obstacles[0], self.world, self.gamma)
        np.testing.assert_allclose(row.coefficients, [6.0, 0.0, 18.0, -18.0])
        assert row.bound == pytest.approx(72.0)

    def test_c3_needs_larger_boundary(self):
        """Test rho_0 <= rho_i rechazado"""
        world = BallWorld((0.0, 0.0), 10.0, (BallObstacle.at_rest((0.0, 0.0), 10.0),))
        with pytest.raises(ConfigurationError):
            build_c3_row(world.obstacles[0], world, self.gamma)

    def test_row_slack(self):
        """Test holgura b - a^T u"""
        row = build_c1_row(self.world.obstacles[0], (1.5, 0.0), (0.0, 0.0), self.gamma)
        assert row.slack(np.zeros(3)) == pytest.approx(1.25)


class TestMainQp:
    """Tests para el Main QP"""

    def setup_method(self):
        self.gamma = ClassKappaFn(1.0)
        self.gains = AvoidanceGains(kappa=1.0, kp=1.0)

    def test_ball_yields_to_approaching_state(self, single_ball_world):
        """Test la bola retrocede y encoge ante q que se acerca"""
        result = solve_main_qp(single_ball_world, (1.5, 0.0), (10.0, 0.0), self.gains, self.gamma)
        cmd = result.command
        np.testing.assert_allclose(cmd.center_velocity(1), [86.25 / 13.0, 0.0], atol=1e-10)
        assert cmd.radius_rates[1] == pytest.approx(-57.5 / 13.0, abs=1e-10)
        assert cmd.radius_rates[0] == pytest.approx(0.0, abs=1e-12)
        assert result.active == ("C1_1",)
        assert result.max_violation <= 1e-9

    def test_idle_when_far(self, single_ball_world):
        """Test comando nulo sin amenaza y en reposo"""
        result = solve_main_qp(single_ball_world, (-5.0, 0.0), (0.0, 0.0), self.gains, self.gamma)
        np.testing.assert_allclose(result.command.as_vector(), np.zeros(4), atol=1e-12)
        assert result.active == ()

    def test_row_order_and_labels(self):
        """Test orden C1, C1 frontera, C2, C3"""
        world = BallWorld((0.0, 0.0), 10.0, (BallObstacle.at_rest((3.0, 0.0), 1.0),
                                            BallObstacle.at_rest((-3.0, 0.0), 1.0)))
        labels = [row.label for row in main_qp_rows(world, (0.0, 5.0), (0.0, 0.0), self.gamma)]
        assert labels == ["C1_1", "C1_2", "C1_0", "C2_1_2", "C3_1", "C3_2"]

    def test_decision_vector_layout(self, single_ball_world):
        """Test z = (u_q1, u_rho_0, u_rho_1) y pesos kappa"""
        qp = assemble_main_qp(single_ball_world, (0.0, 5.0), (0.0, 0.0), AvoidanceGains(kappa=3.0), self.gamma)
        assert qp.n_variables == 4
        np.testing.assert_allclose(np.diag(qp.hessian), [2.0, 2.0, 6.0, 6.0])

    def test_unsafe_configuration_rejected(self, single_ball_world):
        """Test q dentro de una bola"""
        with pytest.raises(UnsafeConfigurationError) as exc_info:
            solve_main_qp(single_ball_world, (3.2, 0.0), (0.0, 0.0), self.gains, self.gamma)
        assert exc_info.value.barrier == "ball_beta_1"

    def test_always_feasible_on_safe_configurations(self, rng):
        """Test factibilidad y filas certificadas en configuraciones aleatorias"""
        for _ in range(200):
            world, q, qdot = random_safe_configuration(rng)
            result = solve_main_qp(world, q, qdot, self.gains, self.gamma)
            assert result.solution.optimal
            assert result.max_violation <= 1e-9

    def test_invalid_gains(self):
        """Test ganancias no positivas"""
        with pytest.raises(ConfigurationError):
            AvoidanceGains(kappa=0.0)


class TestObstacleDynamics:
    """Tests para el control nominal y la integración de los obstáculos"""

    def setup_method(self):
        self.world = BallWorld((0.0, 0.0), 10.0, (BallObstacle.at_rest((3.0, 0.0), 1.0),))

    def test_nominal_returns_to_rest(self):
        """Test control proporcional hacia la configuración inicial"""
        moved = self.world.with_state([np.array([4.0, 1.0])], [0.5], 12.0)
        cmd = nominal_obstacle_control(moved, AvoidanceGains(kp=2.0))
        np.testing.assert_allclose(cmd.center_velocity(1), [-2.0, -2.0])
        np.testing.assert_allclose(cmd.radius_rates, [-4.0, 1.0])

    def test_euler_step(self):
        """Test paso de Euler de centros y radios"""
        cmd = ObstacleCommand(np.array([1.0, -2.0]), np.array([0.5, -1.0]))
        new = step_obstacles(self.world, cmd, 0.1)
        np.testing.assert_allclose(new.obstacles[0].center, [3.1, -0.2])
        assert new.obstacles[0].radius == pytest.approx(0.9)
        assert new.boundary_radius == pytest.approx(10.05)
        assert np.array_equal(new.obstacles[0].initial_center, self.world.obstacles[0].initial_center)

    def test_radius_floor_event(self):
        """Test radio mínimo registrado como evento"""
        events = []
        cmd = ObstacleCommand(np.zeros(2), np.array([0.0, -1000.0]))
        new = step_obstacles(self.world, cmd, 0.01, events=events, step=7, radius_floor=1e-3)
        assert new.obstacles[0].radius == 1e-3
        assert events == [{"kind": "radius_floor", "step": 7, "obstacle": 1}]

    def test_boundary_cap_event(self):
        """Test tope de crecimiento de la frontera"""
        events = []
        cmd = ObstacleCommand(np.zeros(2), np.array([1e6, 0.0]))
        new = step_obstacles(self.world, cmd, 1.0, events=events, step=3, growth_cap=100.0)
        assert new.boundary_radius == pytest.approx(1000.0)
        assert events == [{"kind": "boundary_cap", "step": 3}]

    def test_command_size_mismatch(self):
        """Test comando para otro número de obstáculos"""
        cmd = ObstacleCommand(np.zeros(4), np.zeros(3))
        with pytest.raises(ConfigurationError):
            step_obstacles(self.world, cmd, 0.1)

    def test_non_finite_command(self):
        """Test comando no finito"""
        with pytest.raises(ConfigurationError):
            ObstacleCommand(np.array([np.nan, 0.0]), np.zeros(2))
