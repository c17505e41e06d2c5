"""
Tests end-to-end: escenarios completos y suites de propiedades con el presupuesto completo
"""
import math

import numpy as np
import pytest

from bwsb.cli import PropertyVerifier, random_safe_configuration
from bwsb.avoidance import AvoidanceGains, solve_main_qp
from bwsb.control import ClassKappaFn
from bwsb.optimization import enumerate_active_sets, kkt_residual, random_qp, solve_qp
from bwsb.simulation import EquilibriumClass, get_builtin, run_scenario

pytestmark = [pytest.mark.e2e, pytest.mark.slow]

SAFE = -1e-6
# cima del obstáculo de dos lóbulos centrado en (0, 3)
LOBE_TOP = 3.0 + math.sqrt(0.21)


def _assert_safe(logs):
    for log in logs:
        assert not log.failed, log.events
        assert log.summary.error is None
        assert log.summary.min_real_barrier >= SAFE
        if not math.isnan(log.summary.min_ball_barrier):
            assert log.summary.min_ball_barrier >= SAFE


def _only(name, index):
    scenario = get_builtin(name)
    return scenario.with_overrides(initial_states=(scenario.initial_states[index],))


class TestStandardFilter:
    """Equilibrios indeseados del filtro CBF-QP estándar"""

    def test_circle_obstacle_stops_on_top(self):
        """Test el estado se detiene en (0, 4) sobre el círculo"""
        log, = run_scenario(get_builtin("fig1-right"))
        assert log.summary.outcome is EquilibriumClass.UNDESIRED
        np.testing.assert_allclose(log.summary.final_state, [0.0, 4.0], atol=1e-2)
        _assert_safe([log])

    def test_funnel_vertex(self):
        """Test ambos estados terminan en el vértice del embudo"""
        logs = run_scenario(get_builtin("fig1-left"))
        for log in logs:
            assert log.summary.outcome is EquilibriumClass.UNDESIRED
            assert log.barrier_series("h_funnel")[-1] <= 1e-3
            np.testing.assert_allclose(log.summary.final_state, [0.0, 3.0], atol=0.05)
        _assert_safe(logs)

    def test_two_lobes_trap_axis_start(self):
        """Test el arranque sobre el eje queda en la cima entre los lóbulos"""
        log, = run_scenario(_only("fig3-right-standard", 3))
        assert log.summary.outcome is EquilibriumClass.UNDESIRED
        np.testing.assert_allclose(log.summary.final_state, [0.0, LOBE_TOP], atol=0.05)
        _assert_safe([log])


class TestBallWorldAvoidance:
    """
    Evasión por estados en el mundo de bolas. Fuera del eje el resultado depende
    sensiblemente de los parámetros (la bola puede huir de q sin dejar pasar al estado),
    así que solo se fija lo robusto: seguridad en todos los arranques y deadlock sobre el eje.
    """

    def test_two_obstacles_stay_safe(self):
        """Test los siete arranques terminan sin error y sin incursiones"""
        logs = run_scenario(get_builtin("fig3-right"), workers=4)
        _assert_safe(logs)
        assert all(log.summary.steps > 0 for log in logs)

    def test_two_obstacles_axis_start_deadlocks(self):
        """Test el arranque en (0, 6) se detiene sobre la cima del obstáculo superior"""
        log, = run_scenario(_only("fig3-right", 3))
        _assert_safe([log])
        assert log.summary.outcome is EquilibriumClass.UNDESIRED
        assert abs(log.summary.final_state[0]) < 0.05
        assert LOBE_TOP - 1e-6 < log.summary.final_state[1] < LOBE_TOP + 0.05

    def test_single_obstacle(self):
        """Test deadlock en x1 = 0 y convergencia desde x1 = +-0.3"""
        logs = run_scenario(get_builtin("fig3-left"), workers=4)
        _assert_safe(logs)
        assert logs[0].summary.outcome is EquilibriumClass.UNDESIRED
        assert logs[0].summary.final_state[1] > LOBE_TOP - 1e-6
        assert logs[3].summary.converged
        assert logs[4].summary.converged

    def test_unicycle_navigation(self):
        """Test el punto adelantado del unicycle nunca entra en los obstáculos"""
        logs = run_scenario(get_builtin("unicycle-nav"))
        _assert_safe(logs)
        assert logs[2].summary.converged, logs[2].summary.final_state

class TestPropertySuites:
    """Suites de propiedades con el presupuesto completo"""

    def test_qp_oracle_thousand_instances(self):
        """Test 1000 QPs aleatorios contra la enumeración"""
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            qp = random_qp(rng)
            sol = solve_qp(qp)
            reference = enumerate_active_sets(qp)
            assert abs(qp.objective(sol.z) - qp.objective(reference.z)) <= 1e-7 * (1.0 + abs(qp.objective(sol.z)))
            assert kkt_residual(qp, sol) < 1e-6

    def test_main_qp_thousand_configurations(self):
        """Test factibilidad del Main QP en 1000 configuraciones seguras"""
        rng = np.random.default_rng(7)
        gains, gamma = AvoidanceGains(), ClassKappaFn(1.0)
        for _ in range(1000):
            world, q, qdot = random_safe_configuration(rng)
            result = solve_main_qp(world, q, qdot, gains, gamma)
            assert result.max_violation <= 1e-9

    def test_full_verifier(self):
        """Test todas las suites sobre el mundo de dos lóbulos"""
        assert PropertyVerifier(get_builtin("fig3-right"), quiet=True).run() is True
