"""
Tests de integración para la línea de comandos y sus salidas
"""
import json

import numpy as np
import pytest

from bwsb.cli import (
    PropertyVerifier,
    VerifyBudget,
    main,
    read_trajectory_csv,
    render_svg,
    summary_frame,
    trajectory_frame,
    write_trajectory_csv,
)
from bwsb.cli.svg_plot import marching_squares, sample_grid
from bwsb.simulation import ObstacleSpec, Scenario, get_builtin, run_trajectory

pytestmark = pytest.mark.integration

SMALL_BUDGET = VerifyBudget(qp_instances=50, main_qp_configurations=50, boundary_points=24,
                            sweep_points=200, round_trips=20, jacobian_points=20)


class TestCommandLine:
    """Tests para los subcomandos y códigos de salida"""

    def test_scenarios_command(self, capsys):
        """Test listado de escenarios incluidos"""
        assert main(["scenarios"]) == 0
        out = capsys.readouterr().out
        assert "fig3-right" in out
        assert "unicycle-nav" in out

    def test_usage_error(self):
        """Test subcomando desconocido"""
        assert main(["dance"]) == 2
        assert main(["run", "--scenario", "fig3-right"]) == 2

    def test_invalid_scenario_file(self, tmp_path, capsys):
        """Test archivo inválido: código 2 con la línea del error"""
        path = tmp_path / "bad.toml"
        path.write_text('name = "bad"\n\n[simulation]\ndt = 0.01\ninitial_states = []\n', encoding="utf-8")
        assert main(["--quiet", "run", "--scenario", str(path), "--out", str(tmp_path / "out")]) == 2
        assert "line 5" in capsys.readouterr().err

    def test_unknown_scenario(self, tmp_path):
        """Test referencia desconocida"""
        assert main(["run", "--scenario", "no-such-thing", "--out", str(tmp_path)]) == 2

    def test_unsafe_initial_state(self, tmp_path, capsys):
        """Test estado inicial dentro de un obstáculo: código 1 sin simular"""
        path = tmp_path / "unsafe.toml"
        path.write_text('name = "unsafe"\n[simulation]\ninitial_states = [[0.0, 3.0]]\n'
                        '[[world.obstacles]]\nkind = "circle"\ncenter = [0.0, 3.0]\nradius = 1.0\n',
                        encoding="utf-8")
        out_dir = tmp_path / "out"
        assert main(["--quiet", "run", "--scenario", str(path), "--out", str(out_dir)]) == 1
        assert "unsafe initial states [0]" in capsys.readouterr().err
        assert not out_dir.exists()

    def test_run_without_filter(self, tmp_path):
        """Test escenario sin filtro: converge pero atraviesa el obstáculo"""
        assert main(["--quiet", "run", "--scenario", "fig3-right-none", "--out", str(tmp_path)]) == 0
        csv_files = sorted(tmp_path.glob("trajectory_*.csv"))
        assert [p.name for p in csv_files] == [f"trajectory_{k:03d}.csv" for k in range(7)]
        assert (tmp_path / "summary.csv").exists()
        assert (tmp_path / "fig3-right-none.svg").exists()

        frame = read_trajectory_csv(csv_files[0])
        assert frame["real_incursion"].any()
        assert not frame["ball_incursion"].any()
        assert frame["q1"].isna().all()

        summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
        assert summary["controller"] == "none"
        assert len(summary["trajectories"]) == 7
        assert all(t["outcome"] == "desired" for t in summary["trajectories"])
        assert all(t["min_ball_barrier"] is None for t in summary["trajectories"])

    def test_output_section_disables_files(self, tmp_path):
        """Test la sección output controla qué se escribe"""
        path = tmp_path / "quiet.toml"
        path.write_text('name = "quiet"\n[controller]\nkind = "none"\n'
                        '[simulation]\ndt = 0.01\nhorizon = 0.1\ninitial_states = [[0.0, 6.0]]\n'
                        '[output]\ncsv = false\nsvg = false\n', encoding="utf-8")
        out_dir = tmp_path / "out"
        assert main(["--quiet", "run", "--scenario", str(path), "--out", str(out_dir)]) == 0
        assert (out_dir / "summary.csv").exists()
        assert not list(out_dir.glob("trajectory_*.csv"))
        assert not list(out_dir.glob("*.svg"))


class TestReports:
    """Tests para CSV, resumen y SVG"""

    def setup_method(self):
        self.scenario = get_builtin("fig3-right").with_overrides(horizon=0.1, initial_states=((1.0, 6.0),))
        self.log = run_trajectory(self.scenario, 0)

    def test_trajectory_columns(self):
        """Test columnas del CSV por paso"""
        frame = trajectory_frame(self.log, 2)
        for column in ("t", "x1", "x2", "u1", "xdot1", "q1", "qdot2", "beta_0", "beta_2", "ball_beta_1",
                       "ball_h_1_2", "world_rho_0", "world_q2_1", "world_rho_2", "active", "event",
                       "real_incursion", "ball_incursion"):
            assert column in frame.columns
        assert len(frame) == len(self.log.records) == 11
        assert not frame["real_incursion"].any()

    def test_csv_round_trip(self, tmp_path):
        """Test el CSV conserva los floats exactamente"""
        path = write_trajectory_csv(self.log, 2, tmp_path / "trajectory_000.csv")
        written = trajectory_frame(self.log, 2)
        read = read_trajectory_csv(path)
        assert list(read.columns) == list(written.columns)
        numeric = written.select_dtypes(include="number").columns
        assert np.array_equal(read[numeric].to_numpy(dtype=float), written[numeric].to_numpy(dtype=float),
                              equal_nan=True)
        assert read["active"].tolist() == written["active"].tolist()

    def test_summary_frame(self):
        """Test una fila por estado inicial"""
        frame = summary_frame([self.log])
        assert frame.loc[0, "x0_1"] == 1.0
        assert frame.loc[0, "steps"] == 10
        assert frame.loc[0, "error"] == ""

    def test_svg_is_deterministic(self):
        """Test mismo escenario y mismos logs: mismos bytes"""
        first = render_svg(self.scenario, [self.log], resolution=60)
        second = render_svg(self.scenario, [self.log], resolution=60)
        assert first == second
        assert first.startswith("<svg")
        assert 'id="real-world"' in first and 'id="ball-world"' in first

    def test_svg_without_ball_world(self):
        """Test panel del mundo de bolas vacío sin Main QP"""
        scenario = get_builtin("fig1-right").with_overrides(horizon=0.05)
        svg = render_svg(scenario, [run_trajectory(scenario, 0)], resolution=40)
        assert "sin mundo de bolas" in svg

    def test_marching_squares_circle(self):
        """Test contorno de un círculo unidad"""
        xs, ys, values = sample_grid(lambda p: np.sum(p * p, axis=-1) - 1.0, (-2.0, 2.0, -2.0, 2.0), 81)
        segments = marching_squares(xs, ys, values)
        assert segments
        radii = [np.linalg.norm(p) for segment in segments for p in segment]
        assert max(abs(r - 1.0) for r in radii) < 0.01


class TestVerifier:
    """Tests para las suites de propiedades"""

    def test_overlapping_obstacles_fail_safe_start(self):
        """Test círculos superpuestos"""
        scenario = Scenario(name="overlap", initial_states=((0.0, 6.0),),
                            obstacles=(ObstacleSpec("circle", (2.0, 2.0), radius=1.0),
                                       ObstacleSpec("circle", (3.0, 2.0), radius=1.0)))
        verifier = PropertyVerifier(scenario, quiet=True)
        assert verifier.check_safe_start() is False
        assert verifier.results["star obstacles pairwise disjoint and inside the workspace"] is False

    def test_small_budget_run(self, capsys):
        """Test todas las suites sobre el mundo de dos lóbulos"""
        verifier = PropertyVerifier(get_builtin("fig3-right"), seed=3, budget=SMALL_BUDGET, quiet=True)
        assert verifier.run() is True
        assert "0 failed" in capsys.readouterr().out

    @pytest.mark.slow
    def test_verify_command(self, capsys):
        """Test subcomando verify sobre un escenario sin obstáculos"""
        assert main(["--quiet", "verify", "--scenario", "fig1-right", "--seed", "1"]) == 0
        assert "fig1-right" in capsys.readouterr().out

    def test_low_sharpness_fails_loudly(self, capsys):
        """Test lambda = 0.01: los interruptores dejan de ser una partición de la unidad"""
        scenario = get_builtin("fig3-right").with_overrides(sharpness=0.01)
        verifier = PropertyVerifier(scenario, seed=3, budget=SMALL_BUDGET, quiet=True)
        assert verifier.run() is False
        assert verifier.results["switches form a partition of unity"] is False
        out = capsys.readouterr().out
        assert "❌ switches form a partition of unity" in out
        assert verifier.checks_failed > 0

    def test_literal_switches_are_reported(self, capsys):
        """Test con interruptores normalizados se informa sobre la fórmula literal sin fallar"""
        verifier = PropertyVerifier(get_builtin("fig3-right"), seed=3, budget=SMALL_BUDGET, quiet=True)
        assert verifier.run() is True
        assert "literal switch formula is not a diffeomorphism on this world" in verifier.notices
        out = capsys.readouterr().out
        assert "⚠️  literal switch formula" in out
        assert "1 notices" in out

    def test_literal_scenario_has_no_notice(self):
        """Test sin escalas no hay mapa alternativo que informar"""
        scenario = get_builtin("fig3-right").with_overrides(level_scale=None, goal_scale=None)
        verifier = PropertyVerifier(scenario, seed=3, budget=SMALL_BUDGET, quiet=True)
        verifier.check_diffeomorphism()
        assert verifier.notices == {}
