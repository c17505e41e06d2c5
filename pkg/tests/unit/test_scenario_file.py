"""
Tests unitarios para los archivos de escenario TOML
"""
from pathlib import Path

import pytest

from bwsb.cli.scenario_file import load_scenario_file, parse_scenario_text, resolve_scenario
from bwsb.errors import ScenarioValidationError
from bwsb.simulation import ControllerKind, SystemKind, builtin_scenarios

pytestmark = pytest.mark.unit

SCENARIO_DIR = Path(__file__).resolve().parents[2] / "scenarios"

SCENARIO_FIELDS = ("initial_states", "system", "controller", "drift_matrix", "nominal_gain", "lookahead",
                   "initial_headings", "workspace_radius", "obstacles", "barriers", "goal", "sharpness",
                   "level_scale", "goal_scale", "alpha", "kappa", "kp", "dt", "horizon", "deadlock_window",
                   "velocity_threshold", "goal_radius", "description")


class TestParseScenario:
    """Tests para el parser y la validación"""

    def test_minimal_document(self, scenario_text):
        """Test documento mínimo con valores por defecto"""
        scenario = parse_scenario_text(scenario_text).to_scenario()
        assert scenario.name == "tiny"
        assert scenario.initial_states == ((0.0, 6.0),)
        assert scenario.controller is ControllerKind.MAIN_QP
        assert scenario.system is SystemKind.LINEAR
        assert scenario.obstacles[0].radius == 1.0
        assert scenario.steps == 5

    def test_output_defaults(self, scenario_text):
        """Test todas las salidas activas por defecto"""
        output = parse_scenario_text(scenario_text).output
        assert output.csv and output.svg and output.summary

    def test_empty_initial_states_line(self):
        """Test lista vacía de estados iniciales con su línea"""
        text = 'name = "bad"\n\n[simulation]\ndt = 0.01\ninitial_states = []\n'
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text(text)
        assert exc_info.value.line == 5
        assert "initial_states" in str(exc_info.value)

    def test_unknown_key_line(self, scenario_text):
        """Test clave desconocida rechazada"""
        text = scenario_text + "\n[gains]\nkappa = 1.0\nspeed = 2.0\n"
        line = text.splitlines().index("speed = 2.0") + 1
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text(text)
        assert exc_info.value.line == line

    def test_bad_kind_in_second_obstacle(self, scenario_text):
        """Test error en el segundo elemento de una lista de tablas"""
        text = scenario_text + '\n[[world.obstacles]]\nkind = "square"\ncenter = [0.0, -3.0]\n'
        line = text.splitlines().index('kind = "square"') + 1
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text(text)
        assert exc_info.value.line == line
        assert "world.obstacles.1.kind" in str(exc_info.value)

    def test_negative_time_step(self):
        """Test dt no positivo"""
        text = 'name = "bad"\n[simulation]\ninitial_states = [[0.0, 6.0]]\ndt = -0.1\n'
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text(text)
        assert exc_info.value.line == 4

    def test_missing_simulation_section(self):
        """Test sección simulation obligatoria"""
        with pytest.raises(ScenarioValidationError):
            parse_scenario_text('name = "bad"\n')

    def test_toml_syntax_error(self):
        """Test error de sintaxis con su línea"""
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text('name = "x"\n\n[simulation\n')
        assert exc_info.value.line == 3

    def test_scenario_level_error(self):
        """Test filtro estándar sin barreras"""
        text = 'name = "bad"\n[controller]\nkind = "standard-cbf-qp"\n[simulation]\ninitial_states = [[0.0, 6.0]]\n'
        document = parse_scenario_text(text)
        with pytest.raises(ScenarioValidationError):
            document.to_scenario()

    def test_standard_barriers(self):
        """Test barreras del filtro estándar"""
        text = ('name = "funnel"\n[controller]\nkind = "standard-cbf-qp"\n'
                '[[controller.barriers]]\nkind = "funnel"\ncenter = [0.0, 3.0]\n'
                '[simulation]\ninitial_states = [[0.5, 6.0]]\n')
        scenario = parse_scenario_text(text).to_scenario()
        assert scenario.barriers[0].kind == "funnel"
        assert scenario.barrier_functions()[0].name == "funnel"

    def test_literal_switches_by_default(self, scenario_text):
        """Test sin escalas en [diffeo] el mapa usa la fórmula literal"""
        scenario = parse_scenario_text(scenario_text).to_scenario()
        assert scenario.level_scale is None and scenario.goal_scale is None
        assert not scenario.diffeo().params.normalized

    def test_switch_scales(self, scenario_text):
        """Test level_scale y goal_scale llegan a los parámetros del mapa"""
        text = scenario_text + "\n[diffeo]\nsharpness = 100.0\nlevel_scale = 100.0\ngoal_scale = 1.0\n"
        params = parse_scenario_text(text).to_scenario().diffeo().params
        assert params.level_scale == 100.0 and params.goal_scale == 1.0
        assert params.normalized

    def test_zero_level_scale_line(self, scenario_text):
        """Test escala nula rechazada con su línea"""
        text = scenario_text + "\n[diffeo]\nlevel_scale = 0.0\n"
        line = text.splitlines().index("level_scale = 0.0") + 1
        with pytest.raises(ScenarioValidationError) as exc_info:
            parse_scenario_text(text)
        assert exc_info.value.line == line


class TestResolveScenario:
    """Tests para la resolución de archivos y nombres"""

    def test_builtin_name(self):
        """Test nombre de un escenario incluido"""
        scenario, output = resolve_scenario("fig1-right")
        assert scenario.name == "fig1-right"
        assert output.csv

    def test_file_path(self, tmp_path, scenario_text):
        """Test ruta a un archivo"""
        path = tmp_path / "tiny.toml"
        path.write_text(scenario_text, encoding="utf-8")
        scenario, _ = resolve_scenario(str(path))
        assert scenario.name == "tiny"

    def test_unknown_reference(self):
        """Test ni archivo ni escenario incluido"""
        with pytest.raises(ScenarioValidationError):
            resolve_scenario("does-not-exist")

    @pytest.mark.parametrize("name", ["fig1-left", "fig1-right", "fig3-left", "fig3-right", "unicycle-nav"])
    def test_shipped_files_match_builtins(self, name):
        """Test los TOML incluidos describen los escenarios incluidos"""
        scenario = load_scenario_file(SCENARIO_DIR / f"{name}.toml").to_scenario()
        builtin = builtin_scenarios()[name]
        for field in SCENARIO_FIELDS:
            assert getattr(scenario, field) == getattr(builtin, field), field
