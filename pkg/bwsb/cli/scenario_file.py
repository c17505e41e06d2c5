"""
Archivos de escenario en TOML

El documento se valida completo con pydantic antes de cualquier cálculo; las claves
desconocidas se rechazan y los errores se reportan con el número de línea del
elemento que falla.
"""
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..config import settings
from ..errors import ConfigurationError, ScenarioValidationError
from ..simulation import BarrierSpec, ControllerKind, ObstacleSpec, Scenario, SystemKind, builtin_scenarios

Pair = Tuple[float, float]
Matrix = Tuple[Pair, Pair]

_DECODE_LINE = re.compile(r"\(at line (\d+)")
_TABLE_HEADER = re.compile(r"^\s*(\[\[?)\s*([A-Za-z0-9_.\-\s]+?)\s*\]\]?\s*(#.*)?$")
_KEY_LINE = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SystemSection(StrictModel):
    kind: Literal["linear", "unicycle"] = "linear"
    drift_matrix: Matrix = ((-6.0, 0.0), (0.0, -1.0))
    nominal_gain: float = 0.0
    lookahead: float = Field(default=0.1, gt=0)


class BarrierSection(StrictModel):
    kind: Literal["funnel", "circle", "star"]
    center: Pair = (0.0, 3.0)
    radius: float = Field(default=1.0, gt=0)
    matrix: Matrix = ((10.0, 0.0), (0.0, -1.0))
    obstacle: int = Field(default=1, ge=1)


class ControllerSection(StrictModel):
    kind: Literal["none", "standard-cbf-qp", "ball-world-main-qp"] = "ball-world-main-qp"
    alpha: float = Field(default_factory=lambda: settings.CBF_ALPHA, gt=0)
    barriers: List[BarrierSection] = Field(default_factory=list)


class ObstacleSection(StrictModel):
    kind: Literal["circle", "two-lobe"]
    center: Pair
    radius: Optional[float] = Field(default=None, gt=0)
    a: float = Field(default=1.0, ge=0)
    b: float = Field(default=1.1, gt=0)


class WorldSection(StrictModel):
    workspace_radius: float = Field(default=10.0, gt=0)
    goal: Pair = (0.0, 0.0)
    obstacles: List[ObstacleSection] = Field(default_factory=list)


class DiffeoSection(StrictModel):
    """Sin level_scale / goal_scale los interruptores usan la fórmula literal"""
    sharpness: float = Field(default_factory=lambda: settings.DIFFEO_LAMBDA, gt=0)
    level_scale: Optional[float] = Field(default=None, gt=0)
    goal_scale: Optional[float] = Field(default=None, gt=0)


class GainsSection(StrictModel):
    kappa: float = Field(default_factory=lambda: settings.AVOIDANCE_KAPPA, gt=0)
    kp: float = Field(default_factory=lambda: settings.AVOIDANCE_KP, gt=0)


class SimulationSection(StrictModel):
    dt: float = Field(default_factory=lambda: settings.DT, gt=0)
    horizon: float = Field(default_factory=lambda: settings.HORIZON, gt=0)
    initial_states: List[Pair] = Field(min_length=1)
    initial_headings: List[float] = Field(default_factory=list)


class MonitorSection(StrictModel):
    deadlock_window: int = Field(default_factory=lambda: settings.DEADLOCK_WINDOW, ge=2)
    velocity_threshold: float = Field(default_factory=lambda: settings.DEADLOCK_VELOCITY, gt=0)
    goal_radius: float = Field(default_factory=lambda: settings.GOAL_RADIUS, gt=0)


class OutputSection(StrictModel):
    csv: bool = True
    svg: bool = True
    summary: bool = True


class ScenarioFile(StrictModel):
    """Documento completo de un escenario más las opciones de salida"""
    name: str = Field(min_length=1)
    description: str = ""
    system: SystemSection = Field(default_factory=SystemSection)
    controller: ControllerSection = Field(default_factory=ControllerSection)
    world: WorldSection = Field(default_factory=WorldSection)
    diffeo: DiffeoSection = Field(default_factory=DiffeoSection)
    gains: GainsSection = Field(default_factory=GainsSection)
    simulation: SimulationSection
    monitor: MonitorSection = Field(default_factory=MonitorSection)
    output: OutputSection = Field(default_factory=OutputSection)

    def to_scenario(self) -> Scenario:
        try:
            return Scenario(
                name=self.name,
                description=self.description,
                initial_states=tuple(tuple(s) for s in self.simulation.initial_states),
                system=SystemKind(self.system.kind),
                controller=ControllerKind(self.controller.kind),
                drift_matrix=self.system.drift_matrix,
                nominal_gain=self.system.nominal_gain,
                lookahead=self.system.lookahead,
                initial_headings=tuple(self.simulation.initial_headings),
                workspace_radius=self.world.workspace_radius,
                obstacles=tuple(ObstacleSpec(o.kind, o.center, o.radius, o.a, o.b) for o in self.world.obstacles),
                barriers=tuple(BarrierSpec(b.kind, b.center, b.radius, b.matrix, b.obstacle)
                               for b in self.controller.barriers),
                goal=self.world.goal,
                sharpness=self.diffeo.sharpness,
                level_scale=self.diffeo.level_scale,
                goal_scale=self.diffeo.goal_scale,
                alpha=self.controller.alpha,
                kappa=self.gains.kappa,
                kp=self.gains.kp,
                dt=self.simulation.dt,
                horizon=self.simulation.horizon,
                deadlock_window=self.monitor.deadlock_window,
                velocity_threshold=self.monitor.velocity_threshold,
                goal_radius=self.monitor.goal_radius,
            )
        except ConfigurationError as exc:
            raise ScenarioValidationError(str(exc)) from exc


def _key_lines(text: str) -> Dict[tuple, int]:
    """Ruta de cada tabla y clave del documento -> número de línea (1-based)"""
    lines: Dict[tuple, int] = {}
    counters: Dict[tuple, int] = {}
    table: tuple = ()
    for number, raw in enumerate(text.splitlines(), start=1):
        header = _TABLE_HEADER.match(raw)
        if header:
            path = tuple(part.strip() for part in header.group(2).split("."))
            if header.group(1) == "[[":
                index = counters.get(path, 0)
                counters[path] = index + 1
                lines.setdefault(path, number)
                table = path + (index,)
            else:
                table = path
            lines.setdefault(table, number)
            continue
        key = _KEY_LINE.match(raw)
        if key:
            lines.setdefault(table + (key.group(1),), number)
    return lines


def _line_for(loc: tuple, lines: Dict[tuple, int]) -> int:
    for end in range(len(loc), 0, -1):
        if loc[:end] in lines:
            return lines[loc[:end]]
    return 1


def _format_validation_error(exc: ValidationError, text: str) -> ScenarioValidationError:
    lines = _key_lines(text)
    first = exc.errors()[0]
    loc = tuple(first["loc"])
    where = ".".join(str(part) for part in loc) or "<document>"
    return ScenarioValidationError(f"{where}: {first['msg']}", line=_line_for(loc, lines))


def parse_scenario_text(text: str) -> ScenarioFile:
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = _DECODE_LINE.search(str(exc))
        raise ScenarioValidationError(f"invalid TOML: {exc}", line=int(match.group(1)) if match else None) from exc
    try:
        return ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise _format_validation_error(exc, text) from exc


def load_scenario_file(path: Union[str, Path]) -> ScenarioFile:
    """Lee y valida un archivo de escenario"""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioValidationError(f"cannot read scenario file {path}: {exc}") from exc
    return parse_scenario_text(text)


def resolve_scenario(ref: str) -> Tuple[Scenario, OutputSection]:
    """Ruta a un archivo TOML o nombre de un escenario incluido"""
    path = Path(ref)
    if path.is_file():
        document = load_scenario_file(path)
        return document.to_scenario(), document.output
    scenarios = builtin_scenarios()
    if ref in scenarios:
        return scenarios[ref], OutputSection()
    raise ScenarioValidationError(
        f"'{ref}' is neither a scenario file nor a built-in scenario ({', '.join(sorted(scenarios))})")
