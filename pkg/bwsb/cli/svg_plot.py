"""
Gráfico SVG generado directamente: trayectorias sobre el mundo real (contornos beta_i = 0
por marching squares) y una instantánea del mundo de bolas. Salida determinista.
"""
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from ..config import settings
from ..geometry import StarWorld
from ..simulation import Scenario, TrajectoryLog

logger = structlog.get_logger(__name__)

PANEL = 420
MARGIN = 30
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#e377c2")

Segment = Tuple[np.ndarray, np.ndarray]

# Esquinas: 0=(i,j) 1=(i+1,j) 2=(i+1,j+1) 3=(i,j+1); bit alto = esquina 0
MARCHING_SQUARES_TABLE = [
    (False, []),  # 0000
    (False, [((0, 3), (2, 3))]),  # 0001
    (False, [((1, 2), (2, 3))]),  # 0010
    (False, [((0, 3), (1, 2))]),  # 0011
    (False, [((0, 1), (1, 2))]),  # 0100
    (True, ([((0, 1), (1, 2)), ((0, 3), (2, 3))], [((0, 1), (0, 3)), ((1, 2), (3, 2))])),  # 0101
    (False, [((0, 1), (2, 3))]),  # 0110
    (False, [((0, 1), (0, 3))]),  # 0111
    (False, [((0, 1), (0, 3))]),  # 1000
    (False, [((0, 1), (2, 3))]),  # 1001
    (True, ([((0, 1), (0, 3)), ((1, 2), (3, 2))], [((0, 1), (1, 2)), ((0, 3), (2, 3))])),  # 1010
    (False, [((0, 1), (1, 2))]),  # 1011
    (False, [((0, 3), (1, 2))]),  # 1100
    (False, [((1, 2), (2, 3))]),  # 1101
    (False, [((0, 3), (2, 3))]),  # 1110
    (False, []),  # 1111
]


def lerp_point(p0, p1, v0, v1):
    t = v0 / (v0 - v1)
    t = min(max(t, 0.0), 1.0)
    return p0 * (1 - t) + t * p1


def sample_grid(func: Callable, bounds: Tuple[float, float, float, float], resolution: int):
    """Evalúa func en una malla (resolution x resolution); func acepta arrays (..., 2) o puntos sueltos"""
    xmin, xmax, ymin, ymax = bounds
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    grid = np.stack(np.meshgrid(xs, ys, indexing="ij"), axis=-1)
    try:
        values = np.asarray(func(grid), dtype=float)
        if values.shape != grid.shape[:2]:
            raise ValueError("not vectorized")
    except (ValueError, TypeError):
        values = np.array([[func(grid[i, j]) for j in range(resolution)] for i in range(resolution)], dtype=float)
    return xs, ys, values


def marching_squares(xs: np.ndarray, ys: np.ndarray, values: np.ndarray) -> List[Segment]:
    """Segmentos del contorno values = 0"""
    positive = values > 0
    index = (positive[:-1, :-1].astype(int) << 3) | (positive[1:, :-1].astype(int) << 2) \
        | (positive[1:, 1:].astype(int) << 1) | positive[:-1, 1:].astype(int)
    segments: List[Segment] = []
    for i, j in zip(*np.nonzero((index != 0) & (index != 15))):
        corners = [np.array((xs[i], ys[j])), np.array((xs[i + 1], ys[j])),
                   np.array((xs[i + 1], ys[j + 1])), np.array((xs[i], ys[j + 1]))]
        samples = [values[i, j], values[i + 1, j], values[i + 1, j + 1], values[i, j + 1]]
        saddle, edges = MARCHING_SQUARES_TABLE[index[i, j]]
        if saddle:
            edges = edges[int(np.mean(samples) > 0)]
        for (a0, a1), (b0, b1) in edges:
            p0 = lerp_point(corners[a0], corners[a1], samples[a0], samples[a1])
            p1 = lerp_point(corners[b0], corners[b1], samples[b0], samples[b1])
            segments.append((p0, p1))
    return segments


class _Panel:
    """Transformación mundo -> píxeles de un panel cuadrado"""

    def __init__(self, bounds, offset_x: float):
        xmin, xmax, ymin, ymax = bounds
        self.xmin, self.ymax = xmin, ymax
        self.scale = PANEL / max(xmax - xmin, ymax - ymin)
        self.offset_x = offset_x

    def px(self, p) -> Tuple[float, float]:
        return (self.offset_x + MARGIN + (p[0] - self.xmin) * self.scale,
                MARGIN + (self.ymax - p[1]) * self.scale)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _square_bounds(points: np.ndarray, pad: float = 0.1) -> Tuple[float, float, float, float]:
    lo, hi = points.min(axis=0), points.max(axis=0)
    center = (lo + hi) / 2.0
    half = max(float((hi - lo).max()) / 2.0, 1.0) * (1.0 + pad)
    return center[0] - half, center[0] + half, center[1] - half, center[1] + half


def _polyline(panel: _Panel, points: Sequence, color: str, width: float = 1.5, dash: Optional[str] = None) -> str:
    coords = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in (panel.px(p) for p in points))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"{dash_attr}/>'


def _segments_path(panel: _Panel, segments: List[Segment], color: str) -> str:
    parts = []
    for p0, p1 in segments:
        a, b = panel.px(p0), panel.px(p1)
        parts.append(f"M{_fmt(a[0])} {_fmt(a[1])}L{_fmt(b[0])} {_fmt(b[1])}")
    return f'<path d="{"".join(parts)}" fill="none" stroke="{color}" stroke-width="1.2"/>'


def _circle(panel: _Panel, center, radius: float, color: str, fill: str = "none", dash: Optional[str] = None) -> str:
    cx, cy = panel.px(center)
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (f'<circle cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(radius * panel.scale)}" '
            f'fill="{fill}" stroke="{color}" stroke-width="1.2"{dash_attr}/>')


def _real_world_points(scenario: Scenario, world: StarWorld, logs: List[TrajectoryLog]) -> np.ndarray:
    points = [np.asarray(scenario.goal, dtype=float)]
    points.extend(np.asarray(s, dtype=float) for s in scenario.initial_states)
    for log in logs:
        points.extend(record.x for record in log.records)
    for obs in world.obstacles:
        points.extend(obs.boundary_point(t) for t in np.linspace(0.0, 2 * np.pi, 16, endpoint=False))
    for spec in scenario.barriers:
        points.extend((np.asarray(spec.center) - 1.5, np.asarray(spec.center) + 1.5))
    return np.array(points)


def _real_world_panel(scenario: Scenario, world: StarWorld, logs: List[TrajectoryLog], resolution: int) -> List[str]:
    bounds = _square_bounds(_real_world_points(scenario, world, logs))
    panel = _Panel(bounds, 0.0)
    out = ['<g id="real-world">',
           f'<text x="{MARGIN}" y="{MARGIN - 10}" font-size="13">{scenario.name}: mundo real</text>']
    contours = [(world.workspace.level_set, "#555555")]
    contours += [(obs.level_set, "#000000") for obs in world.obstacles]
    contours += [(barrier.value, "#7f7f7f") for barrier in scenario.barrier_functions(world)]
    for func, color in contours:
        xs, ys, values = sample_grid(func, bounds, resolution)
        segments = marching_squares(xs, ys, values)
        if segments:
            out.append(_segments_path(panel, segments, color))
    for k, log in enumerate(logs):
        color = PALETTE[k % len(PALETTE)]
        if log.records:
            out.append(_polyline(panel, [r.x for r in log.records], color))
            out.append(_circle(panel, log.records[0].x, 3.0 / panel.scale, color, fill=color))
    out.append(_circle(panel, scenario.goal, 4.0 / panel.scale, "#000000", fill="#ffffff"))
    out.append("</g>")
    return out


def _ball_world_panel(scenario: Scenario, logs: List[TrajectoryLog]) -> List[str]:
    """Mundo de bolas inicial (discontinuo) y final (continuo) de cada trayectoria con su curva q(t)"""
    offset = PANEL + 2 * MARGIN
    with_world = [log for log in logs if log.records and log.records[0].world is not None]
    out = ['<g id="ball-world">',
           f'<text x="{offset + MARGIN}" y="{MARGIN - 10}" font-size="13">{scenario.name}: mundo de bolas</text>']
    if not with_world:
        out.append(f'<text x="{offset + MARGIN}" y="{MARGIN + 20}" font-size="12">sin mundo de bolas</text>')
        out.append("</g>")
        return out
    points = [np.asarray(scenario.goal, dtype=float)]
    for log in with_world:
        points.extend(r.q for r in log.records)
        for snapshot in (log.records[0].world, log.records[-1].world):
            for ball in snapshot.obstacles:
                points.extend((ball.center - ball.radius, ball.center + ball.radius))
    panel = _Panel(_square_bounds(np.array(points)), offset)
    for k, log in enumerate(logs):
        if log not in with_world:
            continue
        color = PALETTE[k % len(PALETTE)]
        for ball in log.records[0].world.obstacles:
            out.append(_circle(panel, ball.center, ball.radius, "#000000", dash="4,3"))
        for ball in log.records[-1].world.obstacles:
            out.append(_circle(panel, ball.center, ball.radius, color))
        out.append(_polyline(panel, [r.q for r in log.records], color))
    out.append(_circle(panel, scenario.goal, 4.0 / panel.scale, "#000000", fill="#ffffff"))
    out.append("</g>")
    return out


def render_svg(scenario: Scenario, logs: List[TrajectoryLog], resolution: Optional[int] = None) -> str:
    """Documento SVG completo; mismo escenario y mismos logs producen los mismos bytes"""
    resolution = settings.CONTOUR_GRID if resolution is None else resolution
    world = scenario.star_world()
    width, height = 2 * (PANEL + 2 * MARGIN), PANEL + 2 * MARGIN
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>']
    lines += _real_world_panel(scenario, world, logs, resolution)
    lines += _ball_world_panel(scenario, logs)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_svg(scenario: Scenario, logs: List[TrajectoryLog], path: Union[str, Path],
              resolution: Optional[int] = None) -> Path:
    path = Path(path)
    path.write_text(render_svg(scenario, logs, resolution), encoding="utf-8")
    logger.info("svg written", scenario=scenario.name, path=str(path))
    return path
