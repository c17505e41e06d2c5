"""
Salidas tabulares: un CSV por trayectoria y el resumen del escenario (CSV + JSON)
"""
import json
from pathlib import Path
from typing import Dict, List, Union

import numpy as np
import pandas as pd
import structlog

from ..config import settings
from ..simulation import Scenario, TrajectoryLog

logger = structlog.get_logger(__name__)

REAL_PREFIXES = ("beta_", "h_")
BALL_PREFIX = "ball_"
FLOAT_FORMAT = "%.17g"


def _vector_columns(prefix: str, values, dim: int) -> Dict[str, float]:
    if values is None:
        return {f"{prefix}{k + 1}": np.nan for k in range(dim)}
    return {f"{prefix}{k + 1}": float(v) for k, v in enumerate(values)}


def _world_columns(record, n_obstacles: int) -> Dict[str, float]:
    world = record.world
    columns = {"world_rho_0": world.boundary_radius if world is not None else np.nan}
    for i in range(n_obstacles):
        ball = world.obstacles[i] if world is not None else None
        columns[f"world_q{i + 1}_1"] = float(ball.center[0]) if ball is not None else np.nan
        columns[f"world_q{i + 1}_2"] = float(ball.center[1]) if ball is not None else np.nan
        columns[f"world_rho_{i + 1}"] = float(ball.radius) if ball is not None else np.nan
    return columns


def _events_by_record(log: TrajectoryLog) -> Dict[int, List[str]]:
    rows: Dict[int, List[str]] = {}
    for event in log.events:
        row = event.get("record", len(log.records) - 1)
        label = event["kind"]
        if "obstacle" in event:
            label = f"{label}:{event['obstacle']}"
        rows.setdefault(row, []).append(label)
    return rows


def trajectory_frame(log: TrajectoryLog, n_obstacles: int) -> pd.DataFrame:
    """
    Columnas: t, x*, u*, xdot*, q*, qdot*, barreras (mundo real y mundo de bolas),
    estado del mundo de bolas, restricciones activas, eventos y banderas de incursión.
    """
    tolerance = settings.SAFETY_TOLERANCE
    events = _events_by_record(log)
    rows = []
    for k, record in enumerate(log.records):
        dim = record.x.size
        row: Dict[str, object] = {"t": float(record.t)}
        row.update(_vector_columns("x", record.x, dim))
        row.update(_vector_columns("u", record.u, record.u.size))
        row.update(_vector_columns("xdot", record.xdot, dim))
        row.update(_vector_columns("q", record.q, dim))
        row.update(_vector_columns("qdot", record.qdot, dim))
        row.update({name: float(value) for name, value in record.barriers.items()})
        row.update(_world_columns(record, n_obstacles))
        row["active"] = ";".join(record.active)
        row["event"] = ";".join(events.get(k, []))
        real = [v for name, v in record.barriers.items() if name.startswith(REAL_PREFIXES)]
        ball = [v for name, v in record.barriers.items() if name.startswith(BALL_PREFIX)]
        row["real_incursion"] = bool(real) and min(real) < -tolerance
        row["ball_incursion"] = bool(ball) and min(ball) < -tolerance
        rows.append(row)
    return pd.DataFrame(rows)


def write_trajectory_csv(log: TrajectoryLog, n_obstacles: int, path: Union[str, Path]) -> Path:
    """Escribe con 17 dígitos significativos: cada float se recupera exacto"""
    path = Path(path)
    trajectory_frame(log, n_obstacles).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def read_trajectory_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip", keep_default_na=True,
                       dtype={"active": str, "event": str}).fillna({"active": "", "event": ""})


def summary_frame(logs: List[TrajectoryLog]) -> pd.DataFrame:
    """Una fila por estado inicial"""
    rows = []
    for log in logs:
        s = log.summary
        row = {"index": log.index}
        row.update({f"x0_{k + 1}": float(v) for k, v in enumerate(log.initial_state)})
        row["outcome"] = s.outcome.value
        row["converged"] = s.converged
        row.update({f"final_x{k + 1}": v for k, v in enumerate(s.final_state)})
        row.update({
            "min_real_barrier": s.min_real_barrier,
            "min_ball_barrier": s.min_ball_barrier,
            "qp_solves": s.qp_solves,
            "steps": s.steps,
            "wall_time": s.wall_time,
            "error": s.error or "",
        })
        rows.append(row)
    return pd.DataFrame(rows)


def _json_safe(value):
    """NaN e infinitos a null, escalares numpy a tipos nativos"""
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_summary(scenario: Scenario, logs: List[TrajectoryLog], out_dir: Union[str, Path]) -> Dict[str, Path]:
    """summary.csv y summary.json (el JSON incluye además los eventos de cada trayectoria)"""
    out_dir = Path(out_dir)
    frame = summary_frame(logs)
    csv_path = out_dir / "summary.csv"
    frame.to_csv(csv_path, index=False, float_format=FLOAT_FORMAT)

    document = {
        "scenario": scenario.name,
        "controller": scenario.controller.value,
        "trajectories": _json_safe(frame.to_dict(orient="records")),
        "events": _json_safe({log.index: log.events for log in logs}),
    }
    json_path = out_dir / "summary.json"
    json_path.write_text(json.dumps(document, indent=2, allow_nan=False), encoding="utf-8")
    logger.info("summary written", scenario=scenario.name, path=str(json_path))
    return {"csv": csv_path, "json": json_path}
