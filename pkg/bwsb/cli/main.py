"""
Línea de comandos: run, verify y scenarios

Códigos de salida: 0 éxito, 1 fallo en ejecución o de alguna propiedad, 2 entrada inválida.
"""
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import structlog

from ..config import settings
from ..errors import ScenarioValidationError
from ..logging_setup import configure_logging
from ..monitor import write_metrics
from ..simulation import builtin_scenarios, run_scenario
from .report import write_summary, write_trajectory_csv
from .scenario_file import resolve_scenario
from .svg_plot import write_svg
from .verify import PropertyVerifier

logger = structlog.get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2


class _Parser(argparse.ArgumentParser):
    """Errores de uso con código 2 y sin texto de ayuda completo"""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INVALID)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bwsb", description="Filtros CBF-QP y evasión por estados en mundos de bolas")
    parser.add_argument("--quiet", action="store_true", help="solo advertencias y errores")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simula un escenario y escribe CSV, resumen y SVG")
    run.add_argument("--scenario", required=True, help="archivo TOML o nombre de escenario incluido")
    run.add_argument("--out", required=True, type=Path, help="directorio de salida")
    run.add_argument("--workers", type=int, default=None, help="procesos en paralelo (por defecto PARALLEL_WORKERS)")
    run.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    verify = sub.add_parser("verify", help="ejecuta las suites de propiedades sobre el mundo del escenario")
    verify.add_argument("--scenario", required=True, help="archivo TOML o nombre de escenario incluido")
    verify.add_argument("--seed", type=int, default=0, help="semilla de las suites Monte-Carlo")
    verify.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    sub.add_parser("scenarios", help="lista los escenarios incluidos")
    return parser


def _print_event_dump(logs):
    for log in logs:
        if log.failed:
            print(json.dumps({"trajectory": log.index, "events": log.events}, default=str), file=sys.stderr)


def command_run(scenario_ref: str, out_dir: Path, workers: Optional[int] = None) -> int:
    try:
        scenario, output = resolve_scenario(scenario_ref)
    except ScenarioValidationError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID

    unsafe = scenario.unsafe_initial_states()
    if unsafe:
        print(f"unsafe initial states {unsafe} in scenario '{scenario.name}'", file=sys.stderr)
        return EXIT_FAILURE

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"cannot create output directory {out_dir}: {exc}", file=sys.stderr)
        return EXIT_FAILURE

    logs = run_scenario(scenario, workers=workers)

    # Único escritor tras terminar todas las trayectorias
    n_obstacles = len(scenario.obstacles)
    if output.csv:
        for log in logs:
            write_trajectory_csv(log, n_obstacles, out_dir / f"trajectory_{log.index:03d}.csv")
    if output.summary:
        write_summary(scenario, logs, out_dir)
    if output.svg:
        write_svg(scenario, logs, out_dir / f"{scenario.name}.svg")
    if settings.METRICS_ENABLED:
        write_metrics(out_dir / "metrics.prom")

    failed = [log for log in logs if log.failed]
    for log in logs:
        s = log.summary
        logger.info("trajectory result", index=log.index, outcome=s.outcome.value,
                    min_real_barrier=s.min_real_barrier, min_ball_barrier=s.min_ball_barrier)
    if failed:
        _print_event_dump(failed)
        return EXIT_FAILURE
    return EXIT_OK


def command_verify(scenario_ref: str, seed: int = 0, quiet: bool = False) -> int:
    try:
        scenario, _ = resolve_scenario(scenario_ref)
    except ScenarioValidationError as exc:
        print(f"invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    verifier = PropertyVerifier(scenario, seed=seed, quiet=quiet)
    return EXIT_OK if verifier.run() else EXIT_FAILURE


def command_scenarios() -> int:
    for name, scenario in sorted(builtin_scenarios().items()):
        print(f"{name:22s} {scenario.description}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID

    configure_logging("WARNING" if args.quiet else settings.LOG_LEVEL, json=settings.LOG_JSON)
    if args.command == "run":
        return command_run(args.scenario, args.out, args.workers)
    if args.command == "verify":
        return command_verify(args.scenario, args.seed, args.quiet)
    return command_scenarios()


if __name__ == "__main__":
    sys.exit(main())
