"""
Suites de propiedades ligadas al mundo de un escenario: precondición de arranque seguro,
oráculo del QP, factibilidad del Main QP (Monte-Carlo) y difeomorfismo.
"""
import time
import warnings
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import structlog

from ..avoidance import solve_main_qp
from ..diffeo import StarToBallMap
from ..errors import BwsbError, SingularJacobianWarning
from ..geometry import BallObstacle, BallWorld, StarWorld, configuration_violations, is_safe_ball
from ..optimization import enumerate_active_sets, kkt_residual, random_qp, solve_qp
from ..simulation import ControllerKind, Scenario

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class VerifyBudget:
    """Tamaños de muestra de cada suite"""
    qp_instances: int = 1000
    main_qp_configurations: int = 1000
    boundary_points: int = 200
    sweep_points: int = 10_000
    round_trips: int = 1000
    jacobian_points: int = 200


def random_safe_configuration(rng: np.random.Generator, max_obstacles: int = 5,
                              boundary_radius: float = 10.0) -> Tuple[BallWorld, np.ndarray, np.ndarray]:
    """Mundo de bolas seguro aleatorio (n = 2), estado q libre y velocidad q_dot"""
    M = int(rng.integers(1, max_obstacles + 1))
    balls = []
    while len(balls) < M:
        radius = float(rng.uniform(0.2, 1.5))
        center = rng.uniform(-boundary_radius, boundary_radius, size=2)
        if np.linalg.norm(center) + radius >= boundary_radius * 0.95:
            continue
        if any(np.linalg.norm(center - b.center) <= radius + b.radius for b in balls):
            continue
        balls.append(BallObstacle.at_rest(center, radius))
    rest = BallWorld(np.zeros(2), boundary_radius, tuple(balls))
    # Estado actual desplazado respecto al de reposo, sin perder seguridad de la configuración
    while True:
        centers = [b.center + rng.normal(scale=0.2, size=2) for b in balls]
        radii = [b.radius * float(rng.uniform(0.8, 1.2)) for b in balls]
        world = rest.with_state(centers, radii, boundary_radius * float(rng.uniform(0.95, 1.05)))
        if min(v for k, v in world.barrier_values(world.boundary_center).items() if k.startswith("ball_h_")) > 0:
            break
    while True:
        q = rng.uniform(-boundary_radius, boundary_radius, size=2)
        if is_safe_ball(world, q) and min(world.barrier_values(q).values()) > 1e-6:
            break
    qdot = rng.normal(size=2) * float(rng.uniform(0.1, 5.0))
    return world, q, qdot


class PropertyVerifier:
    """Ejecuta las suites y acumula checks en el estilo ✅/❌"""

    def __init__(self, scenario: Scenario, seed: int = 0, budget: Optional[VerifyBudget] = None,
                 quiet: bool = False):
        self.scenario = scenario
        self.rng = np.random.default_rng(seed)
        self.budget = VerifyBudget() if budget is None else budget
        self.quiet = quiet
        self.checks_passed = 0
        self.checks_failed = 0
        self.results = {}
        self.notices = {}

    def print_header(self, title: str):
        if not self.quiet:
            print(f"\n{'=' * 60}")
            print(f"🔍 {title}")
            print(f"{'=' * 60}")

    def print_check(self, name: str, status: bool, details: str = ""):
        self.results[name] = status
        if status:
            self.checks_passed += 1
            if not self.quiet:
                print(f"✅ {name}" + (f"  ({details})" if details else ""))
        else:
            self.checks_failed += 1
            print(f"❌ {name}")
            if details:
                print(f"   {details}")

    def print_notice(self, name: str, details: str):
        """Hallazgo informativo: se muestra siempre pero no cuenta como fallo"""
        self.notices[name] = details
        print(f"⚠️  {name}")
        print(f"   {details}")

    # ---- Precondición --------------------------------------------------

    def check_safe_start(self) -> bool:
        """Estados iniciales seguros y obstáculos iniciales disjuntos"""
        self.print_header("ARRANQUE SEGURO")
        scenario = self.scenario
        unsafe = scenario.unsafe_initial_states()
        self.print_check("initial states outside every obstacle", not unsafe,
                         f"unsafe initial states: {unsafe}" if unsafe else f"{len(scenario.initial_states)} states")
        world = scenario.star_world()
        overlaps = self._star_overlaps(world)
        self.print_check("star obstacles pairwise disjoint and inside the workspace", not overlaps,
                         "; ".join(overlaps))
        if world.n_obstacles:
            balls = world.default_ball_world()
            pair_terms = {k: v for k, v in configuration_violations(balls, balls.boundary_center).items()
                          if k.startswith("ball_h_")}
            self.print_check("initial ball world configuration safe", not pair_terms,
                             ", ".join(f"{k}={v:.3e}" for k, v in pair_terms.items()))
            return not unsafe and not overlaps and not pair_terms
        return not unsafe and not overlaps

    @staticmethod
    def _star_overlaps(world: StarWorld):
        problems = []
        thetas = np.linspace(0.0, 2 * np.pi, 720, endpoint=False)
        for i, obs in enumerate(world.obstacles, start=1):
            boundary = np.array([obs.boundary_point(t) for t in thetas])
            if np.any(world.workspace.level_set(boundary) < 0):
                problems.append(f"obstacle {i} leaves the workspace")
            for j, other in enumerate(world.obstacles, start=1):
                if j != i and np.any(other.level_set(boundary) <= 0):
                    problems.append(f"obstacles {min(i, j)} and {max(i, j)} overlap")
        return sorted(set(problems))

    # ---- QP ------------------------------------------------------------

    def check_qp_oracle(self) -> bool:
        """Minimizador igual al de la enumeración exhaustiva y residuos KKT pequeños"""
        self.print_header("QP: ORÁCULO POR ENUMERACIÓN")
        started = time.perf_counter()
        worst_gap, worst_kkt, mismatches = 0.0, 0.0, 0
        for _ in range(self.budget.qp_instances):
            qp = random_qp(self.rng)
            sol = solve_qp(qp)
            oracle = enumerate_active_sets(qp)
            if not sol.optimal or not oracle.optimal:
                mismatches += 1
                continue
            worst_gap = max(worst_gap, float(np.max(np.abs(sol.z - oracle.z))) if sol.z.size else 0.0)
            worst_kkt = max(worst_kkt, kkt_residual(qp, sol))
        elapsed = time.perf_counter() - started
        self.print_check("solver matches enumeration", mismatches == 0 and worst_gap <= 1e-8,
                         f"max |z - z_oracle| = {worst_gap:.2e}, status mismatches = {mismatches}")
        self.print_check("KKT residuals", worst_kkt <= 1e-8, f"max residual = {worst_kkt:.2e}, {elapsed:.1f}s")

        detected = sum(not solve_qp(random_qp(self.rng, feasible=False)).optimal for _ in range(20))
        self.print_check("infeasible QPs detected", detected == 20, f"{detected}/20 with certificate")
        return mismatches == 0 and worst_gap <= 1e-8 and worst_kkt <= 1e-8 and detected == 20

    def check_main_qp_feasibility(self) -> bool:
        """Configuraciones seguras aleatorias: Main QP factible y todas las filas cumplidas"""
        self.print_header("MAIN QP: FACTIBILIDAD MONTE-CARLO")
        gains, gamma = self.scenario.gains(), self.scenario.gamma()
        feasible, worst = 0, -np.inf
        total = self.budget.main_qp_configurations
        for _ in range(total):
            world, q, qdot = random_safe_configuration(self.rng)
            try:
                result = solve_main_qp(world, q, qdot, gains, gamma)
            except BwsbError as exc:
                logger.warning("main qp check failed", error=str(exc))
                continue
            feasible += 1
            worst = max(worst, result.max_violation)
        ok = feasible == total and worst <= 1e-9
        self.print_check("main QP feasible on safe configurations", ok,
                         f"{feasible}/{total} feasible, max row violation = {worst:.2e}")
        return ok

    # ---- Difeomorfismo -------------------------------------------------

    def _safe_samples(self, world: StarWorld, count: int, margin: float = 1e-3) -> np.ndarray:
        radius = self.scenario.workspace_radius
        center = world.workspace.center
        samples = []
        while len(samples) < count:
            x = center + self.rng.uniform(-radius, radius, size=2)
            if min(world.barrier_values(x).values()) > margin:
                samples.append(x)
        return np.array(samples)

    def check_diffeomorphism(self) -> bool:
        """Meta fija, fronteras a esferas, conjunto seguro a conjunto seguro, inversa y jacobiano"""
        self.print_header("DIFEOMORFISMO ESTRELLAS -> BOLAS")
        scenario = self.scenario
        star_world = scenario.star_world()
        diffeo = scenario.diffeo(star_world)
        balls = star_world.default_ball_world()
        budget = self.budget
        passed = True

        mapped_goal = diffeo(balls, diffeo.params.real_goal)
        ok = bool(np.array_equal(mapped_goal, diffeo.params.ball_goal))
        self.print_check("goal maps to the ball goal", ok, f"F(x_g) = {mapped_goal.tolist()}")
        passed &= ok

        worst_boundary = 0.0
        thetas = np.linspace(0.0, 2 * np.pi, budget.boundary_points, endpoint=False)
        centers = (balls.boundary_center,) + tuple(b.center for b in balls.obstacles)
        radii = (balls.boundary_radius,) + tuple(b.radius for b in balls.obstacles)
        for k, region in enumerate(diffeo.regions):
            for theta in thetas:
                direction = np.array([np.cos(theta), np.sin(theta)])
                x = region.center + region.shape.radius(theta) * direction
                q = diffeo(balls, x)
                worst_boundary = max(worst_boundary, abs(float(np.linalg.norm(q - centers[k])) - radii[k]))
        ok = worst_boundary <= 1e-6
        self.print_check("boundaries map onto spheres", ok, f"max | ||F(x) - q_k|| - rho_k | = {worst_boundary:.2e}")
        passed &= ok

        sweep = self._safe_samples(star_world, budget.sweep_points, margin=0.0)
        outside = 0
        worst_sweep = np.inf
        for x in sweep:
            value = min(balls.barrier_values(diffeo(balls, x)).values())
            worst_sweep = min(worst_sweep, value)
            outside += value < -1e-6
        ok = outside == 0
        self.print_check("safe set maps into the ball-world safe set", ok,
                         f"{outside}/{len(sweep)} images unsafe, min ball barrier = {worst_sweep:.2e}")
        passed &= ok

        broken = self._partition_violations(diffeo, sweep)
        ok = broken == 0
        self.print_check("switches form a partition of unity", ok,
                         f"{broken}/{len(sweep)} samples with sigma_i or sigma_g outside [0, 1]")
        passed &= ok

        worst_round_trip, failures = 0.0, 0
        for x in self._safe_samples(star_world, budget.round_trips):
            guess = x + self.rng.uniform(-1e-3, 1e-3, size=2)
            try:
                x_back = diffeo.inverse(balls, diffeo(balls, x), guess, tolerance=1e-12)
            except BwsbError:
                failures += 1
                continue
            worst_round_trip = max(worst_round_trip, float(np.linalg.norm(x_back - x)))
        ok = failures == 0 and worst_round_trip <= 1e-8
        self.print_check("inverse round trip", ok,
                         f"max ||F^-1(F(x)) - x|| = {worst_round_trip:.2e}, Newton failures = {failures}")
        passed &= ok

        worst_jacobian = 0.0
        jacobian_samples = self._safe_samples(star_world, budget.jacobian_points, margin=1e-2)
        for x in jacobian_samples:
            coarse = diffeo.jacobian(balls, x, step_scale=1e-6)
            fine = diffeo.jacobian(balls, x, step_scale=5e-7)
            worst_jacobian = max(worst_jacobian, float(np.linalg.norm(coarse - fine) / np.linalg.norm(coarse)))
        ok = worst_jacobian <= 1e-4
        self.print_check("jacobian finite differences agree at two steps", ok,
                         f"max relative difference = {worst_jacobian:.2e}")
        passed &= ok

        flipped = self._orientation_violations(diffeo, balls, jacobian_samples)
        ok = flipped == 0
        self.print_check("jacobian preserves orientation", ok,
                         f"{flipped}/{len(jacobian_samples)} samples with det J <= 0")
        passed &= ok

        if diffeo.params.normalized:
            self.report_literal_switches(diffeo, balls, sweep, jacobian_samples)
        return bool(passed)

    @staticmethod
    def _partition_violations(diffeo: StarToBallMap, samples: np.ndarray, slack: float = 1e-12) -> int:
        count = 0
        for x in samples:
            sw = diffeo.switches(x)
            inside = np.all(sw.sigmas >= -slack) and np.all(sw.sigmas <= 1.0 + slack) \
                and -slack <= sw.goal_switch <= 1.0 + slack
            count += not inside
        return count

    @staticmethod
    def _orientation_violations(diffeo: StarToBallMap, balls: BallWorld, samples: np.ndarray) -> int:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", SingularJacobianWarning)
            return sum(float(np.linalg.det(diffeo.jacobian(balls, x))) <= 0.0 for x in samples)

    def report_literal_switches(self, diffeo: StarToBallMap, balls: BallWorld, sweep: np.ndarray,
                                jacobian_samples: np.ndarray):
        """El mapa con la fórmula literal de los interruptores sobre las mismas muestras (informativo)"""
        literal = diffeo.with_params(diffeo.params.literal())
        broken = self._partition_violations(literal, sweep)
        flipped = self._orientation_violations(literal, balls, jacobian_samples)
        if broken or flipped:
            self.print_notice("literal switch formula is not a diffeomorphism on this world",
                              f"{broken}/{len(sweep)} samples outside the partition of unity, "
                              f"{flipped}/{len(jacobian_samples)} with det J <= 0")
        elif not self.quiet:
            print("✅ literal switch formula also passes (informative)")

    def run(self) -> bool:
        """Todas las suites aplicables; True si no falló ningún check"""
        started = time.perf_counter()
        self.check_safe_start()
        self.check_qp_oracle()
        if self.scenario.controller is ControllerKind.MAIN_QP:
            self.check_main_qp_feasibility()
        if self.scenario.obstacles:
            try:
                self.check_diffeomorphism()
            except BwsbError as exc:
                self.print_check("diffeomorphism evaluation", False, f"{type(exc).__name__}: {exc}")
        elapsed = time.perf_counter() - started
        if not self.quiet:
            print(f"\n{'=' * 60}")
        print(f"📊 {self.scenario.name}: {self.checks_passed} passed, {self.checks_failed} failed, "
              f"{len(self.notices)} notices ({elapsed:.1f}s)")
        logger.info("verification finished", scenario=self.scenario.name, passed=self.checks_passed,
                    failed=self.checks_failed, notices=len(self.notices))
        return self.checks_failed == 0
