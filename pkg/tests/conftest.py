"""
Configuración global para pytest
"""
import sys
from pathlib import Path

import numpy as np
import pytest

# Agregar el directorio raíz al path
root_dir = Path(__file__).parent.parent
sys.path.insert(0, str(root_dir))

from bwsb.diffeo import DiffeoParams, StarToBallMap
from bwsb.geometry import BallObstacle, BallWorld, StarObstacle, StarWorld, Workspace


@pytest.fixture
def rng():
    """Generador con semilla fija"""
    return np.random.default_rng(0)


@pytest.fixture
def two_lobe_world():
    """Disco de radio 10 con dos obstáculos de dos lóbulos en (0, +-3)"""
    return StarWorld(Workspace.disk(10.0), (StarObstacle.two_lobe((0.0, 3.0)), StarObstacle.two_lobe((0.0, -3.0))))


@pytest.fixture
def two_lobe_diffeo(two_lobe_world):
    """Mapa con interruptores normalizados (la configuración de los escenarios)"""
    params = DiffeoParams(sharpness=100.0, real_goal=(0.0, 0.0), level_scale=100.0, goal_scale=1.0)
    return StarToBallMap(two_lobe_world, params)


@pytest.fixture
def literal_diffeo(two_lobe_world):
    return StarToBallMap(two_lobe_world, DiffeoParams(sharpness=100.0, real_goal=(0.0, 0.0)))


@pytest.fixture
def two_lobe_ball_world(two_lobe_world):
    return two_lobe_world.default_ball_world()


@pytest.fixture
def single_ball_world():
    """Frontera de radio 10 con una bola de radio 1 en (3, 0)"""
    return BallWorld((0.0, 0.0), 10.0, (BallObstacle.at_rest((3.0, 0.0), 1.0),))


@pytest.fixture
def scenario_text():
    """Escenario TOML mínimo y válido"""
    return """name = "tiny"
description = "dos pasos de prueba"

[simulation]
dt = 0.01
horizon = 0.05
initial_states = [[0.0, 6.0]]

[[world.obstacles]]
kind = "circle"
center = [0.0, 3.0]
radius = 1.0
"""
