"""
Geometría: mundo real (estrellas) y mundo de bolas
"""

from .vectors import Vector, as_vector
from .ball_world import (
    BallObstacle,
    BallWorld,
    beta_ball,
    beta_boundary,
    pair_separation,
    containment_margin,
    is_safe_ball,
    configuration_violations,
)
from .star_world import (
    CircleShape,
    TwoLobeShape,
    RadiusFunctionShape,
    LevelSetShape,
    RayRadiusTable,
    StarObstacle,
    Workspace,
    StarWorld,
    beta_star,
    ray_map,
    is_safe_real,
)

__all__ = [
    'Vector',
    'as_vector',
    'BallObstacle',
    'BallWorld',
    'beta_ball',
    'beta_boundary',
    'pair_separation',
    'containment_margin',
    'is_safe_ball',
    'configuration_violations',
    'CircleShape',
    'TwoLobeShape',
    'RadiusFunctionShape',
    'LevelSetShape',
    'RayRadiusTable',
    'StarObstacle',
    'Workspace',
    'StarWorld',
    'beta_star',
    'ray_map',
    'is_safe_real',
]
