"""
Difeomorfismo entre el mundo de estrellas y el mundo de bolas
"""

from .star_to_ball import (
    DiffeoParams,
    SwitchValues,
    DiffeoEvaluation,
    StarToBallMap,
    eval_switches,
    eval_diffeo,
    jacobian,
    inverse,
)

__all__ = [
    'DiffeoParams',
    'SwitchValues',
    'DiffeoEvaluation',
    'StarToBallMap',
    'eval_switches',
    'eval_diffeo',
    'jacobian',
    'inverse',
]
