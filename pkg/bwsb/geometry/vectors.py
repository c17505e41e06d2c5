"""
Utilidades de vectores: conversión, validación de dimensión y finitud
"""
from typing import Optional

import numpy as np

from ..errors import DimensionMismatchError

Vector = np.ndarray


def as_vector(values, dim: Optional[int] = None, name: str = "vector") -> Vector:
    """Convierte a vector float 1-D, validando dimensión y componentes finitas"""
    vec = np.asarray(values, dtype=float)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionMismatchError(f"{name} must be a non-empty 1-D vector, got shape {vec.shape}")
    if dim is not None and vec.size != dim:
        raise DimensionMismatchError(f"{name} has dimension {vec.size}, expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{name} has non-finite components: {vec}")
    return vec


def frozen(vec: Vector) -> Vector:
    """Copia de solo lectura (los snapshots se comparten entre hilos y procesos)"""
    out = np.array(vec, dtype=float)
    out.flags.writeable = False
    return out
