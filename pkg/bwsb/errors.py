"""
Jerarquía de excepciones de bwsb
Todas derivan de BwsbError para que la CLI pueda distinguir fallos propios de errores inesperados
"""

from typing import Any, Dict, Optional

import numpy as np


class BwsbError(Exception):
    """Error base del paquete"""


class DimensionMismatchError(BwsbError, ValueError):
    """Dimensiones incompatibles entre vectores, matrices o mundos"""


class SingularPointError(BwsbError):
    """Evaluación en un punto singular (p. ej. el centro de un obstáculo estrella)"""


class ConfigurationError(BwsbError, ValueError):
    """Parámetros o configuraciones geométricas inválidas"""


class DomainError(BwsbError):
    """Estado fuera del dominio de evaluación (dentro de un obstáculo)"""


class QpInfeasibleError(BwsbError):
    """QP sin punto factible; lleva el certificado y >= 0 con A^T y = 0, b^T y < 0"""

    def __init__(self, message: str, certificate: Optional[np.ndarray] = None):
        super().__init__(message)
        self.certificate = certificate


class SolverFailureError(BwsbError):
    """El solver agotó su límite de iteraciones o no pudo certificar la solución"""


class FilterFailureError(BwsbError):
    """El filtro CBF-QP estándar no encontró entrada segura"""


class InverseConvergenceError(BwsbError):
    """Newton no convergió al invertir el difeomorfismo"""

    def __init__(self, message: str, best_iterate: np.ndarray, residual: float):
        super().__init__(message)
        self.best_iterate = best_iterate
        self.residual = residual


class UnsafeConfigurationError(BwsbError):
    """Configuración del mundo de bolas con alguna barrera negativa"""

    def __init__(self, message: str, barrier: str, value: float):
        super().__init__(message)
        self.barrier = barrier
        self.value = value


class MainQpInfeasibleError(QpInfeasibleError):
    """Main QP infactible: contradice la factibilidad garantizada, se adjunta la configuración"""

    def __init__(self, message: str, configuration: Dict[str, Any],
                 certificate: Optional[np.ndarray] = None):
        super().__init__(message, certificate)
        self.configuration = configuration


class StepError(BwsbError):
    """Error propagado desde un paso del lazo cerrado, con el índice del paso"""

    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
        self.step = step
        self.cause = cause


class ScenarioValidationError(BwsbError):
    """Archivo de escenario inválido; line es 1-based cuando se conoce"""

    def __init__(self, message: str, line: Optional[int] = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class SingularJacobianWarning(RuntimeWarning):
    """Jacobiano numéricamente singular (número de condición excesivo)"""


class ShootingError(BwsbError):
    """La planta no alcanzó el objetivo del paso; residual es la distancia final"""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class StepRejectedError(BwsbError):
    """Ningún objetivo q + s dt q_dot seguro e invertible para el dt probado"""
