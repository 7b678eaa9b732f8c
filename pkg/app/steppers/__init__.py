"""
Time steppers: one strategy per file, all sharing BaseStepper.
"""

from app.steppers.base_stepper import BaseStepper
from app.steppers.laguerre_stepper import LaguerreStepper, laguerre_step
from app.steppers.oracle_stepper import OracleStepper, oracle_step
from app.steppers.rk4_stepper import RK4Stepper, rk4_step

__all__ = [
    "BaseStepper",
    "LaguerreStepper",
    "OracleStepper",
    "RK4Stepper",
    "laguerre_step",
    "oracle_step",
    "rk4_step",
]
