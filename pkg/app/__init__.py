"""
Exciton Entangler - driven two-exciton cavity entanglement simulations.
"""

__version__ = "0.1.0"
__author__ = "Exciton Entangler Team"
