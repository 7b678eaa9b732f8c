"""
Core infrastructure: tensor algebra, propagation, run configs, export and verification.
"""
