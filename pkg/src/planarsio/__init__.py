"""Planar singular integral operators, Bergman projections and elliptic-system solvers."""

__version__ = "0.1.0"
