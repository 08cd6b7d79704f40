"""Symbolic and numeric workbench for stationary motions of the Kirchhoff equations in Sokolov's case."""

__version__ = "0.1.0"
