"""Finite Moufang hexagons built from hexagonal systems."""
__version__ = "0.1.0"
