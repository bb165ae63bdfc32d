"""Generalized polygons, their spectra, and t-good substructures."""

__version__ = "0.1.0"
