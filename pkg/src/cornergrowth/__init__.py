"""Inhomogeneous corner-growth models: simulation, limit shapes, exact
last-passage distributions and Tracy-Widom fluctuation checks."""

__version__ = "0.1.0"
