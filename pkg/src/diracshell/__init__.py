"""Dirac operators with δ-shell interactions: 1D closed forms and 2D boundary integral tools."""

__version__ = "0.1.0"
