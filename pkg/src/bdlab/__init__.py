"""Exact finite-stage experiments with Bourgain-Delbaen type spaces."""

__version__ = "0.1.0"
