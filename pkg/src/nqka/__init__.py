"""Simulation and analysis of N-party quantum key agreement with Bell states."""

__version__ = "0.1.0"
