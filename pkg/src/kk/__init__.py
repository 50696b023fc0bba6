"""Numerical laboratory for a nonsymmetric Keyfitz-Kranzer balance system."""

__version__ = "0.1.0"
