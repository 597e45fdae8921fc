"""Exact classification engine for generalized Riemann derivatives."""

__version__ = "0.1.0"
