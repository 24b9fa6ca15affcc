"""Exact and certified computations around polynomial-factorial equations s*n! = P(x)."""

__version__ = "0.1.0"
