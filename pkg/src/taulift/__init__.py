"""Semidirect tau-lifts of double Lie algebras, Poisson-Lie checks and AKS solvers."""

__version__ = "0.1.0"
