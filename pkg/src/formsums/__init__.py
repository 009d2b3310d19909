"""Divisor-type sums over values of binary forms and polynomials."""

__version__ = "0.1.0"
