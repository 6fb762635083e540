"""Finite-quotient witnesses for congruence subgroups of punctured-sphere mapping class groups."""

__version__ = "0.1.0"
