"""Porosity at the origin, gap sequences and complete strong porosity for
subsets of the half-line, with exact verdicts."""

__version__ = "0.1.0"
