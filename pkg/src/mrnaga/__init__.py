"""Codon optimisation of mRNA constructs with a multi-objective genetic algorithm."""

__version__ = "0.1.0"
