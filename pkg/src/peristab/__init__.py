"""Peridynamic correspondence material models and their stability analysis."""

__version__ = "0.1.0"
