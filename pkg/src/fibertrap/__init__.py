"""Optical + van der Waals trap for an atom between two coupled nanofibers."""

__version__ = "0.1.0"
