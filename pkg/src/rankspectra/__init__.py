"""Spectra of large consistent rank correlation matrices."""

__version__ = "0.1.0"
