"""Quantum-walk Deutsch-Jozsa / Bernstein-Vazirani simulator with a photonic backend."""

from . import algorithms, photonic, walk_core

__all__ = ["algorithms", "photonic", "walk_core"]
__version__ = "0.1.0"
