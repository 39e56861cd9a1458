"""Tomography-free measurement of the von Neumann entropy and the relative
entropy of coherence, simulated on linear-optical interferometers."""

__version__ = "0.1.0"
