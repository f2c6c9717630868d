"""Percolation on the 2-dimensional Hamming graph H(2, n): samplers,
branching-process couplings and Monte Carlo checks of the supercritical
component structure."""

__version__ = "0.1.0"
