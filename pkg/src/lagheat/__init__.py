"""Numerical laboratory for the Laguerre heat-diffusion kernel and its
maximal operator."""

__version__ = "0.1.0"
