"""Numerical laboratory for periodic Fisher-KPP reaction-advection-diffusion equations."""

__version__ = "0.1.0"
