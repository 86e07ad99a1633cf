"""Traveling-wave velocity diagrams for discrete reaction-diffusion equations."""

__version__ = "0.1.0"
