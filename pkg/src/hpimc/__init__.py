"""Classical emulation of hybrid path-integral Monte Carlo for thermal correlation functions."""

__version__ = "0.1.0"
