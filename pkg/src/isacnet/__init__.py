"""Simulator and min-max power-allocation optimizer for monostatic-sensing
ISAC networks."""

__version__ = "0.1.0"
