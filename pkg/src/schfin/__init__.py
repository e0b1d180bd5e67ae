"""Finite ringed posets over F_p: schematic spaces, their points and étale covers."""

__version__ = "0.1.0"
