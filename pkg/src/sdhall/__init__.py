"""Exact Hall algebra and Hall module computations for quivers with duality."""

__version__ = "0.1.0"
