"""Random Cayley graphs and the diameter-2 threshold functional."""

__version__ = "0.1.0"
