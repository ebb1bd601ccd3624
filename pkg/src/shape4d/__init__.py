"""Multidimensional geometric constellation shaping toolkit."""
__version__ = "0.1.0"
