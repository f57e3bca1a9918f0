"""Ultragraph boundary-path spaces, groupoids and topological full groups."""

__version__ = "0.1.0"
