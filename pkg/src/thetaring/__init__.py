"""Exact theta rings of snc log Calabi-Yau pairs, fs monoids and tropical families."""

__version__ = "0.1.0"
