"""Transitivity certification and numerical exploration of skew-product
endomorphisms of the n-torus."""

__version__ = "0.1.0"
