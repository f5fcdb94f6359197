"""Conditioned walks, path transforms and fusion rules around affine sl2."""

__version__ = "0.1.0"
