"""Galois-type correspondences for finite operation systems."""

__version__ = "0.1.0"
