"""Bismut Ricci flat generalized metrics on aligned homogeneous spaces G1 x G2 / K."""

__version__ = "0.1.0"
