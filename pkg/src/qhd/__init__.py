"""Combinatorial QHD smoothings of surface singularities via sandwich presentations."""

__version__ = "0.1.0"
