"""Bayesian spanning-tree graphical models."""

__version__ = "0.1.0"
