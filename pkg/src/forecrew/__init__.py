"""Adaptive multi-robot task allocation toolkit."""

__version__ = "0.1.0"
