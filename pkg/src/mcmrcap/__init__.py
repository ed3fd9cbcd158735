"""Exact capacity analysis for multi-channel multi-radio wireless networks."""

__version__ = "0.1.0"
