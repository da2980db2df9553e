"""Exact tropical geometry, Novikov series and filtered A-infinity tools."""

__version__ = "0.1.0"
