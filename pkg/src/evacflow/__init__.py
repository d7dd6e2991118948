"""Wildfire-aware evacuation planning on time-expanded road networks."""

__version__ = "0.1.0"
