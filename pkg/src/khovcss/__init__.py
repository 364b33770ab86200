"""Khovanov homology slices as CSS quantum codes."""

__version__ = "0.1.0"
