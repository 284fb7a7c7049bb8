# src/grid_islander/__init__.py
"""Grid islanding by self-organizing node migration."""

__version__ = "0.1.0"
