"""Traditional and extended contextuality of measurement behaviors."""

__version__ = "0.1.0"
