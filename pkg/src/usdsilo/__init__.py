"""USD-silo curve construction, pricing and HJM simulation for non-G5 currencies."""

__version__ = "0.1.0"
