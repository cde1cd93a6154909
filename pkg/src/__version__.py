# src/__version__.py

__version__ = "0.2.0"
