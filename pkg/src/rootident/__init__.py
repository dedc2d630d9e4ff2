"""Root identification for noisy functions: tests, bounds, simulation."""

__version__ = "0.1.0"
