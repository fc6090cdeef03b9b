"""Verification lab for Osserman and conformally Osserman curvature algebra."""

__version__ = "0.1.0"
