"""Exact blow-up analysis of tangent-to-the-identity germs in the plane."""

__version__ = "0.1.0"
