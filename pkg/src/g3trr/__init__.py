"""Exact reconstruction of the genus-3 topological recursion relation."""

__version__ = "0.1.0"
