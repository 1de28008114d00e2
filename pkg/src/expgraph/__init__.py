"""Exact group-order arithmetic and step audits for the exceptional families F4, E6, 2E6."""

__version__ = "0.1.0"
