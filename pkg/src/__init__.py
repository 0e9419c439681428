"""Cooperative spectrum sharing market: auctions, equilibria and sweeps."""

__version__ = "0.1.0"
