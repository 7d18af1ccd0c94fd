"""Detect upgradeable proxy contracts, reconstruct their version lineage,
and expose the resulting evolution graph."""

__version__ = "0.1.0"
