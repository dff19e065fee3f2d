"""Outage, symbol-error and rate analysis for satellite links relayed through
intelligent reflecting surfaces, with Monte-Carlo cross-checks."""

__version__ = "0.1.0"
