"""Ancestral Search Toolkit - causal structure learning from conditional independence tests."""

__version__ = "0.1.0"
