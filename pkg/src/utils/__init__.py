"""Utility modules for the Ancestral Search Toolkit."""
