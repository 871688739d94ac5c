"""Core functionality for odolab package."""
