"""Utility functions for odolab package."""
