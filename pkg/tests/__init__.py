"""Tests for odolab package."""
