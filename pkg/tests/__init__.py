# tests/__init__.py
"""Tests package for fvlab."""
