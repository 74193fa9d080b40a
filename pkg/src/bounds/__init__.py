"""Existence-time and energy-growth bounds."""
