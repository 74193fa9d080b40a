"""Energies, blow-up indicators, continuation monitor and inequality checks."""
