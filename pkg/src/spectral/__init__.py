"""Dirichlet eigenbases, Galerkin operators and norms."""
