"""Modal state, IMEX time stepping and simulation runs."""
