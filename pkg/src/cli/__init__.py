"""Run configuration, runtime settings and subcommands."""
