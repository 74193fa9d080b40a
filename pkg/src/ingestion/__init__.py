"""Initial-data profiles and validation."""
