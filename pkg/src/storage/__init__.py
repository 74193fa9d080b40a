"""Record files, checkpoints and the tensor cache."""
