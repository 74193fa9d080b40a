"""
Checkpoint snapshots of a running simulation.
Used for: resuming a run bit-for-bit from the last snapshot.
"""

import os
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

CHECKPOINT_VERSION = 1


class CheckpointError(ValueError):
    """Missing, unreadable or mismatched checkpoint."""


@dataclass
class Checkpoint:
    """
    Everything the stepper and the diagnostics need to continue.

    Attributes:
        config_hash: Hash of the run configuration that produced it
        times: (s,) stored times
        xi, xi_t, xi_tt: (s, n) stored modal states
        memory: (s, n) convolution values per state
        nonlinear: (<=2, n) last nonlinear evaluations
        dissipation: (3,) D_cum, last record time, last dissipation rate
        records: (r, columns) diagnostics rows produced so far
    """
    config_hash: str
    times: np.ndarray = field(repr=False)
    xi: np.ndarray = field(repr=False)
    xi_t: np.ndarray = field(repr=False)
    xi_tt: np.ndarray = field(repr=False)
    memory: np.ndarray = field(repr=False)
    nonlinear: np.ndarray = field(repr=False)
    dissipation: np.ndarray = field(repr=False)
    records: np.ndarray = field(repr=False)

    @property
    def n_steps(self) -> int:
        return len(self.times) - 1


class CheckpointStore:
    """Atomic .npz checkpoint files."""

    @staticmethod
    def save(checkpoint: Checkpoint, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_name(path.name + ".tmp")

        with open(tmp, 'wb') as fh:
            np.savez(
                fh,
                version=CHECKPOINT_VERSION,
                config_hash=np.array(checkpoint.config_hash),
                times=checkpoint.times,
                xi=checkpoint.xi,
                xi_t=checkpoint.xi_t,
                xi_tt=checkpoint.xi_tt,
                memory=checkpoint.memory,
                nonlinear=checkpoint.nonlinear,
                dissipation=checkpoint.dissipation,
                records=checkpoint.records,
            )
        os.replace(tmp, path)

        logger.info(f"Checkpoint at step {checkpoint.n_steps} (t={checkpoint.times[-1]:.6g}) written to {path}")
        return path

    @staticmethod
    def load(path: Path, expected_hash: str = None) -> Checkpoint:
        """
        Read a checkpoint.

        Raises:
            CheckpointError: file missing, wrong version, or config hash mismatch
        """
        path = Path(path)
        if not path.exists():
            raise CheckpointError(f"no checkpoint at {path}")

        try:
            with np.load(path, allow_pickle=False) as data:
                version = int(data['version'])
                if version != CHECKPOINT_VERSION:
                    raise CheckpointError(f"checkpoint version {version}, expected {CHECKPOINT_VERSION}")
                checkpoint = Checkpoint(
                    config_hash=str(data['config_hash']),
                    times=data['times'],
                    xi=data['xi'],
                    xi_t=data['xi_t'],
                    xi_tt=data['xi_tt'],
                    memory=data['memory'],
                    nonlinear=data['nonlinear'],
                    dissipation=data['dissipation'],
                    records=data['records'],
                )
        except (OSError, KeyError, EOFError, zipfile.BadZipFile) as e:
            raise CheckpointError(f"unreadable checkpoint {path}: {e}") from e

        if expected_hash is not None and checkpoint.config_hash != expected_hash:
            raise CheckpointError(
                f"checkpoint {path} belongs to config {checkpoint.config_hash[:12]}, "
                f"not {expected_hash[:12]}"
            )

        logger.info(f"Loaded checkpoint at step {checkpoint.n_steps} from {path}")
        return checkpoint
