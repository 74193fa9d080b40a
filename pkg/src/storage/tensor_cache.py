"""
Sidecar cache for triple-product tensors.
Used for: skipping the O(n^3) assembly when the same basis is reused.
"""

import os
import threading
import zipfile
from pathlib import Path
from typing import Optional

import numpy as np
from loguru import logger

from spectral.basis import SpectralBasis

CACHE_VERSION = 1


class TensorCache:
    """
    Versioned .npz sidecar files for triple tensors.

    Key pattern:
    - triple_d{dim}_L{l1}x{l2}..._n{n_modes}.v{version}.npz
    """

    def __init__(self, directory: str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    def key(self, basis: SpectralBasis) -> str:
        lengths = "x".join(f"{length:.12g}" for length in basis.domain.lengths)
        return f"triple_d{basis.domain.dim}_L{lengths}_n{basis.n}.v{CACHE_VERSION}.npz"

    def path(self, basis: SpectralBasis) -> Path:
        return self.directory / self.key(basis)

    def load(self, basis: SpectralBasis) -> Optional[np.ndarray]:
        """Cached tensor, or None on miss / version or mode mismatch."""
        path = self.path(basis)
        if not path.exists():
            return None

        try:
            with np.load(path, allow_pickle=False) as data:
                if int(data['version']) != CACHE_VERSION:
                    logger.debug(f"Tensor cache version mismatch in {path.name}")
                    return None
                if not np.array_equal(data['modes'], basis.modes):
                    logger.warning(f"Tensor cache {path.name} holds a different mode ordering, ignoring")
                    return None
                tensor = data['triple']
        except (OSError, KeyError, ValueError, EOFError, zipfile.BadZipFile) as e:
            logger.warning(f"Unreadable tensor cache {path}, recomputing: {e}")
            return None

        logger.debug(f"Tensor cache hit: {path.name}")
        return tensor

    def store(self, basis: SpectralBasis, tensor: np.ndarray):
        """Write the tensor for this basis; readers never see a partial file."""
        path = self.path(basis)
        tmp = path.with_name(f"{path.name}.{os.getpid()}.{threading.get_ident()}.tmp")
        with open(tmp, 'wb') as fh:
            np.savez(fh, version=CACHE_VERSION, modes=basis.modes, triple=tensor)
        os.replace(tmp, path)
        logger.info(f"Cached triple tensor ({basis.n} modes) to {path}")

    def clear(self):
        """Remove all cached tensors."""
        for path in self.directory.glob("triple_*.npz"):
            path.unlink()
        logger.info("Tensor cache cleared")
