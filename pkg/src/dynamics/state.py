"""
State containers for the semi-discrete Volterra system.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from kernel.memory import KernelSpec
from spectral.basis import SpectralBasis


@dataclass(frozen=True)
class PhysicalParams:
    """
    Coefficients of one problem instance.

    Attributes:
        tau: Relaxation time (> 0)
        c: Sound speed (> 0)
        k: Nonlinearity coefficient
        kernel: Memory kernel and damping weight delta
    """
    tau: float
    c: float
    k: float = 0.0
    kernel: KernelSpec = field(default_factory=KernelSpec.zero)

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be > 0 (well-posedness hypothesis), got {self.tau}")
        if not self.c > 0:
            raise ValueError(f"c must be > 0, got {self.c}")

    @property
    def delta(self) -> float:
        return self.kernel.delta


@dataclass(frozen=True)
class ModalState:
    """
    chi = (xi, xi_t, xi_tt) at time t.

    Attributes:
        t: Time
        xi: Displacement-potential coefficients
        xi_t: First time derivative
        xi_tt: Second time derivative
    """
    t: float
    xi: np.ndarray
    xi_t: np.ndarray
    xi_tt: np.ndarray

    @property
    def n(self) -> int:
        return len(self.xi)

    @property
    def chi(self) -> np.ndarray:
        return np.concatenate([self.xi, self.xi_t, self.xi_tt])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.xi)) and np.all(np.isfinite(self.xi_t))
                    and np.all(np.isfinite(self.xi_tt)))

    @classmethod
    def zeros(cls, n: int, t: float = 0.0) -> 'ModalState':
        return cls(t=t, xi=np.zeros(n), xi_t=np.zeros(n), xi_tt=np.zeros(n))


class TerminationKind(Enum):
    """How a trajectory stopped."""
    RUNNING = "running"
    COMPLETED = "completed"
    BLOWUP_SUSPECTED = "blowup_suspected"
    MAX_STEPS_REACHED = "max_steps_reached"


@dataclass(frozen=True)
class Termination:
    """Termination status; t is the suspicion time for BLOWUP_SUSPECTED."""
    kind: TerminationKind = TerminationKind.RUNNING
    t: Optional[float] = None
    reason: str = ""

    @property
    def terminated(self) -> bool:
        return self.kind != TerminationKind.RUNNING


@dataclass
class Trajectory:
    """
    Modal trajectory on a uniform grid t_n = n * dt.

    history holds xi_tt at every stored state (the memory-term input);
    memory holds the convolution (K * xi_tt)(t_n) per state;
    nonlinear holds the last nonlinear right-hand side (explicit extrapolation).
    """
    params: PhysicalParams
    basis: SpectralBasis
    dt: float
    states: List[ModalState] = field(default_factory=list)
    memory: List[np.ndarray] = field(default_factory=list)
    nonlinear: List[np.ndarray] = field(default_factory=list)
    status: Termination = field(default_factory=Termination)
    _history: np.ndarray = field(default=None, repr=False)

    @property
    def n_steps(self) -> int:
        """Number of completed steps."""
        return len(self.states) - 1

    @property
    def current(self) -> ModalState:
        return self.states[-1]

    @property
    def history(self) -> np.ndarray:
        """xi_tt history, one row per stored state."""
        return self._history[:len(self.states)]

    def append(self, state: ModalState, conv: np.ndarray, nonlinear: np.ndarray):
        """Store a new state with its memory value and nonlinear term."""
        index = len(self.states)
        if self._history is None:
            self._history = np.zeros((64, state.n))
        elif index >= len(self._history):
            grown = np.zeros((2 * len(self._history), state.n))
            grown[:index] = self._history[:index]
            self._history = grown

        self._history[index] = state.xi_tt
        self.states.append(state)
        self.memory.append(conv)
        # Only the last two evaluations are ever used
        self.nonlinear = (self.nonlinear + [nonlinear])[-2:]

    def time_grid(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def as_arrays(self):
        """(times, xi, xi_t, xi_tt) stacked over states."""
        return (
            self.time_grid(),
            np.array([s.xi for s in self.states]),
            np.array([s.xi_t for s in self.states]),
            np.array([s.xi_tt for s in self.states]),
        )
