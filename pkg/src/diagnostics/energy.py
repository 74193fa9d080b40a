"""
Energy, dissipation and blow-up indicators along modal trajectories.

Energies are spectral images of the physical norms:
- ||grad u||^2 = sum lambda c^2
- ||Laplace u||^2 = sum lambda^2 c^2
"""

from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from loguru import logger

from dynamics.state import ModalState, PhysicalParams, Trajectory
from spectral.basis import SpectralBasis
from spectral.norms import SpectralNorms

RECORD_COLUMNS = [
    't', 'E', 'E_full', 'D_cum', 'Q',
    'grad_psi_tt', 'lap_psi', 'lap_psi_t', 'psi_ttt', 'memory_lap_psi_tt',
]


@dataclass(frozen=True)
class DiagnosticsRecord:
    """
    Diagnostics at one output time.

    Attributes:
        t: Time
        E: (tau/2)||grad psi_tt||^2 + (tau c^2/2)||Laplace psi_t||^2
        E_full: ||grad psi_tt||^2 + ||Laplace psi||^2 + ||Laplace psi_t||^2
        D_cum: int_0^t ||psi_ttt||^2 + delta int_0^t ||K * Laplace psi_tt||^2 (trapezoidal)
        Q: Blow-up indicator for the configured dimension
        grad_psi_tt, lap_psi, lap_psi_t, psi_ttt, memory_lap_psi_tt: Norm breakdown
    """
    t: float
    E: float
    E_full: float
    D_cum: float
    Q: float
    grad_psi_tt: float
    lap_psi: float
    lap_psi_t: float
    psi_ttt: float
    memory_lap_psi_tt: float

    def to_row(self) -> Dict[str, float]:
        return asdict(self)


class EnergyAnalytics:
    """
    Energy functionals and indicators.

    Key quantities:
    - E(t): working energy of the a-priori estimate
    - E_full: full energy (three squared norms)
    - D_cum: cumulative dissipation
    - Q_d: dimension-dependent blow-up indicator
    """

    @staticmethod
    def energy(state: ModalState, params: PhysicalParams, basis: SpectralBasis) -> float:
        """E = (tau/2) sum lambda xi_tt^2 + (tau c^2/2) sum lambda^2 xi_t^2."""
        lam = basis.eigenvalues
        return float(
            0.5 * params.tau * np.sum(lam * state.xi_tt ** 2)
            + 0.5 * params.tau * params.c ** 2 * np.sum(lam ** 2 * state.xi_t ** 2)
        )

    @staticmethod
    def full_energy(state: ModalState, basis: SpectralBasis) -> float:
        """||grad psi_tt||^2 + ||Laplace psi||^2 + ||Laplace psi_t||^2."""
        lam = basis.eigenvalues
        return float(
            np.sum(lam * state.xi_tt ** 2)
            + np.sum(lam ** 2 * state.xi ** 2)
            + np.sum(lam ** 2 * state.xi_t ** 2)
        )

    @staticmethod
    def dissipation_rate(psi_ttt: np.ndarray, conv: np.ndarray, delta: float, basis: SpectralBasis) -> float:
        """||psi_ttt||^2 + delta ||K * Laplace psi_tt||^2 at one time."""
        return float(np.sum(psi_ttt ** 2) + delta * np.sum((basis.eigenvalues * conv) ** 2))

    @staticmethod
    def blowup_indicator(state: ModalState, basis: SpectralBasis, dim: int, scaled: bool = False) -> float:
        """
        Q_d = ||psi_t||_{H^a} + ||psi_tt||_{H^b}.

        d = 1, 2: (a, b) = (1, 0)
        d = 3: (a, b) = (3/2, 1/2)
        scaled=True: (a, b) = (d/2, d/2 - 1) for every d
        """
        if dim not in (1, 2, 3):
            raise ValueError(f"dim must be 1, 2 or 3, got {dim}")

        if scaled:
            a, b = dim / 2.0, dim / 2.0 - 1.0
        elif dim <= 2:
            a, b = 1.0, 0.0
        else:
            a, b = 1.5, 0.5

        lam = basis.eigenvalues
        return SpectralNorms.weighted_norm(state.xi_t, a, lam) + SpectralNorms.weighted_norm(state.xi_tt, b, lam)


class DissipationTracker:
    """
    Builds the record stream for a trajectory.

    D_cum is integrated by the trapezoidal rule over the record times, so it
    is nondecreasing by construction.
    """

    def __init__(self, params: PhysicalParams, basis: SpectralBasis, integrator, dim: int, scaled: bool = False):
        self.params = params
        self.basis = basis
        self.integrator = integrator
        self.dim = dim
        self.scaled = scaled

        self.d_cum = 0.0
        self.last_t: Optional[float] = None
        self.last_rate: Optional[float] = None
        self.records: List[DiagnosticsRecord] = []

    def record(self, state: ModalState, conv: np.ndarray) -> DiagnosticsRecord:
        """Diagnostics at a stored state with its memory value."""
        lam = self.basis.eigenvalues
        psi_ttt = self.integrator.third_derivative(state, conv)
        rate = EnergyAnalytics.dissipation_rate(psi_ttt, conv, self.params.delta, self.basis)

        if self.last_t is not None:
            self.d_cum += 0.5 * (state.t - self.last_t) * (self.last_rate + rate)
        self.last_t, self.last_rate = state.t, rate

        record = DiagnosticsRecord(
            t=state.t,
            E=EnergyAnalytics.energy(state, self.params, self.basis),
            E_full=EnergyAnalytics.full_energy(state, self.basis),
            D_cum=self.d_cum,
            Q=EnergyAnalytics.blowup_indicator(state, self.basis, self.dim, self.scaled),
            grad_psi_tt=SpectralNorms.gradient_norm(state.xi_tt, lam),
            lap_psi=SpectralNorms.laplacian_norm(state.xi, lam),
            lap_psi_t=SpectralNorms.laplacian_norm(state.xi_t, lam),
            psi_ttt=float(np.sqrt(np.sum(psi_ttt ** 2))),
            memory_lap_psi_tt=SpectralNorms.laplacian_norm(conv, lam),
        )
        self.records.append(record)
        return record

    def snapshot(self) -> Tuple[float, float, float]:
        """(D_cum, last_t, last_rate) for checkpoints."""
        return (
            self.d_cum,
            np.nan if self.last_t is None else self.last_t,
            np.nan if self.last_rate is None else self.last_rate,
        )

    def restore(self, d_cum: float, last_t: float, last_rate: float, records: List[DiagnosticsRecord]):
        self.d_cum = d_cum
        self.last_t = None if np.isnan(last_t) else last_t
        self.last_rate = None if np.isnan(last_rate) else last_rate
        self.records = list(records)

    @staticmethod
    def full_energy_and_dissipation(traj: Trajectory, integrator, stride: int = 1) -> Tuple[float, float]:
        """
        (E_full, D_cum) at the end of a trajectory prefix.

        Args:
            traj: Nonempty trajectory prefix
            integrator: The IMEXIntegrator that produced it (psi_ttt reconstruction)
            stride: Output stride in steps for the trapezoidal rule
        """
        if not traj.states:
            raise ValueError("trajectory prefix is empty")

        tracker = DissipationTracker(traj.params, traj.basis, integrator, dim=traj.basis.domain.dim)
        indices = list(range(0, len(traj.states), stride))
        if indices[-1] != len(traj.states) - 1:
            indices.append(len(traj.states) - 1)

        record = None
        for i in indices:
            record = tracker.record(traj.states[i], traj.memory[i])
        logger.debug(f"Dissipation over {len(indices)} records: D_cum={record.D_cum:.6g}")
        return record.E_full, record.D_cum
