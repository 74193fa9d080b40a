"""
IMEX time stepping of the modal Volterra system.

Implicit (trapezoidal): the linear block and the current-lag memory term.
Explicit: the quadratic term (extrapolated to the half step) and the
strictly retarded memory sum.
"""

from typing import Optional

import numpy as np
from loguru import logger

from dynamics.modal import LinearOperatorData, ModalSystem
from dynamics.state import ModalState, PhysicalParams, Termination, TerminationKind, Trajectory
from kernel.memory import MemoryKernel, QuadratureWeights
from spectral.basis import SpectralBasis
from spectral.operators import AssembledOperators


class StepError(RuntimeError):
    """Implicit per-mode system is singular or ill-conditioned."""


class IMEXIntegrator:
    """
    Second-order IMEX stepper for chi' = L chi + NL(chi) - (delta/tau) K (K * xi_tt).

    Per mode the implicit update solves a 3x3 system
        (I - dt/2 A_k + dt/2 mu_k w_0 e3 e3^T) u_{n+1}
            = (I + dt/2 A_k) u_n + e3 [dt N* - dt/2 mu_k (conv_n + R_{n+1})]
    where w_0 = moments[0], R_{n+1} the retarded sum and
    N* = 3/2 N_n - 1/2 N_{n-1}.

    The memory term uses right-endpoint product integration:
    (K * xi_tt)(t_m) = sum_{j=1}^{m} moments[m-j] xi_tt(t_j).
    """

    # Implicit matrices with condition number above this are rejected
    MAX_CONDITION = 1e12

    def __init__(
        self,
        params: PhysicalParams,
        basis: SpectralBasis,
        operators: AssembledOperators,
        dt: float,
        max_steps: int
    ):
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        if max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {max_steps}")

        self.params = params
        self.basis = basis
        self.operators = operators
        self.dt = dt
        self.max_steps = max_steps

        self.linear: LinearOperatorData = ModalSystem.assemble_linear(params, operators)
        self.has_memory = not params.kernel.is_critical

        if self.has_memory:
            self.weights: Optional[QuadratureWeights] = MemoryKernel.quadrature_weights(
                params.kernel, dt, max_steps + 1
            )
            w0 = self.weights.moments[0]
        else:
            self.weights = None
            w0 = 0.0

        n = basis.n
        eye = np.broadcast_to(np.eye(3), (n, 3, 3))
        implicit = eye - 0.5 * dt * self.linear.blocks
        if self.has_memory:
            implicit = implicit.copy()
            implicit[:, 2, 2] += 0.5 * dt * self.linear.memory_coefficients * w0

        condition = np.linalg.cond(implicit)
        if not np.all(np.isfinite(condition)) or np.max(condition) > self.MAX_CONDITION:
            raise StepError(f"implicit per-mode system ill-conditioned (cond={np.max(condition):.3g}) at dt={dt}")

        self._inverse = np.linalg.inv(implicit)
        self._explicit = eye + 0.5 * dt * self.linear.blocks

    def start(self, initial: ModalState) -> Trajectory:
        """New trajectory at t = 0 with the given initial state."""
        trajectory = Trajectory(params=self.params, basis=self.basis, dt=self.dt)
        trajectory.append(
            initial,
            conv=np.zeros(self.basis.n),
            nonlinear=self._nonlinear(initial),
        )
        return trajectory

    def step(self, traj: Trajectory) -> Trajectory:
        """
        Advance the trajectory by one step of size dt.

        Non-finite results terminate the trajectory with BLOWUP_SUSPECTED and
        leave the last valid state in place.
        """
        if traj.status.terminated:
            raise StepError(f"trajectory already terminated ({traj.status.kind.value})")

        n_steps = traj.n_steps
        if n_steps >= self.max_steps:
            traj.status = Termination(TerminationKind.MAX_STEPS_REACHED, t=traj.current.t)
            return traj

        current = traj.current
        u = np.stack([current.xi, current.xi_t, current.xi_tt], axis=1)

        # Explicit quadratic term extrapolated to the half step
        if len(traj.nonlinear) >= 2 and n_steps >= 1:
            forcing = 1.5 * traj.nonlinear[-1] - 0.5 * traj.nonlinear[-2]
        else:
            forcing = traj.nonlinear[-1]
        source = self.dt * forcing

        if self.has_memory:
            retarded = self.retarded_memory(traj, n_steps + 1)
            source = source - 0.5 * self.dt * self.linear.memory_coefficients * (traj.memory[-1] + retarded)
        else:
            retarded = None

        rhs = np.einsum('kab,kb->ka', self._explicit, u)
        rhs[:, 2] += source
        u_new = np.einsum('kab,kb->ka', self._inverse, rhs)

        t_new = (n_steps + 1) * self.dt
        state = ModalState(t=t_new, xi=u_new[:, 0], xi_t=u_new[:, 1], xi_tt=u_new[:, 2])

        if not state.is_finite():
            logger.warning(f"Non-finite modal state at t={t_new:.6g}, stopping")
            traj.status = Termination(TerminationKind.BLOWUP_SUSPECTED, t=t_new, reason="non-finite state")
            return traj

        if self.has_memory:
            conv = self.weights.moments[0] * state.xi_tt + retarded
        else:
            conv = np.zeros(self.basis.n)

        traj.append(state, conv=conv, nonlinear=self._nonlinear(state))
        return traj

    def retarded_memory(self, traj: Trajectory, m: int) -> np.ndarray:
        """sum_{j=1}^{m-1} moments[m-j] xi_tt(t_j), the known part of (K * xi_tt)(t_m)."""
        return MemoryKernel.retarded_sum(self.weights, traj.history[1:], m - 1)

    def third_derivative(self, state: ModalState, conv: np.ndarray) -> np.ndarray:
        """
        xi_ttt reconstructed from the equation at a stored state.

        tau xi_ttt = -xi_tt - c^2 lambda xi - tau c^2 lambda xi_t - delta lambda conv - 2k T(xi_t, xi_tt)
        """
        blocks = self.linear.blocks
        value = blocks[:, 2, 0] * state.xi + blocks[:, 2, 1] * state.xi_t + blocks[:, 2, 2] * state.xi_tt
        if self.has_memory:
            value = value - self.linear.memory_coefficients * conv
        return value + self._nonlinear(state)

    def _nonlinear(self, state: ModalState) -> np.ndarray:
        return ModalSystem.nonlinear_rhs(state, self.operators.triple, self.params.k, self.params.tau)
