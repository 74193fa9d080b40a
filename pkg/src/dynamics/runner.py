"""
Simulation orchestrator.
Coordinates basis assembly, time stepping, diagnostics, the continuation
monitor, record output and checkpoints.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd
from loguru import logger

from cli.config import RunConfig
from diagnostics.energy import RECORD_COLUMNS, DiagnosticsRecord, DissipationTracker
from diagnostics.monitor import ContinuationMonitor, MonitorRuleBuilder, MonitorStatus
from dynamics.integrator import IMEXIntegrator
from dynamics.state import ModalState, Termination, TerminationKind, Trajectory
from ingestion.profiles import InitialDataValidator, InitialProfiles, ProfileSpec
from spectral.basis import EigenBasis, SpectralBasis
from spectral.operators import GalerkinOperators
from storage.checkpoint import Checkpoint, CheckpointStore
from storage.records import RecordStore
from storage.tensor_cache import TensorCache


@dataclass
class RunResult:
    """
    Outcome of one simulation.

    Attributes:
        trajectory: Modal trajectory with its termination status
        records: Diagnostics stream, one record per output stride
        monitor_status: Passing or BlowupSuspected
        n0: Size of the projected initial data
        records_path: Written record file (None when output is off)
    """
    trajectory: Trajectory
    records: List[DiagnosticsRecord]
    monitor_status: MonitorStatus
    n0: float
    records_path: Optional[Path] = None

    @property
    def status(self) -> Termination:
        return self.trajectory.status

    @property
    def blowup_suspected(self) -> bool:
        return self.status.kind == TerminationKind.BLOWUP_SUSPECTED

    def frame(self) -> pd.DataFrame:
        return RecordStore.records_frame((r.to_row() for r in self.records), RECORD_COLUMNS)

    def summary(self) -> dict:
        """N0, termination time, max Q, final E."""
        return {
            'N0': self.n0,
            'status': self.status.kind.value,
            't_end': self.status.t if self.status.t is not None else self.trajectory.current.t,
            'max_Q': max((r.Q for r in self.records), default=0.0),
            'final_E': self.records[-1].E if self.records else 0.0,
        }


class SimulationRunner:
    """
    Runs one configuration end to end.

    Flow:
    Config → Basis/Operators → Initial data → [Step → Record → Monitor]* → Files
    """

    def __init__(self, config: RunConfig, output_dir: Optional[str] = None, cache_dir: Optional[str] = None):
        self.config = config
        self.output_dir = Path(output_dir or config.output.directory)
        self.cache_dir = cache_dir or config.output.cache_dir

        self.params = config.params.to_params()
        self.basis: SpectralBasis = EigenBasis.eigenpairs(config.domain.to_domain(), config.domain.n_modes)
        cache = TensorCache(self.cache_dir) if self.cache_dir else None
        self.operators = GalerkinOperators.assemble(self.basis, cache=cache)

        self.n_steps = config.time.n_steps
        self.integrator = IMEXIntegrator(
            self.params, self.basis, self.operators, config.time.dt, max_steps=self.n_steps
        )

    @property
    def records_path(self) -> Path:
        return self.output_dir / f"{self.config.output.name}{self.config.output.format.suffix}"

    @property
    def status_path(self) -> Path:
        return self.output_dir / f"{self.config.output.name}.status"

    @property
    def checkpoint_path(self) -> Path:
        return self.output_dir / f"{self.config.output.name}.ckpt.npz"

    def initial_state(self) -> ModalState:
        """Projected or prescribed (xi, xi_t, xi_tt) at t = 0, times init.scale."""
        init = self.config.init
        n = self.basis.n

        if init.modes is not None:
            triples = [np.zeros(n), np.zeros(n), np.zeros(n)]
            for entry in init.modes:
                for component in range(3):
                    triples[component][entry.mode - 1] = entry.values[component]
        elif any(p is not None for p in (init.psi0, init.psi1, init.psi2)):
            domain = self.basis.domain
            fields = [
                InitialProfiles.build(p.to_profile() if p is not None else ProfileSpec(), domain)
                for p in (init.psi0, init.psi1, init.psi2)
            ]
            triples = list(GalerkinOperators.project_initial_data(*fields, self.basis))
        elif init.random is not None:
            triples = list(self.config.random_triples(self.basis.eigenvalues))
        else:
            triples = [np.zeros(n), np.zeros(n), np.zeros(n)]

        triples = [init.scale * values for values in triples]
        for label, values in zip(('psi0', 'psi1', 'psi2'), triples):
            if not InitialDataValidator.validate_coefficients(values, self.basis, label):
                raise ValueError(f"invalid initial data for {label}")

        return ModalState(t=0.0, xi=triples[0], xi_t=triples[1], xi_tt=triples[2])

    def run(self, resume: bool = False, write: bool = True, stop_after: Optional[int] = None) -> RunResult:
        """
        Integrate to t_end or termination.

        Args:
            resume: Continue from the checkpoint of this configuration
            write: Write the record stream and status file
            stop_after: Stop (status RUNNING) once this many steps exist; used to interrupt runs
        """
        config = self.config
        stride = config.time.output_stride
        interval = config.output.checkpoint_interval

        tracker = DissipationTracker(
            self.params, self.basis, self.integrator, dim=config.monitor_dim, scaled=config.monitor.scaled
        )
        monitor = ContinuationMonitor()
        monitor.add_rule(MonitorRuleBuilder.indicator_cap(config.monitor.cap))

        initial = self.initial_state()
        n0 = InitialDataValidator.size(initial.xi, initial.xi_t, initial.xi_tt, self.basis)

        if resume:
            traj = self._restore(tracker)
            for record in tracker.records:
                monitor.check(record)
            logger.info(f"Resuming '{config.output.name}' at step {traj.n_steps} (t={traj.current.t:.6g})")
        else:
            traj = self.integrator.start(initial)
            monitor.check(tracker.record(traj.current, traj.memory[-1]))
            logger.info(
                f"Starting '{config.output.name}': n={self.basis.n}, dt={config.time.dt:g}, "
                f"t_end={config.time.t_end:g}, N0={n0:.6g}"
            )

        while not traj.status.terminated:
            if traj.n_steps >= self.n_steps:
                traj.status = Termination(TerminationKind.COMPLETED, t=traj.current.t)
                break
            if stop_after is not None and traj.n_steps >= stop_after:
                logger.info(f"Stopping at step {traj.n_steps} on request")
                break

            self.integrator.step(traj)
            if traj.status.terminated:
                break

            step = traj.n_steps
            if step % stride == 0:
                record = tracker.record(traj.current, traj.memory[-1])
                status = monitor.check(record)
                logger.debug(f"t={record.t:.6g} E={record.E:.6g} Q={record.Q:.6g}")
                if status.suspected:
                    traj.status = Termination(
                        TerminationKind.BLOWUP_SUSPECTED,
                        t=status.t,
                        reason=f"Q={status.value:.6g} > M0={status.cap:g}",
                    )
                    break

            if interval and step % interval == 0:
                self._save_checkpoint(traj, tracker)

        if traj.status.kind == TerminationKind.BLOWUP_SUSPECTED:
            logger.warning(f"Blow-up suspected at t={traj.status.t:.6g}: {traj.status.reason}")
        elif traj.status.terminated:
            logger.info(f"Run '{config.output.name}' {traj.status.kind.value} at t={traj.current.t:.6g}")

        result = RunResult(
            trajectory=traj,
            records=list(tracker.records),
            monitor_status=monitor.status,
            n0=n0,
        )

        if write and traj.status.terminated:
            result.records_path = RecordStore.write_records(result.frame(), self.records_path, config.output.format)
            summary = result.summary()
            RecordStore.write_summary(
                self.status_path,
                f"status={summary['status']} t={summary['t_end']:.17g} max_Q={summary['max_Q']:.17g} "
                f"reason={traj.status.reason or '-'}",
            )
        return result

    def _save_checkpoint(self, traj: Trajectory, tracker: DissipationTracker):
        times, xi, xi_t, xi_tt = traj.as_arrays()
        records = np.array(
            [[getattr(r, column) for column in RECORD_COLUMNS] for r in tracker.records], dtype=float
        ).reshape(-1, len(RECORD_COLUMNS))

        CheckpointStore.save(
            Checkpoint(
                config_hash=self.config.config_hash(),
                times=times,
                xi=xi,
                xi_t=xi_t,
                xi_tt=xi_tt,
                memory=np.array(traj.memory),
                nonlinear=np.array(traj.nonlinear),
                dissipation=np.array(tracker.snapshot(), dtype=float),
                records=records,
            ),
            self.checkpoint_path,
        )

    def _restore(self, tracker: DissipationTracker) -> Trajectory:
        checkpoint = CheckpointStore.load(self.checkpoint_path, expected_hash=self.config.config_hash())

        traj = Trajectory(params=self.params, basis=self.basis, dt=self.config.time.dt)
        for i, t in enumerate(checkpoint.times):
            state = ModalState(
                t=float(t), xi=checkpoint.xi[i], xi_t=checkpoint.xi_t[i], xi_tt=checkpoint.xi_tt[i]
            )
            traj.append(state, conv=checkpoint.memory[i], nonlinear=checkpoint.nonlinear[-1])
        traj.nonlinear = [row for row in checkpoint.nonlinear]

        d_cum, last_t, last_rate = (float(v) for v in checkpoint.dissipation)
        records = [
            DiagnosticsRecord(**{column: float(value) for column, value in zip(RECORD_COLUMNS, row)})
            for row in checkpoint.records
        ]
        tracker.restore(d_cum, last_t, last_rate, records)
        return traj
