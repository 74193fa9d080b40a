"""
Subcommands: simulate, sweep, bounds, verify-kernel, verify-inequalities.

Exit codes:
    0  success
    1  validation failure (bad config, failed verification)
    2  blow-up suspected
"""

import asyncio
from concurrent.futures import Executor, ProcessPoolExecutor
from enum import IntEnum
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from loguru import logger

from bounds.gronwall import BoundsQuery, ConstantProfile, GronwallBounds
from cli.config import ConfigError, RunConfig, apply_override, load_config, parse_config
from diagnostics.inequalities import InequalityAnalytics
from dynamics.runner import SimulationRunner
from ingestion.profiles import InitialDataValidator
from kernel.coercivity import CoercivityAnalytics
from kernel.memory import KernelKind, KernelSpec
from storage.checkpoint import CheckpointError
from storage.records import RecordStore

SWEEP_COLUMNS = ['value', 'N0', 'status', 't_end', 'max_Q', 'final_E']


class ExitCode(IntEnum):
    OK = 0
    VALIDATION_FAILURE = 1
    BLOWUP_SUSPECTED = 2


def simulate(config_path: str, output_dir: Optional[str] = None, cache_dir: Optional[str] = None,
             resume: bool = False) -> ExitCode:
    """Run one configuration; writes the record stream and the status file."""
    try:
        config = load_config(Path(config_path))
    except ConfigError as e:
        for violation in e.violations:
            logger.error(f"{config_path}: {violation}")
        return ExitCode.VALIDATION_FAILURE

    try:
        result = SimulationRunner(config, output_dir=output_dir, cache_dir=cache_dir).run(resume=resume)
    except CheckpointError as e:
        logger.error(f"{config_path}: cannot resume: {e}")
        return ExitCode.VALIDATION_FAILURE
    print(f"status={result.status.kind.value} records={len(result.records)} -> {result.records_path}")
    return ExitCode.BLOWUP_SUSPECTED if result.blowup_suspected else ExitCode.OK


def _sweep_member(config_text: str, axis: str, value: float, output_dir: str,
                  cache_dir: Optional[str]) -> Dict:
    """One sweep run in a worker process."""
    config = parse_config(config_text)
    if axis == 'N0':
        runner = SimulationRunner(config, output_dir=output_dir, cache_dir=cache_dir)
        base = runner.initial_state()
        size = InitialDataValidator.size(base.xi, base.xi_t, base.xi_tt, runner.basis)
        if size == 0:
            raise ConfigError(["sweep over N0 needs nonzero initial data"])
        config = apply_override(config, 'scale', config.init.scale * float(np.sqrt(value / size)))
    else:
        config = apply_override(config, axis, value)

    data = config.model_dump(mode='json')
    data['output']['name'] = f"{config.output.name}_{axis}_{value:g}"
    config = RunConfig.model_validate(data)

    result = SimulationRunner(config, output_dir=output_dir, cache_dir=cache_dir).run()
    row = {'value': value}
    row.update(result.summary())
    logger.info(f"Sweep {axis}={value:g} finished: {row['status']} at t={row['t_end']:.6g}")
    return row


async def run_sweep(
    config: RunConfig,
    axis: str,
    values: Sequence[float],
    output_dir: str,
    workers: int = 1,
    cache_dir: Optional[str] = None,
    executor: Optional[Executor] = None
) -> pd.DataFrame:
    """
    Fan out one simulation per value; rows come back ordered by value.

    Args:
        config: Base configuration
        axis: N0, k, tau, c, delta, alpha, cap or scale
        values: Sweep values
        output_dir: Directory for member outputs
        workers: Process count when no executor is given
        executor: Optional executor (default: ProcessPoolExecutor)
    """
    ordered = sorted(float(v) for v in values)
    if axis == 'N0':
        negative = [value for value in ordered if value <= 0]
        if negative:
            raise ConfigError([f"sweep over N0 needs positive values, got {value:g}" for value in negative])
    text = config.to_yaml()
    loop = asyncio.get_running_loop()

    own_executor = executor is None
    pool = executor or ProcessPoolExecutor(max_workers=workers)
    try:
        tasks = [
            loop.run_in_executor(pool, _sweep_member, text, axis, value, output_dir, cache_dir)
            for value in ordered
        ]
        rows = await asyncio.gather(*tasks)
    finally:
        if own_executor:
            pool.shutdown()

    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep(config_path: str, axis: str, values: Sequence[float], output_dir: Optional[str] = None,
          workers: int = 1, cache_dir: Optional[str] = None) -> ExitCode:
    """Sweep one axis; writes '<name>_sweep_<axis>.csv' with one summary row per value."""
    try:
        config = load_config(Path(config_path))
        if axis != 'N0':
            apply_override(config, axis, float(values[0]))
    except ConfigError as e:
        for violation in e.violations:
            logger.error(f"{config_path}: {violation}")
        return ExitCode.VALIDATION_FAILURE

    directory = output_dir or config.output.directory
    try:
        frame = asyncio.run(run_sweep(config, axis, values, directory, workers=workers, cache_dir=cache_dir))
    except ConfigError as e:
        for violation in e.violations:
            logger.error(f"sweep: {violation}")
        return ExitCode.VALIDATION_FAILURE

    path = Path(directory) / f"{config.output.name}_sweep_{axis}.csv"
    RecordStore.write_report(frame, path, summary_lines=[f"axis: {axis}"])
    print(frame.to_string(index=False))
    return ExitCode.OK


def bounds(N0: float, c0: float, affine: bool = False, z0_scale: float = 1.0, T_max: Optional[float] = None,
           samples: int = 201, output_dir: str = "output", name: str = "bounds") -> ExitCode:
    """T0 curve samples and the one-line T* summary."""
    try:
        query = BoundsQuery(N0=N0, profile=ConstantProfile(c0, affine=affine), z0_scale=z0_scale)
    except ValueError as e:
        logger.error(f"bounds: {e}")
        return ExitCode.VALIDATION_FAILURE

    t_star = GronwallBounds.t_star(query)
    t0_at_star = GronwallBounds.t0(query.N0, query.profile(t_star), query.z0_scale)
    horizon = T_max or 3.0 * t_star
    curve = GronwallBounds.t0_curve(query, np.linspace(0.0, horizon, samples))

    line = (
        f"N0={query.N0:g} z0={query.z0:g} {query.profile.label()} "
        f"T*={t_star:.6f} T0(N0,T*)={t0_at_star:.6f}"
    )
    directory = Path(output_dir)
    RecordStore.write_report(curve, directory / f"{name}_curve.csv", summary_lines=[line])
    RecordStore.write_summary(directory / f"{name}_summary.txt", line)
    print(line)
    return ExitCode.OK


def verify_kernel(kind: str, alpha: float = 0.5, rate: float = 1.0, scale: float = 1.0, corpus_size: int = 100,
                  n_steps: int = 100, dt: float = 0.01, seed: int = 0, output_dir: str = "output") -> ExitCode:
    """Coercivity report for one kernel; exit 1 if any signal breaks positivity."""
    try:
        spec = KernelSpec(kind=KernelKind(kind), alpha=alpha, rate=rate, scale=scale, delta=1.0)
    except ValueError as e:
        logger.error(f"verify-kernel: {e}")
        return ExitCode.VALIDATION_FAILURE

    sweep_result = CoercivityAnalytics.coercivity_sweep(spec, n_signals=corpus_size, n_steps=n_steps, dt=dt, seed=seed)
    lines = [
        f"kernel: {spec.kind.value} alpha={spec.alpha:g} rate={spec.rate:g} scale={spec.scale:g}",
        f"seed: {seed}",
        f"min_c_estimate: {sweep_result['min_c_estimate']:.17g}",
        f"violations: {sweep_result['violations']}",
    ]
    RecordStore.write_report(
        sweep_result['samples'], Path(output_dir) / f"coercivity_{spec.kind.value}.csv", summary_lines=lines
    )
    print("\n".join(lines))
    return ExitCode.VALIDATION_FAILURE if sweep_result['violations'] else ExitCode.OK


def verify_inequalities(dim: int, corpus_size: int = 200, seed: int = 0, output_dir: str = "output") -> ExitCode:
    """Inequality ratio report; exit 1 if a maximum is not finite or a Young check fails."""
    try:
        report = InequalityAnalytics.verify_inequalities(sample_count=corpus_size, dim=dim, seed=seed)
    except ValueError as e:
        logger.error(f"verify-inequalities: {e}")
        return ExitCode.VALIDATION_FAILURE

    summary = report.to_frame()
    lines: List[str] = [f"dim: {dim}", f"seed: {seed}", f"min_young_gap: {report.min_young_gap:.17g}"]
    RecordStore.write_report(summary, Path(output_dir) / f"inequalities_d{dim}.csv", summary_lines=lines)
    print(summary.to_string(index=False))

    young_ok = report.min_young_gap >= -1e-9
    return ExitCode.OK if report.all_finite and young_ok else ExitCode.VALIDATION_FAILURE
