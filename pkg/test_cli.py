"""
Tests for configuration parsing, settings, subcommands and the sweep fan-out.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from cli.commands import (
    ExitCode,
    SWEEP_COLUMNS,
    bounds,
    run_sweep,
    simulate,
    sweep,
    verify_inequalities,
    verify_kernel,
)
from cli.config import ConfigError, apply_override, parse_config
from cli.settings import load_settings
from diagnostics.energy import RECORD_COLUMNS
from kernel.memory import KernelKind
from main import main
from storage.checkpoint import Checkpoint, CheckpointStore
from storage.records import OutputFormat, RecordStore

MINIMAL = """
params:
  tau: 1.0
time:
  dt: 0.1
  t_end: 1.0
"""


class TestParseConfig:

    def test_minimal_config_gets_defaults(self):
        config = parse_config(MINIMAL)
        assert config.domain.dim == 1
        assert config.domain.n_modes == 8
        assert config.params.c == 1.0
        assert config.params.k == 0.0
        assert config.params.kernel.kind is KernelKind.ZERO
        assert config.monitor.cap == 1e6
        assert config.monitor_dim == 1
        assert config.output.format is OutputFormat.CSV
        assert config.seed == 0
        assert config.time.n_steps == 10

    def test_zero_tau_rejected(self):
        with pytest.raises(ConfigError) as info:
            parse_config(MINIMAL.replace("tau: 1.0", "tau: 0"))
        assert any("tau must be > 0" in v for v in info.value.violations)

    def test_abel_order_one_rejected(self):
        text = MINIMAL.replace("tau: 1.0", "tau: 1.0\n  kernel:\n    kind: abel\n    alpha: 1.0\n    delta: 1.0")
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert any("Abel order alpha must lie in (0, 1)" in v for v in info.value.violations)

    def test_unknown_key_is_named(self):
        with pytest.raises(ConfigError) as info:
            parse_config(MINIMAL.replace("tau: 1.0", "tau: 1.0\n  foo: 2"))
        assert info.value.violations == ["params.foo: unknown key 'foo'"]

    def test_all_violations_reported(self):
        text = MINIMAL.replace("tau: 1.0", "tau: -1\n  kernel:\n    alpha: 1.5") + "monitor:\n  cap: 0\n"
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert len(info.value.violations) >= 3

    def test_stride_must_divide_horizon(self):
        with pytest.raises(ConfigError) as info:
            parse_config(MINIMAL + "  output_stride: 3\n")
        assert any("must divide t_end" in v for v in info.value.violations)

    def test_single_initial_data_source(self, make_config):
        with pytest.raises(ConfigError):
            make_config(init={'modes': [{'mode': 1, 'values': [1, 0, 0]}], 'random': {'active': 1}})

    def test_mode_outside_basis_rejected(self, make_config):
        with pytest.raises(ConfigError):
            make_config(init={'modes': [{'mode': 3, 'values': [1, 0, 0]}]})

    def test_not_a_mapping(self):
        with pytest.raises(ConfigError):
            parse_config("- just\n- a list\n")

    def test_round_trip(self, runs_dir, tmp_path):
        for name in ("linear_cos.yaml", "linear_energy.yaml", "abel_damped.yaml", "blowup.yaml"):
            config = parse_config((runs_dir / name).read_text())
            path = tmp_path / name
            config.save(path)
            again = parse_config(path.read_text())
            assert again == config
            assert again.to_yaml() == config.to_yaml()

    def test_hash_ignores_output_settings(self, make_config):
        base = make_config()
        renamed = make_config(output={'name': 'other'})
        changed = make_config(params={'k': 0.5})
        assert base.config_hash() == renamed.config_hash()
        assert base.config_hash() != changed.config_hash()

    def test_overrides(self, make_config):
        config = make_config()
        assert apply_override(config, 'k', 2.0).params.k == 2.0
        assert apply_override(config, 'delta', 0.3).params.kernel.delta == 0.3
        assert apply_override(config, 'cap', 5.0).monitor.cap == 5.0
        with pytest.raises(ConfigError):
            apply_override(config, 'tau', 0.0)
        with pytest.raises(ConfigError):
            apply_override(config, 'gravity', 1.0)


class TestSettings:

    def test_defaults_without_file(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        monkeypatch.delenv('FJMGT_WORKERS', raising=False)
        monkeypatch.delenv('FJMGT_OUTPUT_DIR', raising=False)
        settings = load_settings(str(tmp_path / "missing.yaml"))
        assert settings['LOG_LEVEL'] == 'INFO'
        assert settings['OUTPUT_DIR'] is None
        assert settings['WORKERS'] >= 1

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        (tmp_path / "settings.yaml").write_text("LOG_LEVEL: DEBUG\nWORKERS: 2\n")
        monkeypatch.setenv('FJMGT_WORKERS', '3')
        monkeypatch.setenv('FJMGT_OUTPUT_DIR', 'elsewhere')
        settings = load_settings(str(tmp_path / "settings.yaml"))
        assert settings['LOG_LEVEL'] == 'DEBUG'
        assert settings['WORKERS'] == 3
        assert settings['OUTPUT_DIR'] == 'elsewhere'


class TestSubcommands:

    def test_simulate_linear_fixture(self, runs_dir, tmp_path):
        code = simulate(str(runs_dir / "linear_cos.yaml"), output_dir=str(tmp_path))
        assert code == ExitCode.OK

        frame = RecordStore.read_records(tmp_path / "linear_cos.csv")
        assert list(frame.columns) == RECORD_COLUMNS
        assert frame['E_full'].iloc[0] == pytest.approx(2.0)
        assert np.all(np.diff(frame['D_cum']) >= 0)
        assert np.all(frame.to_numpy() >= 0)

    def test_simulate_output_is_deterministic(self, runs_dir, tmp_path):
        for name in ("first", "second"):
            assert simulate(str(runs_dir / "linear_cos.yaml"), output_dir=str(tmp_path / name)) == ExitCode.OK
        first = (tmp_path / "first" / "linear_cos.csv").read_bytes()
        second = (tmp_path / "second" / "linear_cos.csv").read_bytes()
        assert first == second

    def test_simulate_energy_fixture(self, runs_dir, tmp_path):
        code = simulate(str(runs_dir / "linear_energy.yaml"), output_dir=str(tmp_path))
        assert code == ExitCode.OK

        frame = RecordStore.read_records(tmp_path / "linear_energy.csv")
        assert frame['t'].iloc[0] == 0.0
        assert frame['E'].iloc[0] == pytest.approx(2.0, rel=1e-12)

    def test_resume_without_checkpoint_fails_validation(self, runs_dir, tmp_path):
        code = simulate(str(runs_dir / "linear_cos.yaml"), output_dir=str(tmp_path), resume=True)
        assert code == ExitCode.VALIDATION_FAILURE

    def test_resume_from_foreign_checkpoint_fails_validation(self, runs_dir, tmp_path):
        foreign = Checkpoint(
            config_hash="not-this-config",
            times=np.array([0.0]),
            xi=np.ones((1, 1)),
            xi_t=np.zeros((1, 1)),
            xi_tt=-np.ones((1, 1)),
            memory=np.zeros((1, 1)),
            nonlinear=np.zeros((1, 1)),
            dissipation=np.zeros(3),
            records=np.zeros((1, len(RECORD_COLUMNS))),
        )
        CheckpointStore.save(foreign, tmp_path / "linear_cos.ckpt.npz")
        code = simulate(str(runs_dir / "linear_cos.yaml"), output_dir=str(tmp_path), resume=True)
        assert code == ExitCode.VALIDATION_FAILURE

    def test_simulate_blowup_fixture(self, runs_dir, tmp_path):
        code = simulate(str(runs_dir / "blowup.yaml"), output_dir=str(tmp_path))
        assert code == ExitCode.BLOWUP_SUSPECTED
        assert "status=blowup_suspected" in (tmp_path / "blowup.status").read_text()

    def test_simulate_invalid_config(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(MINIMAL.replace("tau: 1.0", "tau: 0"))
        assert simulate(str(path), output_dir=str(tmp_path)) == ExitCode.VALIDATION_FAILURE

    def test_bounds_summary(self, tmp_path):
        assert bounds(1.0, 1.0, output_dir=str(tmp_path)) == ExitCode.OK
        summary = (tmp_path / "bounds_summary.txt").read_text()
        assert "T*=1.386294" in summary

        curve = RecordStore.read_report(tmp_path / "bounds_curve.csv")
        assert list(curve.columns) == ['T', 'T0', 'min']
        assert len(curve) == 201

    def test_bounds_rejects_bad_data(self, tmp_path):
        assert bounds(-1.0, 1.0, output_dir=str(tmp_path)) == ExitCode.VALIDATION_FAILURE

    def test_verify_kernel(self, tmp_path):
        assert verify_kernel("abel", corpus_size=20, output_dir=str(tmp_path)) == ExitCode.OK
        report = RecordStore.read_report(tmp_path / "coercivity_abel.csv")
        assert len(report) == 20
        assert verify_kernel("abel", alpha=1.0, output_dir=str(tmp_path)) == ExitCode.VALIDATION_FAILURE

    def test_verify_kernel_exponential_scale(self, tmp_path):
        assert verify_kernel("exponential", rate=2.0, scale=0.5, corpus_size=10, output_dir=str(tmp_path)) == ExitCode.OK
        text = (tmp_path / "coercivity_exponential.csv").read_text()
        assert "# kernel: exponential alpha=0.5 rate=2 scale=0.5" in text
        assert verify_kernel("exponential", scale=-1.0, output_dir=str(tmp_path)) == ExitCode.VALIDATION_FAILURE

    def test_verify_inequalities(self, tmp_path):
        assert verify_inequalities(2, corpus_size=20, output_dir=str(tmp_path)) == ExitCode.OK
        report = RecordStore.read_report(tmp_path / "inequalities_d2.csv")
        assert set(report['inequality']) == {'brezis_gallouet', 'ladyzhenskaya'}
        assert verify_inequalities(1, output_dir=str(tmp_path)) == ExitCode.VALIDATION_FAILURE

    def test_sweep_rejects_invalid_values(self, runs_dir, tmp_path):
        code = sweep(str(runs_dir / "linear_cos.yaml"), 'tau', [0.0], output_dir=str(tmp_path))
        assert code == ExitCode.VALIDATION_FAILURE

    def test_sweep_rejects_nonpositive_n0(self, runs_dir, tmp_path):
        code = sweep(str(runs_dir / "linear_cos.yaml"), 'N0', [1.0, -1.0], output_dir=str(tmp_path))
        assert code == ExitCode.VALIDATION_FAILURE
        assert list(tmp_path.iterdir()) == []


class TestSweep:

    @pytest.mark.asyncio
    async def test_termination_time_nonincreasing_in_n0(self, make_config, tmp_path):
        config = make_config(time={'dt': 0.01, 't_end': 2.0, 'output_stride': 1}, monitor={'cap': 0.5})

        with ThreadPoolExecutor(max_workers=3) as pool:
            frame = await run_sweep(config, 'N0', [1.0, 1e-4, 1e-2], str(tmp_path), executor=pool)

        assert list(frame.columns) == SWEEP_COLUMNS
        assert list(frame['value']) == [1e-4, 1e-2, 1.0]
        np.testing.assert_allclose(frame['N0'], frame['value'], rtol=1e-12)
        assert list(frame['status']) == ['completed', 'completed', 'blowup_suspected']
        assert np.all(np.diff(frame['t_end']) <= 0)

    @pytest.mark.asyncio
    async def test_members_write_their_own_records(self, make_config, tmp_path):
        config = make_config()
        with ThreadPoolExecutor(max_workers=2) as pool:
            frame = await run_sweep(config, 'k', [0.0, 0.5], str(tmp_path), executor=pool)

        assert list(frame['status']) == ['completed', 'completed']
        assert (tmp_path / "fixture_k_0.csv").exists()
        assert (tmp_path / "fixture_k_0.5.csv").exists()

    @pytest.mark.asyncio
    async def test_nonpositive_n0_rejected_before_fan_out(self, make_config, tmp_path):
        with ThreadPoolExecutor(max_workers=1) as pool, pytest.raises(ConfigError) as info:
            await run_sweep(make_config(), 'N0', [0.0, 1.0], str(tmp_path), executor=pool)
        assert info.value.violations == ["sweep over N0 needs positive values, got 0"]


class TestMain:

    def test_bounds_entry_point(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = main(["--settings", str(tmp_path / "none.yaml"), "bounds", "--z0", "1", "--C", "1"])
        assert code == 0
        assert "T*=1.386294" in (tmp_path / "output" / "bounds_summary.txt").read_text()

    def test_bounds_needs_one_size(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = main(["--settings", str(tmp_path / "none.yaml"), "bounds", "--z0", "1", "--N0", "1", "--C", "1"])
        assert code == 1

    def test_verify_kernel_scale_flag(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        code = main([
            "--settings", str(tmp_path / "none.yaml"), "verify-kernel", "--kind", "exponential",
            "--rate", "1", "--scale", "2", "--corpus-size", "5",
        ])
        assert code == 0
        assert "scale=2" in (tmp_path / "output" / "coercivity_exponential.csv").read_text()
