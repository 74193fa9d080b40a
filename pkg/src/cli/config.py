"""
Run configuration: YAML text validated by pydantic models.

Sections mirror the package layout:
domain, params, init, time, monitor, output, seed.
"""

import hashlib
import json
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from dynamics.state import PhysicalParams
from ingestion.profiles import ProfileKind, ProfileSpec
from kernel.memory import KernelKind, KernelSpec
from spectral.basis import DomainSpec
from storage.records import OutputFormat


class ConfigError(ValueError):
    """Invalid configuration; carries every violation found."""

    def __init__(self, violations: List[str]):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


class _Section(BaseModel):
    model_config = ConfigDict(extra='forbid')


class DomainConfig(_Section):
    dim: int = Field(1, ge=1, le=3)
    lengths: Optional[List[float]] = None
    n_modes: int = Field(8, ge=1)

    @field_validator('lengths')
    @classmethod
    def _positive_lengths(cls, value):
        if value is not None and any(not length > 0 for length in value):
            raise ValueError(f"side lengths must be > 0, got {value}")
        return value

    @model_validator(mode='after')
    def _lengths_match_dim(self):
        if self.lengths is not None and len(self.lengths) != self.dim:
            raise ValueError(f"dim={self.dim} but {len(self.lengths)} side lengths given")
        return self

    def to_domain(self) -> DomainSpec:
        if self.lengths is None:
            return DomainSpec.unit_box(self.dim)
        return DomainSpec(dim=self.dim, lengths=tuple(self.lengths))


class KernelConfig(_Section):
    kind: KernelKind = KernelKind.ZERO
    alpha: float = 0.5
    rate: float = 1.0
    scale: float = 1.0
    delta: float = 0.0

    @field_validator('alpha')
    @classmethod
    def _abel_order(cls, value):
        if not 0.0 < value < 1.0:
            raise ValueError(f"Abel order alpha must lie in (0, 1), got {value}")
        return value

    @field_validator('delta')
    @classmethod
    def _nonnegative_delta(cls, value):
        if value < 0:
            raise ValueError(f"delta must be >= 0 (well-posedness hypothesis), got {value}")
        return value

    @field_validator('rate', 'scale')
    @classmethod
    def _positive(cls, value):
        if not value > 0:
            raise ValueError(f"must be > 0, got {value}")
        return value

    def to_kernel(self) -> KernelSpec:
        return KernelSpec(kind=self.kind, alpha=self.alpha, rate=self.rate, scale=self.scale, delta=self.delta)


class ParamsConfig(_Section):
    tau: float
    c: float = 1.0
    k: float = 0.0
    kernel: KernelConfig = Field(default_factory=KernelConfig)

    @field_validator('tau')
    @classmethod
    def _positive_tau(cls, value):
        if not value > 0:
            raise ValueError(f"tau must be > 0 (well-posedness hypothesis), got {value}")
        return value

    @field_validator('c')
    @classmethod
    def _positive_c(cls, value):
        if not value > 0:
            raise ValueError(f"sound speed c must be > 0, got {value}")
        return value

    def to_params(self) -> PhysicalParams:
        return PhysicalParams(tau=self.tau, c=self.c, k=self.k, kernel=self.kernel.to_kernel())


class ModeAmplitude(_Section):
    """Initial (xi, xi_t, xi_tt) of the mode at 1-based position `mode` in the basis ordering."""
    mode: int = Field(ge=1)
    values: Tuple[float, float, float]


class ProfileConfig(_Section):
    kind: ProfileKind = ProfileKind.ZERO
    amplitude: float = 1.0
    mode: Optional[List[int]] = None
    width: float = 0.1
    center: Optional[List[float]] = None

    def to_profile(self) -> ProfileSpec:
        return ProfileSpec(
            kind=self.kind,
            amplitude=self.amplitude,
            mode=tuple(self.mode or ()),
            width=self.width,
            center=tuple(self.center) if self.center is not None else None,
        )


class RandomInitConfig(_Section):
    """Seeded Gaussian triples on the first `active` modes, decaying like (1 + lambda)^-2."""
    active: int = Field(4, ge=1)
    amplitude: float = 1.0


class InitConfig(_Section):
    modes: Optional[List[ModeAmplitude]] = None
    psi0: Optional[ProfileConfig] = None
    psi1: Optional[ProfileConfig] = None
    psi2: Optional[ProfileConfig] = None
    random: Optional[RandomInitConfig] = None
    scale: float = 1.0

    @model_validator(mode='after')
    def _one_source(self):
        sources = [
            self.modes is not None,
            any(p is not None for p in (self.psi0, self.psi1, self.psi2)),
            self.random is not None,
        ]
        if sum(sources) > 1:
            raise ValueError("init takes one of: modes, profiles (psi0/psi1/psi2), random")
        return self


class TimeConfig(_Section):
    dt: float = Field(gt=0)
    t_end: float = Field(gt=0)
    output_stride: int = Field(1, ge=1)

    @model_validator(mode='after')
    def _stride_divides_horizon(self):
        block = self.dt * self.output_stride
        ratio = self.t_end / block
        if abs(ratio - round(ratio)) * block > 1e-12 or round(ratio) < 1:
            raise ValueError(
                f"dt * output_stride = {block:g} must divide t_end = {self.t_end:g} (within 1e-12)"
            )
        return self

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))


class MonitorConfig(_Section):
    dim: Optional[int] = Field(None, ge=1, le=3)
    cap: float = 1e6
    scaled: bool = False

    @field_validator('cap')
    @classmethod
    def _positive_cap(cls, value):
        if not value > 0:
            raise ValueError(f"monitor cap M0 must be > 0, got {value}")
        return value


class OutputConfig(_Section):
    directory: str = "output"
    name: str = "run"
    format: OutputFormat = OutputFormat.CSV
    checkpoint_interval: int = Field(0, ge=0)
    cache_dir: Optional[str] = None


class RunConfig(_Section):
    """Complete description of one simulation."""
    domain: DomainConfig = Field(default_factory=DomainConfig)
    params: ParamsConfig
    init: InitConfig = Field(default_factory=InitConfig)
    time: TimeConfig
    monitor: MonitorConfig = Field(default_factory=MonitorConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    seed: int = 0

    @model_validator(mode='after')
    def _modes_in_range(self):
        if self.init.modes:
            for entry in self.init.modes:
                if entry.mode > self.domain.n_modes:
                    raise ValueError(f"init mode {entry.mode} exceeds n_modes={self.domain.n_modes}")
        return self

    @property
    def monitor_dim(self) -> int:
        return self.monitor.dim or self.domain.dim

    def config_hash(self) -> str:
        """Hash of everything that determines the trajectory (output settings excluded)."""
        payload = self.model_dump(mode='json', exclude={'output'})
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode('utf-8')).hexdigest()

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.model_dump(mode='json'), sort_keys=False)

    def save(self, path: Path):
        Path(path).write_text(self.to_yaml(), encoding='utf-8')

    def random_triples(self, eigenvalues: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Seeded random initial coefficients for init.random."""
        spec = self.init.random
        rng = np.random.default_rng(self.seed)
        n = len(eigenvalues)
        active = min(spec.active, n)
        decay = (1.0 + eigenvalues[:active]) ** -2
        triples = []
        for _ in range(3):
            values = np.zeros(n)
            values[:active] = spec.amplitude * rng.standard_normal(active) * decay
            triples.append(values)
        return tuple(triples)


def _format_violation(error: dict) -> str:
    location = ".".join(str(part) for part in error['loc']) or "<root>"
    if error['type'] == 'extra_forbidden':
        return f"{location}: unknown key '{error['loc'][-1]}'"
    message = error['msg']
    if message.startswith("Value error, "):
        message = message[len("Value error, "):]
    return f"{location}: {message}"


def parse_config(text: str) -> RunConfig:
    """
    Parse and validate YAML run configuration text.

    Raises:
        ConfigError: with every violation (unknown keys, invariant breaches, type errors)
    """
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ConfigError([f"not valid YAML: {e}"]) from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError([f"top level must be a mapping, got {type(data).__name__}"])

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError([_format_violation(error) for error in e.errors()]) from e


def load_config(path: Path) -> RunConfig:
    return parse_config(Path(path).read_text(encoding='utf-8'))


def apply_override(config: RunConfig, axis: str, value: float) -> RunConfig:
    """
    Copy of config with one sweep axis set.

    Axes: k, tau, c, delta, alpha, cap, scale (initial-data multiplier).
    N0 sweeps are resolved by the caller into a scale.
    """
    data = config.model_dump(mode='json')
    if axis in ('k', 'tau', 'c'):
        data['params'][axis] = value
    elif axis in ('delta', 'alpha'):
        data['params']['kernel'][axis] = value
    elif axis == 'cap':
        data['monitor']['cap'] = value
    elif axis == 'scale':
        data['init']['scale'] = value
    else:
        raise ConfigError([f"sweep axis '{axis}' is not supported"])

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError([_format_violation(error) for error in e.errors()]) from e
