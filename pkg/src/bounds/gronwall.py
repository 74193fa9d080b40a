"""
Existence-time and energy-growth bounds from Gronwall-type comparison ODEs.

Comparison ODE for the energy:
    z' = z + C z^(3/2),  z(0) = z0
with closed form
    z(t) = 1 / (-z0^(-1/2) e^(-t/2) + C (1 - e^(-t/2)))^2
finite up to T0 = 2 log((z0^(-1/2) + C) / C).

All results are conditional on the user-supplied constant profile C(T).
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger
from scipy.integrate import solve_ivp
from scipy.optimize import brentq


class BoundsDomainError(ValueError):
    """Non-positive data or constants, or negative time."""


class BracketError(RuntimeError):
    """Bisection bracket without a sign change."""


@dataclass(frozen=True)
class Diverged:
    """The comparison solution has blown up by the requested time."""
    blowup_time: float


@dataclass(frozen=True)
class ConstantProfile:
    """
    Profile of the estimate constant: C(T) = c0, or c0 (1 + T) when affine.

    Attributes:
        c0: Value at T = 0 (> 0)
        affine: Grow linearly in T
    """
    c0: float
    affine: bool = False

    def __post_init__(self):
        if not self.c0 > 0:
            raise BoundsDomainError(f"C profile must be positive, got c0={self.c0}")

    def __call__(self, T: float) -> float:
        return self.c0 * (1.0 + T) if self.affine else self.c0

    def label(self) -> str:
        return f"C(T)={self.c0:g}*(1+T)" if self.affine else f"C={self.c0:g}"


@dataclass(frozen=True)
class BoundsQuery:
    """
    Inputs of the existence-time bound.

    Attributes:
        N0: Initial-data size (> 0)
        profile: Constant-or-affine C(T)
        z0_scale: z0 = z0_scale * N0
    """
    N0: float
    profile: ConstantProfile
    z0_scale: float = 1.0

    def __post_init__(self):
        if not self.N0 > 0:
            raise BoundsDomainError(f"N0 must be > 0, got {self.N0}")
        if not self.z0_scale > 0:
            raise BoundsDomainError(f"z0 scale must be > 0, got {self.z0_scale}")

    @property
    def z0(self) -> float:
        return self.z0_scale * self.N0


def _check_positive(**values: float):
    for name, value in values.items():
        if not value > 0:
            raise BoundsDomainError(f"{name} must be > 0, got {value}")


@lru_cache(maxsize=1)
def _log_growth_factor() -> float:
    """
    1 + sup_l (1 - e^-l) / sqrt(l).

    The sup sits at the root u of e^-u (2u + 1) = 1.
    """
    u = brentq(lambda v: np.exp(-v) * (2.0 * v + 1.0) - 1.0, 0.5, 3.0, xtol=1e-14)
    return 1.0 + (1.0 - np.exp(-u)) / np.sqrt(u)


class GronwallBounds:
    """
    Closed forms and numerical oracles for the comparison ODEs.

    Key outputs:
    - z(t) and its blow-up time T0
    - T*(N0) = sup_T min{T, T0(N0, T)}
    - Logarithmic energy bound
    """

    @staticmethod
    def blowup_time(z0: float, C: float) -> float:
        """T0 = 2 log((z0^(-1/2) + C) / C)."""
        _check_positive(z0=z0, C=C)
        return 2.0 * np.log((z0 ** -0.5 + C) / C)

    @staticmethod
    def gronwall_z(z0: float, C: float, t: float) -> Union[float, Diverged]:
        """
        Closed-form comparison solution.

        Returns:
            z(t), or Diverged when t is at or past the blow-up time
        """
        _check_positive(z0=z0, C=C)
        if t < 0:
            raise BoundsDomainError(f"t must be >= 0, got {t}")

        t_blowup = GronwallBounds.blowup_time(z0, C)
        if t >= t_blowup:
            return Diverged(blowup_time=t_blowup)

        decay = np.exp(-t / 2.0)
        denominator = -z0 ** -0.5 * decay + C * (1.0 - decay)
        if denominator == 0.0:
            return Diverged(blowup_time=t_blowup)
        return float(1.0 / denominator ** 2)

    @staticmethod
    def t0(N0: float, C: float, z0_scale: float = 1.0) -> float:
        """T0(N0) with z0 = z0_scale * N0; strictly decreasing in N0 and C."""
        _check_positive(N0=N0, C=C, z0_scale=z0_scale)
        return GronwallBounds.blowup_time(z0_scale * N0, C)

    @staticmethod
    def bisect_root(f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
        """Root of f on [lo, hi] by bisection; f(lo) and f(hi) must differ in sign."""
        f_lo, f_hi = f(lo), f(hi)
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0:
            return hi
        if np.sign(f_lo) == np.sign(f_hi):
            raise BracketError(f"no sign change on [{lo:g}, {hi:g}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")

        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            f_mid = f(mid)
            if f_mid == 0.0:
                return mid
            if np.sign(f_mid) == np.sign(f_lo):
                lo, f_lo = mid, f_mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    @staticmethod
    def t_star(query: BoundsQuery, tol: float = 1e-10, max_T: float = 1e8) -> float:
        """
        Optimal existence time sup_T min{T, T0(N0, T)}.

        Constant C: the sup is attained at T = T0.
        Affine C: the unique fixed point T = T0(N0, T), by bisection.
        """
        profile = query.profile
        if not profile.affine:
            return GronwallBounds.t0(query.N0, profile.c0, query.z0_scale)

        def gap(T: float) -> float:
            return T - GronwallBounds.t0(query.N0, profile(T), query.z0_scale)

        hi = 1.0
        while gap(hi) <= 0.0:
            hi *= 2.0
            if hi > max_T:
                raise BracketError(f"T - T0(N0, T) stays <= 0 up to T={max_T:g} for {profile.label()}")

        root = GronwallBounds.bisect_root(gap, 0.0, hi, tol)
        logger.debug(f"T* = {root:.12f} for N0={query.N0:g}, {profile.label()}")
        return root

    @staticmethod
    def t0_curve(query: BoundsQuery, T_grid: Sequence[float]) -> pd.DataFrame:
        """(T, T0(N0, T), min{T, T0}) samples for plotting against the diagonal."""
        T = np.asarray(T_grid, dtype=float)
        T0 = np.array([GronwallBounds.t0(query.N0, query.profile(value), query.z0_scale) for value in T])
        return pd.DataFrame({'T': T, 'T0': T0, 'min': np.minimum(T, T0)})

    @staticmethod
    def integrate_comparison_ode(z0: float, C: float, t_eval: Sequence[float]) -> np.ndarray:
        """Adaptive solution of z' = z + C z^(3/2) at t_eval (all below the blow-up time)."""
        _check_positive(z0=z0, C=C)
        t_eval = np.asarray(t_eval, dtype=float)
        solution = solve_ivp(
            lambda t, z: z + C * np.abs(z) ** 1.5,
            (0.0, float(t_eval[-1])),
            [z0],
            method='DOP853',
            t_eval=t_eval,
            rtol=1e-10,
            atol=1e-12,
        )
        if not solution.success:
            raise RuntimeError(f"comparison ODE integration failed: {solution.message}")
        return solution.y[0]

    @staticmethod
    def numerical_blowup_time(z0: float, C: float, threshold: float = 1e12) -> float:
        """
        First t with z(t) >= threshold, by adaptive integration.

        Integrates y = log z, y' = 1 + C e^(y/2), so steps stay resolved as z grows.
        """
        _check_positive(z0=z0, C=C, threshold=threshold)
        target = np.log(threshold)

        def crossed(t, y):
            return y[0] - target
        crossed.terminal = True
        crossed.direction = 1

        horizon = 2.0 * GronwallBounds.blowup_time(z0, C) + 1.0
        solution = solve_ivp(
            lambda t, y: 1.0 + C * np.exp(y / 2.0),
            (0.0, horizon),
            [np.log(z0)],
            method='DOP853',
            events=crossed,
            rtol=1e-12,
            atol=1e-12,
        )
        if len(solution.t_events[0]) == 0:
            raise RuntimeError(f"z did not reach {threshold:g} before t={horizon:g}")
        return float(solution.t_events[0][0])

    @staticmethod
    def log_energy_bound(G0: float, C: float, t: float, strict: bool = False) -> float:
        """
        exp((C t + 2 sqrt(ln(1 + G0)))^2 / 4) - 1.

        This is the exact solution of G' = C sqrt(ln(1 + G)) (1 + G). With
        strict=True the rate C is replaced by C * kappa, kappa = 1 + sup_l (1 - e^-l)/sqrt(l),
        which makes the bound dominate G' = C (sqrt(ln(1 + G)) + 1) G for all t.
        """
        if G0 < 0:
            raise BoundsDomainError(f"G0 must be >= 0, got {G0}")
        _check_positive(C=C)
        if t < 0:
            raise BoundsDomainError(f"t must be >= 0, got {t}")

        rate = C * _log_growth_factor() if strict else C
        root = rate * t + 2.0 * np.sqrt(np.log1p(G0))
        return float(np.expm1(root ** 2 / 4.0))

    @staticmethod
    def integrate_energy_comparison(G0: float, C: float, t_eval: Sequence[float]) -> np.ndarray:
        """
        Adaptive solution of G' = C (sqrt(ln(1 + G)) + 1) G at t_eval.

        Integrates l = ln(1 + G), l' = C (sqrt(l) + 1)(1 - e^-l).
        """
        if G0 < 0:
            raise BoundsDomainError(f"G0 must be >= 0, got {G0}")
        _check_positive(C=C)

        t_eval = np.asarray(t_eval, dtype=float)
        solution = solve_ivp(
            lambda t, ell: C * (np.sqrt(np.maximum(ell, 0.0)) + 1.0) * -np.expm1(-ell),
            (0.0, float(t_eval[-1])),
            [np.log1p(G0)],
            method='DOP853',
            t_eval=t_eval,
            rtol=1e-10,
            atol=1e-12,
        )
        if not solution.success:
            raise RuntimeError(f"energy comparison integration failed: {solution.message}")
        return np.expm1(solution.y[0])


if __name__ == "__main__":
    print(f"T0(z0=1, C=1) = {GronwallBounds.t0(1.0, 1.0):.6f}")
    query = BoundsQuery(N0=1.0, profile=ConstantProfile(1.0, affine=True))
    print(f"T*(N0=1, C(T)=1+T) = {GronwallBounds.t_star(query):.10f}")
    print(f"numerical blow-up time = {GronwallBounds.numerical_blowup_time(1.0, 1.0):.6f}")
    print(f"log bound (G0=0, C=1, t=2) = {GronwallBounds.log_energy_bound(0.0, 1.0, 2.0):.6f}")
