"""Exact-solution benchmark cases and their error metrics.

The pulse cases drive a single Kolmogorov mode sin(l_x * x) with a
time-periodic on/off weight g2(t); the vorticity amplitude then solves
f' + nu*l_x^2*f = g2 in closed form through the integral

    J2(a, w, dt) = int_0^dt exp(a s) sin^2(w s) ds.

The closed form of J2 and the periodic initial value f(0) = f(T) are both
cross-checked numerically in the test suite; the f(0) constant used here
is the one that actually satisfies the periodicity requirement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .solver import Problem
from .spectral import Field, GridSpec


class UnknownCase(KeyError):
    pass


def j2(a: float, w: float, dt: float) -> float:
    """int_0^dt exp(a*s) * sin^2(w*s) ds, exactly."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if w <= 0:
        raise ValueError("w must be positive")
    if dt == 0.0:
        return 0.0
    tw = 2.0 * w
    if a == 0.0:
        return dt / 2.0 - math.sin(tw * dt) / (2.0 * tw)
    half_exp = math.expm1(a * dt) / (2.0 * a)
    e = math.exp(a * dt)
    osc = (e * (a * math.cos(tw * dt) + tw * math.sin(tw * dt)) - a) / (2.0 * (a * a + tw * tw))
    return half_exp - osc


@dataclass(frozen=True)
class PulseSchedule:
    """Alternating quiescent/active windows: breakpoints T0 < T1 < ... < T_{2J},
    one temporal frequency l_t per active window, one spatial wavenumber l_x."""

    breakpoints: tuple
    l_t: tuple
    l_x: int = 1

    def __post_init__(self):
        bp = tuple(float(b) for b in self.breakpoints)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "l_t", tuple(self.l_t))
        if len(bp) != 2 * len(self.l_t) + 1:
            raise ValueError("need 2J+1 breakpoints for J pulses")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        if self.l_x < 1 or any(lt < 1 for lt in self.l_t):
            raise ValueError("wavenumbers must be positive integers")

    @property
    def pulses(self) -> int:
        return len(self.l_t)

    @property
    def T(self) -> float:
        return self.breakpoints[-1]


class PulseSolution:
    """Closed-form amplitude f(t) and weight g2(t) for a pulse schedule."""

    def __init__(self, schedule: PulseSchedule, nu: float):
        self.schedule = schedule
        self.nu = float(nu)
        self.a = self.nu * schedule.l_x**2
        bp = schedule.breakpoints
        self.w = tuple(2.0 * math.pi * schedule.l_t[j] / (bp[2 * j + 2] - bp[2 * j + 1])
                       for j in range(schedule.pulses))
        # periodic initial value: every pulse's accumulated input, decayed to T
        num = 0.0
        for j in range(schedule.pulses):
            dT = bp[2 * j + 2] - bp[2 * j + 1]
            num += math.exp(-self.a * (bp[-1] - bp[2 * j + 1])) * j2(self.a, self.w[j], dT)
        self.f0 = num / -math.expm1(-self.a * bp[-1])
        # amplitudes at the breakpoints
        vals = [self.f0]
        for j in range(schedule.pulses):
            fq = vals[-1] * math.exp(-self.a * (bp[2 * j + 1] - bp[2 * j]))
            vals.append(fq)
            dT = bp[2 * j + 2] - bp[2 * j + 1]
            vals.append((fq + j2(self.a, self.w[j], dT)) * math.exp(-self.a * dT))
        self.f_breaks = tuple(vals)

    def g2(self, t: float) -> float:
        bp = self.schedule.breakpoints
        for j in range(self.schedule.pulses):
            if bp[2 * j + 1] < t <= bp[2 * j + 2]:
                return math.sin(self.w[j] * (t - bp[2 * j + 1])) ** 2
        return 0.0

    def f(self, t: float) -> float:
        bp = self.schedule.breakpoints
        for j in range(self.schedule.pulses):
            if t <= bp[2 * j + 1]:
                return self.f_breaks[2 * j] * math.exp(-self.a * (t - bp[2 * j]))
            if t <= bp[2 * j + 2]:
                dt = t - bp[2 * j + 1]
                return (self.f_breaks[2 * j + 1] + j2(self.a, self.w[j], dt)) * math.exp(-self.a * dt)
        return self.f_breaks[-1] * math.exp(-self.a * (t - bp[-1]))


@dataclass(frozen=True)
class ManufacturedCase:
    name: str
    grid: GridSpec
    nu: float
    T: float
    exact_omega: Callable[[float], Field]
    exact_psi: Callable[[float], Field]
    forcing: Callable[[float], np.ndarray]
    pulse: PulseSolution | None = None  # set for the Kolmogorov cases
    forcing_coeffs: Callable[[float], np.ndarray] | None = None

    def problem(self, convection_form: str = "skew",
                forcing_weights: str = "implicit") -> Problem:
        return Problem(self.grid, self.nu, forcing=self.forcing,
                       convection_form=convection_form,
                       forcing_weights=forcing_weights,
                       forcing_coeffs=self.forcing_coeffs)

    def enstrophy_ref(self, t: float) -> float:
        """||omega_exact(t)||^2; for the pulse cases this is 2*pi^2*f(t)^2."""
        if self.pulse is not None:
            return 2.0 * math.pi**2 * self.pulse.f(t) ** 2
        w = self.exact_omega(t)
        return float(w.grid.h**2 * np.sum(w.values**2))


def example1(grid: GridSpec, nu: float = 0.5, T: float = 1.0) -> ManufacturedCase:
    """Forced Taylor-Green flow: omega = cos(t) sin(x) sin(y).

    The velocity (0.5 cos t sin x cos y, -0.5 cos t cos x sin y) transports
    this vorticity with u.grad(omega) = 0, so the forcing reduces to
    g = (d/dt - nu*lap) omega = (-sin t + 2 nu cos t) sin x sin y.
    """
    sxsy = np.sin(grid.X) * np.sin(grid.Y)
    sxsy.flags.writeable = False
    sxsy_hat = grid.to_coeffs(sxsy)
    sxsy_hat.flags.writeable = False

    def exact_omega(t):
        return Field.from_values(grid, math.cos(t) * sxsy, mean_zero=True)

    def exact_psi(t):
        return Field.from_values(grid, 0.5 * math.cos(t) * sxsy, mean_zero=True)

    def forcing(t):
        return (-math.sin(t) + 2.0 * nu * math.cos(t)) * sxsy

    def forcing_coeffs(t):
        return (-math.sin(t) + 2.0 * nu * math.cos(t)) * sxsy_hat

    return ManufacturedCase("example1", grid, nu, T, exact_omega, exact_psi,
                            forcing, forcing_coeffs=forcing_coeffs)


def _pulse_case(name, grid, schedule, nu) -> ManufacturedCase:
    sol = PulseSolution(schedule, nu)
    lx = schedule.l_x
    sx = np.sin(lx * grid.X)
    sx.flags.writeable = False
    sx_hat = grid.to_coeffs(sx)
    sx_hat.flags.writeable = False

    def exact_omega(t):
        return Field.from_values(grid, sol.f(t) * sx, mean_zero=True)

    def exact_psi(t):
        return Field.from_values(grid, (sol.f(t) / lx**2) * sx, mean_zero=True)

    def forcing(t):
        return sol.g2(t) * sx

    def forcing_coeffs(t):
        return sol.g2(t) * sx_hat

    return ManufacturedCase(name, grid, nu, schedule.T, exact_omega, exact_psi,
                            forcing, pulse=sol, forcing_coeffs=forcing_coeffs)


def example2(grid: GridSpec, l_x: int = 1, l_t: int = 1, T1: float = 20.0,
             T: float = 40.0, nu: float = 0.5) -> ManufacturedCase:
    """Single-pulse Kolmogorov forcing: quiescent on [0, T1], oscillatory after."""
    sched = PulseSchedule((0.0, T1, T), (l_t,), l_x)
    return _pulse_case("example2", grid, sched, nu)


def example3(grid: GridSpec, schedule: PulseSchedule, nu: float = 0.5) -> ManufacturedCase:
    """Multi-pulse Kolmogorov forcing (three pulses in the benchmark setup)."""
    return _pulse_case("example3", grid, schedule, nu)


MULTI_PULSE_BREAKS = (0.0, 20.0, 40.0, 70.0, 80.0, 90.0, 120.0)
FREQ_A = (3, 1, 5)
FREQ_B = (40, 20, 50)


def mixed_error(numerical: Field, exact: Field, threshold: float = 1e-8):
    """Per-node relative error, absolute where |exact| <= threshold.

    Returns the error field and its max norm.
    """
    if numerical.grid != exact.grid:
        raise ValueError("fields must share one grid")
    num = numerical.values
    ex = exact.values
    diff = num - ex
    small = np.abs(ex) <= threshold
    err = np.where(small, diff, diff / np.where(small, 1.0, ex))
    f = Field.from_values(numerical.grid, err)
    return f, float(np.abs(err).max())


def get_case(name: str, grid: GridSpec, **overrides) -> ManufacturedCase:
    """Case registry for the CLI; overrides map onto the constructor arguments."""
    key = name.lower().replace("_", "-")
    if key == "example1":
        return example1(grid, **overrides)
    if key == "example2":
        return example2(grid, **overrides)
    if key in ("example3-freqa", "example3-freqb"):
        freqs = FREQ_A if key.endswith("freqa") else FREQ_B
        lts = tuple(overrides.pop("l_t", freqs))
        breaks = tuple(overrides.pop("breakpoints", MULTI_PULSE_BREAKS))
        lx = int(overrides.pop("l_x", 1))
        sched = PulseSchedule(breaks, lts, lx)
        return example3(grid, sched, **overrides)
    raise UnknownCase(
        f"unknown case {name!r}; known: example1, example2, example3-freqA, example3-freqB")
