"""Closed-form amplitude overlay for the Kolmogorov pulse cases.

This is the only numerics in the package: the piecewise amplitude f(t) of
a vorticity mode driven by on/off sin^2 pulses, needed to draw the
reference enstrophy curve 2*pi^2*f(t)^2.  It mirrors the solver package's
closed form and is cross-checked in the tests against a reference table
emitted by the `torusflow adaptive --reference-out` interface (1e-10).
"""

from __future__ import annotations

import math


def j2(a: float, w: float, dt: float) -> float:
    """int_0^dt exp(a*s) * sin^2(w*s) ds."""
    if dt == 0.0:
        return 0.0
    tw = 2.0 * w
    if a == 0.0:
        return dt / 2.0 - math.sin(tw * dt) / (2.0 * tw)
    half_exp = math.expm1(a * dt) / (2.0 * a)
    e = math.exp(a * dt)
    osc = (e * (a * math.cos(tw * dt) + tw * math.sin(tw * dt)) - a) / (2.0 * (a * a + tw * tw))
    return half_exp - osc


class PulseAmplitude:
    """Piecewise f(t) for alternating quiescent/pulse windows.

    breakpoints: T0 < T1 < ... < T_{2J}; l_t: one frequency per pulse;
    the initial value makes f periodic over the full span.
    """

    def __init__(self, breakpoints, l_t, l_x=1, nu=0.5):
        self.bp = [float(b) for b in breakpoints]
        self.l_t = list(l_t)
        if len(self.bp) != 2 * len(self.l_t) + 1:
            raise ValueError("need 2J+1 breakpoints for J pulses")
        self.a = float(nu) * int(l_x) ** 2
        self.w = [2.0 * math.pi * self.l_t[j] / (self.bp[2 * j + 2] - self.bp[2 * j + 1])
                  for j in range(len(self.l_t))]
        span = self.bp[-1]
        num = 0.0
        for j in range(len(self.l_t)):
            dT = self.bp[2 * j + 2] - self.bp[2 * j + 1]
            num += math.exp(-self.a * (span - self.bp[2 * j + 1])) * j2(self.a, self.w[j], dT)
        self.f0 = num / -math.expm1(-self.a * span)
        vals = [self.f0]
        for j in range(len(self.l_t)):
            fq = vals[-1] * math.exp(-self.a * (self.bp[2 * j + 1] - self.bp[2 * j]))
            vals.append(fq)
            dT = self.bp[2 * j + 2] - self.bp[2 * j + 1]
            vals.append((fq + j2(self.a, self.w[j], dT)) * math.exp(-self.a * dT))
        self._fb = vals

    def f(self, t: float) -> float:
        for j in range(len(self.l_t)):
            if t <= self.bp[2 * j + 1]:
                return self._fb[2 * j] * math.exp(-self.a * (t - self.bp[2 * j]))
            if t <= self.bp[2 * j + 2]:
                dt = t - self.bp[2 * j + 1]
                return (self._fb[2 * j + 1] + j2(self.a, self.w[j], dt)) * math.exp(-self.a * dt)
        return self._fb[-1] * math.exp(-self.a * (t - self.bp[-1]))

    def enstrophy(self, t: float) -> float:
        return 2.0 * math.pi**2 * self.f(t) ** 2


# known case configurations addressable via --case
CASE_PARAMS = {
    "example2": dict(breakpoints=(0.0, 20.0, 40.0), l_t=(1,), l_x=1, nu=0.5),
    "example3-freqa": dict(breakpoints=(0.0, 20.0, 40.0, 70.0, 80.0, 90.0, 120.0),
                           l_t=(3, 1, 5), l_x=1, nu=0.5),
    "example3-freqb": dict(breakpoints=(0.0, 20.0, 40.0, 70.0, 80.0, 90.0, 120.0),
                           l_t=(40, 20, 50), l_x=1, nu=0.5),
}


def amplitude_for(case: str | None, overlay_params: dict | None) -> PulseAmplitude | None:
    """Resolve the overlay: explicit params win, then the case registry."""
    if overlay_params:
        return PulseAmplitude(**overlay_params)
    if case is None:
        return None
    key = case.lower().replace("_", "-")
    params = CASE_PARAMS.get(key)
    return PulseAmplitude(**params) if params else None
