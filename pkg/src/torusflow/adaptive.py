"""Adaptive step-size controllers: ATS, ATS-LD and ATS-LDLB.

The base rule proposes tau from the discrete time derivative of the
vorticity; LD adds a delay window that freezes the step until the norm
history is flat enough, and LDLB additionally rejects a step outright
when the norm jumps by more than beta_thr, retrying it at tau/beta_thr.

On a rising norm the LD/LDLB proposal never exceeds the current step
(tau_next = min(tau_ada, tau_n)).  The bare formula can propose a larger
step there whenever the norm is still small in absolute terms, which
would undo a backtrack right after a forcing transition and release a
large step into the ramp; the cap keeps the step pinned until the norm
stops rising.  Plain ATS applies the bare formula unconditionally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np


class StallError(RuntimeError):
    """Controller forced the step below any useful size (defensive)."""


class Strategy(str, Enum):
    ATS = "ats"
    ATS_LD = "ats_ld"
    ATS_LDLB = "ats_ldlb"

    @classmethod
    def parse(cls, name: str) -> "Strategy":
        key = name.lower().replace("-", "_")
        for s in cls:
            if s.value == key:
                return s
        raise ValueError(f"unknown strategy {name!r}; known: {[s.value for s in cls]}")


@dataclass(frozen=True)
class ControllerConfig:
    tau_min: float = 1e-4
    tau_max: float = 0.5
    beta: float = 1000.0
    r_star: float = 4.0
    d_max: int = 5
    gamma_tol: float = 1e-3
    beta_thr: float = 10.0
    strategy: Strategy = Strategy.ATS_LDLB
    max_rejects: int = 25  # consecutive; defensive stall guard

    def __post_init__(self):
        if not (0.0 < self.tau_min <= self.tau_max):
            raise ValueError("need 0 < tau_min <= tau_max")
        if self.beta <= 0 or self.gamma_tol <= 0:
            raise ValueError("beta and gamma_tol must be positive")
        if self.r_star <= 1.0:
            raise ValueError("r_star must exceed 1")
        if self.d_max < 1:
            raise ValueError("d_max must be >= 1")
        if self.beta_thr <= 1.0:
            raise ValueError("beta_thr must exceed 1")


@dataclass
class ControllerState:
    d: int = 1
    a: np.ndarray = field(default_factory=lambda: np.zeros(0))
    prev_norm: float = np.inf

    @classmethod
    def fresh(cls, cfg: ControllerConfig) -> "ControllerState":
        return cls(d=1, a=np.zeros(cfg.d_max), prev_norm=np.inf)

    def reset_window(self):
        self.d = 1
        self.a[:] = 0.0


@dataclass(frozen=True)
class Decision:
    accepted: bool
    tau_next: float | None = None  # set when accepted
    retry_tau: float | None = None  # set when rejected


def ats_formula(cfg: ControllerConfig, tau_n: float, dtau_norm: float) -> float:
    """min{ max{tau_min, tau_max/sqrt(1 + beta*||d_tau w||^2)}, r* tau_n }."""
    base = cfg.tau_max / np.sqrt(1.0 + cfg.beta * dtau_norm * dtau_norm)
    return min(max(cfg.tau_min, base), cfg.r_star * tau_n)


def decide(cfg: ControllerConfig, st: ControllerState, tau_n: float,
           dtau_norm: float, prev_norm: float | None = None) -> Decision:
    """One controller transition after a completed step.

    Mutates st (delay counter, norm history; prev_norm on acceptance).
    prev_norm defaults to the state's stored value; a rejected step leaves
    it untouched, so the retry compares against the same baseline.
    """
    if prev_norm is None:
        prev_norm = st.prev_norm

    if cfg.strategy is Strategy.ATS:
        st.prev_norm = dtau_norm
        return Decision(True, tau_next=ats_formula(cfg, tau_n, dtau_norm))

    if dtau_norm > prev_norm:
        st.reset_window()
        if (cfg.strategy is Strategy.ATS_LDLB
                and dtau_norm > cfg.beta_thr * prev_norm and tau_n > cfg.tau_min):
            return Decision(False, retry_tau=max(cfg.tau_min, tau_n / cfg.beta_thr))
        tau_next = min(ats_formula(cfg, tau_n, dtau_norm), tau_n)
    else:
        st.a[st.d - 1] = dtau_norm
        if st.d < cfg.d_max:
            tau_next = tau_n
            st.d += 1
        else:
            gamma = float(st.a.var())  # population variance over the window
            tau_next = ats_formula(cfg, tau_n, dtau_norm) if gamma < cfg.gamma_tol else tau_n
            st.reset_window()
    st.prev_norm = dtau_norm
    return Decision(True, tau_next=tau_next)


def clamp_final(tau_next: float, t_n: float, T: float) -> float:
    """Shorten the proposal so the run lands on T exactly."""
    return min(tau_next, T - t_n)
