"""The four figure renderers. One job in, one image file out."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .jobs import PlotJob, read_convergence, read_trajectory
from .overlay import amplitude_for

_REF_SLOPES = (2, 3, 4)


def _save(fig, job):
    fig.tight_layout()
    fig.savefig(job.output, dpi=150)
    plt.close(fig)


def _label(job, i, default):
    return job.labels[i] if i < len(job.labels) else default


def plot_convergence(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    tau_all = []
    err_all = []
    for i, path in enumerate(job.inputs):
        data = read_convergence(path)
        for name in dict.fromkeys(data["tableau"]):  # preserve file order
            sel = data["tableau"] == name
            tau = data["tau"][sel]
            err = data["err_L2_omega"][sel]
            ax.loglog(tau, err, "o-", label=str(name))
            tau_all.extend(tau)
            err_all.extend(err)
    tau_all = np.array(tau_all)
    err_all = np.array(err_all)
    t0, t1 = tau_all.min(), tau_all.max()
    ts = np.array([t0, t1])
    for p in _REF_SLOPES:
        # anchor each guide at the largest tau's smallest error
        anchor = err_all[tau_all == t1].min()
        ax.loglog(ts, anchor * (ts / t1) ** p, "--", color="grey", lw=0.8)
        ax.annotate(f"slope {p}", (t0, anchor * (t0 / t1) ** p),
                    fontsize=7, color="grey")
    ax.set_xlabel(r"$\tau$")
    ax.set_ylabel(r"$\|\omega - \omega_{exact}\|_{L^2}$")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    _save(fig, job)


def plot_enstrophy(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    tmin, tmax = np.inf, -np.inf
    for i, path in enumerate(job.inputs):
        data = read_trajectory(path)
        keep = data["rejected"] == 0
        t = data["t"][keep]
        ax.plot(t, data["enstrophy"][keep], lw=1.0,
                label=_label(job, i, f"run {i + 1}" if len(job.inputs) > 1 else "computed"))
        tmin, tmax = min(tmin, t.min()), max(tmax, t.max())
    amp = amplitude_for(job.case, job.overlay_params)
    if amp is not None:
        ts = np.linspace(min(tmin, 0.0), tmax, 2000)
        ax.plot(ts, [amp.enstrophy(t) for t in ts], "k--", lw=0.9,
                label=r"$2\pi^2 f(t)^2$")
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|\omega\|^2$")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.25)
    _save(fig, job)


def plot_stepsize(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    for i, path in enumerate(job.inputs):
        data = read_trajectory(path)
        keep = data["rejected"] == 0
        ax.semilogy(data["t"][keep], data["tau"][keep], lw=0.9,
                    label=_label(job, i, f"run {i + 1}"))
        rej = ~keep
        if rej.any():
            ax.semilogy(data["t"][rej], data["tau"][rej], "rx", ms=4,
                        label="rejected" if i == 0 else None)
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\tau_n$")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    _save(fig, job)


def plot_error(job: PlotJob):
    fig, ax = plt.subplots(figsize=(5.0, 3.8))
    for i, path in enumerate(job.inputs):
        data = read_trajectory(path)
        keep = (data["rejected"] == 0) & ~np.isnan(data["err_mix_inf"])
        ax.semilogy(data["t"][keep], data["err_mix_inf"][keep], lw=0.9,
                    label=_label(job, i, f"run {i + 1}"))
    ax.set_xlabel("t")
    ax.set_ylabel(r"$\|e^n_{mix}\|_\infty$")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    _save(fig, job)


RENDERERS = {
    "convergence": plot_convergence,
    "enstrophy": plot_enstrophy,
    "stepsize": plot_stepsize,
    "error": plot_error,
}


def plot(job: PlotJob):
    """Render the job; raises before any file is written on bad input."""
    RENDERERS[job.kind](job)
