"""Plot job description and CSV ingestion with schema validation."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

KINDS = ("convergence", "enstrophy", "stepsize", "error")

SCHEMAS = {
    "convergence": ["tableau", "tau", "err_L2_omega", "err_L2_u", "err_L2_psi",
                    "observed_rate"],
    "trajectory": ["n", "t", "tau", "enstrophy", "dtau_norm", "err_mix_inf",
                   "rejected"],
}


class SchemaError(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass
class PlotJob:
    inputs: list
    kind: str
    output: str
    case: str | None = None
    overlay_params: dict | None = None
    labels: list = field(default_factory=list)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown plot kind {self.kind!r}; known: {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV required")


def _read(path: str, schema: list) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EmptyInput(f"{path}: empty file")
    header = rows[0]
    for col in schema:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r} (found {header})")
    body = rows[1:]
    if not body:
        raise EmptyInput(f"{path}: no data rows")
    idx = {c: header.index(c) for c in header}
    out = {}
    for col in header:
        vals = [r[idx[col]] for r in body]
        if col == "tableau":
            out[col] = np.array(vals, dtype=object)
        else:
            out[col] = np.array([float(v) if v != "" else np.nan for v in vals])
    return out


def read_convergence(path: str) -> dict:
    return _read(path, SCHEMAS["convergence"])


def read_trajectory(path: str) -> dict:
    return _read(path, SCHEMAS["trajectory"])
