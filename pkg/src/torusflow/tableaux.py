"""Stiffly-accurate implicit-explicit Runge-Kutta tableaux.

Each method pairs a diagonally implicit matrix A (zero first row and
column) with a strictly lower-triangular explicit matrix A_hat on shared
abscissas c, with c1 = 0 and c_s = 1.  Weights are the last rows (stiff
accuracy), so the final stage is the step solution.

Long-time stability is governed by the difference-coefficient matrices
E^-1 A_I and E^-1 A_E (E lower-triangular all-ones): the method damps the
enstrophy whenever the symmetric part of E^-1 A_I is positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class DegenerateParameter(ValueError):
    """Family parameter hits a removable singularity of the coefficients."""


class UnknownTableau(KeyError):
    pass


@dataclass(frozen=True)
class Tableau:
    s: int
    c: np.ndarray
    A: np.ndarray
    A_hat: np.ndarray
    name: str
    order: int
    param: float | None = None

    @property
    def b(self) -> np.ndarray:
        return self.A[-1]

    @property
    def b_hat(self) -> np.ndarray:
        return self.A_hat[-1]

    def __post_init__(self):
        for a in (self.c, self.A, self.A_hat):
            a.flags.writeable = False

    def label(self) -> str:
        if self.param is None:
            return self.name
        return f"{self.name}({self.param:g})"


@dataclass(frozen=True)
class DifferenceMatrices:
    DI: np.ndarray
    DE: np.ndarray


@dataclass(frozen=True)
class StabilityReport:
    lambda_I: float
    sigma_I: float
    sigma_E: float
    positive_definite: bool


def imex_euler() -> Tableau:
    """First-order implicit-explicit Euler baseline (backward Euler diffusion,
    forward Euler convection)."""
    c = np.array([0.0, 1.0])
    A = np.array([[0.0, 0.0], [0.0, 1.0]])
    Ah = np.array([[0.0, 0.0], [1.0, 0.0]])
    return Tableau(2, c, A, Ah, "imex_euler", 1)


def ierk23(c2: float) -> Tableau:
    """Second-order 3-stage family; degenerate at c2 in {0, 1}."""
    c2 = float(c2)
    if abs(c2) < 1e-12 or abs(1.0 - c2) < 1e-12:
        raise DegenerateParameter(f"ierk23 undefined at c2={c2}")
    c = np.array([0.0, c2, 1.0])
    A = np.zeros((3, 3))
    A[1, 1] = c2
    A[2, 1] = 1.0 / (2.0 - 2.0 * c2)
    A[2, 2] = (1.0 - 2.0 * c2) / (2.0 - 2.0 * c2)
    Ah = np.zeros((3, 3))
    Ah[1, 0] = c2
    Ah[2, 0] = 1.0 - 1.0 / (2.0 * c2)
    Ah[2, 1] = 1.0 / (2.0 * c2)
    return Tableau(3, c, A, Ah, "ierk23", 2, c2)


def ierk35(a55: float) -> Tableau:
    """Third-order 5-stage family; degenerate where 132*a55 + 47 = 0."""
    a55 = float(a55)
    if abs(132.0 * a55 + 47.0) < 1e-10:
        raise DegenerateParameter(f"ierk35 undefined at a55={a55}")
    c = np.array([0.0, 1.0, 0.5, 0.9, 1.0])
    A = np.zeros((5, 5))
    A[1, 1] = 1.0
    A[2, 1] = -3 / 10
    A[2, 2] = 4 / 5
    A[3, 1] = -367 / 250
    A[3, 2] = 196 / 125
    A[3, 3] = 4 / 5
    A[4, 1] = -2.0 * (36.0 * a55 - 5.0) / 147.0
    A[4, 2] = (75.0 * a55 + 598.0) / 588.0
    A[4, 3] = -25.0 * (15.0 * a55 + 2.0) / 588.0
    A[4, 4] = a55
    Ah = np.zeros((5, 5))
    Ah[1, 0] = 1.0
    Ah[2, 0] = (939.0 * a55 + 282.0) / (2640.0 * a55 + 940.0)
    Ah[2, 1] = (381.0 * a55 + 188.0) / (2640.0 * a55 + 940.0)
    Ah[3, 0] = 9.0 * (639.0 * a55 + 1222.0) / (250.0 * (132.0 * a55 + 47.0))
    Ah[3, 1] = 9 / 10
    Ah[3, 2] = -Ah[3, 0]
    Ah[4, 0] = 47 / 270
    Ah[4, 1] = 1 / 10
    Ah[4, 2] = 19 / 30
    Ah[4, 3] = 5 / 54
    return Tableau(5, c, A, Ah, "ierk35", 3, a55)


def ierk47(a43_hat: float) -> Tableau:
    """Fourth-order 7-stage family, defined for every real parameter.

    The fixed entries are exact integer ratios; they are divided once in
    double precision so the order-condition residuals stay at rounding
    level.
    """
    x = float(a43_hat)
    c = np.array([0.0, 3 / 4, 1.0, 9 / 20, 3 / 4, 3 / 4, 1.0])
    A = np.zeros((7, 7))
    A[1, 1] = 3 / 4
    A[2, 1] = -1 / 2
    A[2, 2] = 3 / 2
    A[3, 1] = -169 / 800
    A[3, 2] = 129 / 800
    A[3, 3] = 1 / 2
    A[4, 1] = -11099846794473413537 / 13545655559296875000
    A[4, 2] = 5938991227245191 / 56762747105625000
    A[4, 3] = 4021588899578801 / 4257206032921875
    A[4, 4] = 144648284471 / 278085937500
    A[5, 1] = -15012700453574148059759 / 355573458431542968750000
    A[5, 2] = 37751222339857820917 / 135456555592968750000
    A[5, 3] = 2547104330002710487 / 10159241669472656250
    A[5, 4] = -3921377950657453 / 7299755859375000
    A[5, 5] = 4 / 5
    A[6, 1] = 94181 / 262500
    A[6, 2] = -53 / 100
    A[6, 3] = 3 / 5
    A[6, 4] = -125681 / 262500
    A[6, 5] = 4 / 5
    A[6, 6] = 1 / 4
    Ah = np.zeros((7, 7))
    Ah[1, 0] = 3 / 4
    Ah[2, 0] = 7 / 10
    Ah[2, 1] = 3 / 10
    Ah[3, 0] = x / 3 + 1557 / 4000
    Ah[3, 1] = 243 / 4000 - 4.0 * x / 3.0
    Ah[3, 2] = x
    Ah[4, 0] = (70997500000 * x + 1042842334347) / 2411160939000
    Ah[4, 1] = (-283990000000 * x - 5126845621293) / 2411160939000
    Ah[4, 2] = 70997500 * x / 803720313 + 570851989 / 676532250
    Ah[4, 3] = 8 / 5
    Ah[5, 0] = (1913150328903 - 672359500000 * x) / 2893393126800
    Ah[5, 1] = (2689438000000 * x + 3223449241353) / 2893393126800
    Ah[5, 2] = (-168089875000 * x - 138406721733) / 241116093900
    Ah[5, 3] = -201267778 / 267906771
    Ah[5, 4] = 3 / 10
    Ah[6, 0] = 25 / 162
    Ah[6, 1] = -811 / 540
    Ah[6, 2] = 3 / 22
    Ah[6, 3] = 500 / 891
    Ah[6, 4] = 3 / 4
    Ah[6, 5] = 9 / 10
    return Tableau(7, c, A, Ah, "ierk47", 4, x)


def difference_matrices(t: Tableau) -> DifferenceMatrices:
    """E^-1 A_I and E^-1 A_E: row i of the source minus row i-1."""
    AI = t.A[1:, 1:]
    AE = t.A_hat[1:, :-1]
    DI = AI.copy()
    DI[1:] -= AI[:-1]
    DE = AE.copy()
    DE[1:] -= AE[:-1]
    return DifferenceMatrices(DI, DE)


def stability_report(t: Tableau, tol: float = 1e-12) -> StabilityReport:
    d = difference_matrices(t)
    S = 0.5 * (d.DI + d.DI.T)
    lam = float(np.linalg.eigvalsh(S).min())
    sig_i = float(np.linalg.norm(d.DI, 2))
    sig_e = float(np.linalg.norm(d.DE, 2))
    return StabilityReport(lam, sig_i, sig_e, lam > tol)


def validate(t: Tableau, tol: float = 1e-13) -> list[str]:
    """Structural invariant violations; empty list means the tableau is sound."""
    bad = []
    s = t.s
    if t.c.shape != (s,) or t.A.shape != (s, s) or t.A_hat.shape != (s, s):
        bad.append("shape mismatch")
        return bad
    if abs(t.c[0]) > tol:
        bad.append(f"c1 = {t.c[0]!r}, expected 0")
    if abs(t.c[-1] - 1.0) > tol:
        bad.append(f"c_s = {t.c[-1]!r}, expected 1")
    if np.abs(t.A[:, 0]).max() > tol:
        bad.append("first column of A not zero")
    if np.abs(t.A[0]).max() > tol:
        bad.append("first row of A not zero")
    if np.abs(np.triu(t.A, 1)).max() > tol:
        bad.append("A not lower triangular")
    if np.abs(np.triu(t.A_hat, 0)).max() > tol:
        bad.append("A_hat not strictly lower triangular")
    rs = np.abs(t.A.sum(axis=1) - t.c).max()
    if rs > tol:
        bad.append(f"canopy violation on A: max |row sum - c| = {rs:.3e}")
    rs = np.abs(t.A_hat.sum(axis=1) - t.c).max()
    if rs > tol:
        bad.append(f"canopy violation on A_hat: max |row sum - c| = {rs:.3e}")
    # stiff accuracy is a property of the stored rows: b is row s by
    # construction, so only report if a caller built the tableau by hand
    # with an inconsistent weight row.
    return bad


# positive-definiteness ranges of the family parameter (boundaries from the
# sign changes of lambda_I; see stability_report)
PD_RANGES = {
    "imex_euler": ((-np.inf, np.inf),),
    "ierk23": ((0.116337, 0.434174), (1.15161, 4.29788)),
    "ierk35": ((0.626214, 2.10996),),
    "ierk47": ((-np.inf, np.inf),),
}

FAMILIES = {
    "imex_euler": (imex_euler, None),
    "ierk23": (ierk23, 0.35),
    "ierk35": (ierk35, 1.2),
    "ierk47": (ierk47, -0.8),
}


def make_tableau(name: str, param: float | None = None) -> Tableau:
    """Build a tableau by family name; param falls back to a representative
    value from the middle of the stable range when omitted."""
    key = name.lower().replace("-", "_")
    if key not in FAMILIES:
        raise UnknownTableau(f"unknown tableau {name!r}; known: {sorted(FAMILIES)}")
    ctor, default = FAMILIES[key]
    if ctor is imex_euler:
        return imex_euler()
    p = default if param is None else float(param)
    return ctor(p)


def in_pd_range(name: str, param: float | None) -> bool:
    key = name.lower().replace("-", "_")
    if key == "imex_euler":
        return True
    if param is None:
        param = FAMILIES[key][1]
    return any(lo < param < hi for lo, hi in PD_RANGES[key])
