"""Order-condition evaluation for the IMEX tableaux.

The condition set is the simplified one for problems whose implicit part
is linear: 2 conditions at order 1, 2 at order 2, 5 at order 3 and 11 at
order 4 (against 6 and 18 in the classical theory).  Weights b, b_hat are
always the last tableau rows; they are never stored separately.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tableaux import Tableau

CERTIFY_TOL = 1e-10


@dataclass(frozen=True)
class ConditionResult:
    label: str
    lhs: float
    target: float
    residual: float
    order: int
    kind: str  # implicit | explicit | coupling


def _conditions(t: Tableau, p: int):
    b, bh = t.b, t.b_hat
    A, Ah, c = t.A, t.A_hat, t.c
    one = np.ones_like(c)
    conds = []

    def add(label, lhs, target, order, kind):
        conds.append((label, float(lhs), target, order, kind))

    if p >= 1:
        add("b'1 = 1", b @ one, 1.0, 1, "implicit")
        add("bh'1 = 1", bh @ one, 1.0, 1, "explicit")
    if p >= 2:
        add("b'c = 1/2", b @ c, 0.5, 2, "implicit")
        add("bh'c = 1/2", bh @ c, 0.5, 2, "explicit")
    if p >= 3:
        add("bh'c^2 = 1/3", bh @ c**2, 1 / 3, 3, "explicit")
        add("b'Ac = 1/6", b @ A @ c, 1 / 6, 3, "implicit")
        add("bh'Ahc = 1/6", bh @ Ah @ c, 1 / 6, 3, "explicit")
        add("b'Ahc = 1/6", b @ Ah @ c, 1 / 6, 3, "coupling")
        add("bh'Ac = 1/6", bh @ A @ c, 1 / 6, 3, "coupling")
    if p >= 4:
        Ac = A @ c
        Ahc = Ah @ c
        add("bh'c^3 = 1/4", bh @ c**3, 1 / 4, 4, "explicit")
        add("bh'(c.Ahc) = 1/8", bh @ (c * Ahc), 1 / 8, 4, "explicit")
        add("bh'(c.Ac) = 1/8", bh @ (c * Ac), 1 / 8, 4, "coupling")
        add("bh'Ah c^2 = 1/12", bh @ Ah @ c**2, 1 / 12, 4, "explicit")
        add("b'Ah c^2 = 1/12", b @ Ah @ c**2, 1 / 12, 4, "coupling")
        add("bh'A Ahc + b'Ah Ahc = 1/12", bh @ A @ Ahc + b @ Ah @ Ahc, 1 / 12, 4, "coupling")
        add("b'A Ac = 1/24", b @ A @ Ac, 1 / 24, 4, "implicit")
        add("b'Ah Ac + bh'A Ac = 1/12", b @ Ah @ Ac + bh @ A @ Ac, 1 / 12, 4, "coupling")
        add("b'A Ahc = 1/24", b @ A @ Ahc, 1 / 24, 4, "coupling")
        add("bh'Ah Ac = 1/24", bh @ Ah @ Ac, 1 / 24, 4, "coupling")
        add("bh'Ah Ahc = 1/24", bh @ Ah @ Ahc, 1 / 24, 4, "explicit")
    return conds


def check_order(t: Tableau, p: int) -> list[ConditionResult]:
    """Evaluate every condition at levels 1..p and report the residuals."""
    if p not in (1, 2, 3, 4):
        raise ValueError(f"order must be 1..4, got {p}")
    out = []
    for label, lhs, target, order, kind in _conditions(t, p):
        out.append(ConditionResult(label, lhs, target, abs(lhs - target), order, kind))
    return out


def certify(t: Tableau, tol: float = CERTIFY_TOL) -> int:
    """Highest p in 0..4 with every residual at levels 1..p within tol."""
    best = 0
    for p in (1, 2, 3, 4):
        if all(r.residual <= tol for r in check_order(t, p)):
            best = p
        else:
            break
    return best
