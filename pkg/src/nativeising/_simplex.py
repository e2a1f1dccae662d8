"""Exact two-phase simplex over the rationals.

Solves ``min c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= 0`` with
integer-preserving pivoting: each row is scaled to integers once and the
tableau is held as integers over one common denominator, so a pivot is pure
``int`` arithmetic with exact division. Bland's rule makes the pivot
sequence, and hence the returned vertex, deterministic.

An infeasible system comes back with a Farkas certificate ``z`` such that
``z_ub >= 0``, ``z^T A >= 0`` column-wise and ``z^T b < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Sequence

Number = int | Fraction


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] = field(default_factory=list)
    objective: Fraction | None = None
    certificate_eq: list[Fraction] = field(default_factory=list)
    certificate_ub: list[Fraction] = field(default_factory=list)
    pivots: int = 0


def _integer_row(coeffs: Sequence[Number], rhs: Number) -> tuple[list[int], int, int]:
    vals = [Fraction(v) for v in coeffs] + [Fraction(rhs)]
    m = 1
    for v in vals:
        m = lcm(m, v.denominator)
    ints = [int(v * m) for v in vals]
    return ints[:-1], ints[-1], m


class _Tableau:
    """Constraint rows and objective rows, each ``coefficients + [rhs]``."""

    def __init__(self, rows: list[list[int]], objectives: list[list[int]], basis: list[int]):
        self.rows = rows
        self.objectives = objectives
        self.basis = basis
        self.d = 1
        self.pivots = 0

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        p, d = prow[c], self.d
        for row in self.rows + self.objectives:
            if row is prow:
                continue
            f = row[c]
            if f:
                row[:] = [(p * v - f * w) // d for v, w in zip(row, prow)]
            elif p != d:
                row[:] = [p * v // d for v in row]
        if p < 0:
            for row in self.rows + self.objectives:
                row[:] = [-v for v in row]
            p = -p
        self.d = p
        self.basis[r] = c
        self.pivots += 1

    def run(self, objective: int, allowed: int) -> str:
        """Bland's-rule primal simplex on objective row ``objective``.

        Only columns ``< allowed`` may enter the basis.
        """
        cost = self.objectives[objective]
        while True:
            entering = next((j for j in range(allowed) if cost[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a <= 0:
                    continue
                if best is None:
                    best = i
                    continue
                bi = self.rows[best]
                # compare row[-1]/a with bi[-1]/bi[entering]
                lhs, rhs = row[-1] * bi[entering], bi[-1] * a
                if lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[best]):
                    best = i
            if best is None:
                return "unbounded"
            self.pivot(best, entering)

    def value(self, k: int) -> Fraction:
        return Fraction(k, self.d)


def solve_lp(c: Sequence[Number],
             A_eq: Sequence[Sequence[Number]] = (), b_eq: Sequence[Number] = (),
             A_ub: Sequence[Sequence[Number]] = (), b_ub: Sequence[Number] = ()) -> LPResult:
    """Minimise ``c.x`` over ``x >= 0`` subject to equality and ``<=`` rows."""
    nx = len(c)
    m_eq, m_ub = len(A_eq), len(A_ub)
    m = m_eq + m_ub
    n_slack = m_ub

    scaled: list[tuple[list[int], int, int, bool]] = []  # (coeffs, rhs, multiplier, has_slack)
    for row, b in zip(A_eq, b_eq):
        coeffs, rhs, mult = _integer_row(row, b)
        scaled.append((coeffs, rhs, mult, False))
    for row, b in zip(A_ub, b_ub):
        coeffs, rhs, mult = _integer_row(row, b)
        scaled.append((coeffs, rhs, mult, True))

    # Decide which rows need an artificial variable.
    needs_art = []
    for coeffs, rhs, mult, has_slack in scaled:
        needs_art.append(not (has_slack and rhs >= 0))
    n_art = sum(needs_art)
    ncols = nx + n_slack + n_art

    rows: list[list[int]] = []
    basis: list[int] = []
    signs: list[int] = []  # +-1 applied to each scaled row so that rhs >= 0
    art_col = nx + n_slack
    for k, (coeffs, rhs, mult, has_slack) in enumerate(scaled):
        sign = -1 if rhs < 0 else 1
        row = [sign * v for v in coeffs] + [0] * (n_slack + n_art) + [sign * rhs]
        if has_slack:
            # slack scaled by the row multiplier so the row stays integral
            row[nx + (k - m_eq)] = sign * mult
        if needs_art[k]:
            row[art_col] = 1
            basis.append(art_col)
            art_col += 1
        else:
            basis.append(nx + (k - m_eq))
        rows.append(row)
        signs.append(sign)

    # The integer tableau needs every basic column equal to the common
    # denominator; slack-basic rows carry ``mult`` there, so rescale.
    denom = 1
    for k in range(m):
        denom = lcm(denom, rows[k][basis[k]])
    # true standard-form row k = mu[k] * original row k
    mu = []
    for k in range(m):
        entry = rows[k][basis[k]]
        mu.append(Fraction(signs[k] * scaled[k][2], entry))
        factor = denom // entry
        if factor != 1:
            rows[k] = [v * factor for v in rows[k]]

    cden = 1
    for v in c:
        cden = lcm(cden, Fraction(v).denominator)
    phase2 = [int(Fraction(v) * cden) * denom for v in c] + [0] * (ncols - nx + 1)
    phase1 = [0] * (ncols + 1)
    for k in range(m):
        if basis[k] >= nx + n_slack:
            phase1[basis[k]] = denom
            phase1 = [a - v for a, v in zip(phase1, rows[k])]

    tab = _Tableau(rows, [phase2, phase1], basis)
    tab.d = denom
    initial_basis = list(basis)

    tab.run(objective=1, allowed=ncols)
    phase1_value = -tab.value(tab.objectives[1][-1])
    if phase1_value > 0:
        # y_k = c1(initial basic) - reduced cost(initial basic)
        ys = []
        for k in range(m):
            col = initial_basis[k]
            c1 = 1 if col >= nx + n_slack else 0
            ys.append(c1 - tab.value(tab.objectives[1][col]))
        z = [-ys[k] * mu[k] for k in range(m)]
        return LPResult("infeasible", certificate_eq=z[:m_eq], certificate_ub=z[m_eq:],
                        pivots=tab.pivots)

    # Drive zero-level artificials out of the basis; drop redundant rows.
    k = 0
    while k < len(tab.rows):
        if tab.basis[k] >= nx + n_slack:
            row = tab.rows[k]
            j = next((j for j in range(nx + n_slack) if row[j] != 0), None)
            if j is None:
                del tab.rows[k]
                del tab.basis[k]
                continue
            tab.pivot(k, j)
        k += 1

    status = tab.run(objective=0, allowed=nx + n_slack)
    if status == "unbounded":
        return LPResult("unbounded", pivots=tab.pivots)
    x = [Fraction(0)] * nx
    for k, col in enumerate(tab.basis):
        if col < nx:
            x[col] = tab.value(tab.rows[k][-1])
    objective = sum((Fraction(cj) * xj for cj, xj in zip(c, x)), Fraction(0))
    return LPResult("optimal", x=x, objective=objective, pivots=tab.pivots)


def check_farkas(A_eq, b_eq, A_ub, b_ub, z_eq, z_ub) -> bool:
    """True when ``(z_eq, z_ub)`` proves infeasibility over ``x >= 0``."""
    if any(z < 0 for z in z_ub):
        return False
    rows = list(A_eq) + list(A_ub)
    z = list(z_eq) + list(z_ub)
    b = list(b_eq) + list(b_ub)
    nx = len(rows[0]) if rows else 0
    for j in range(nx):
        if sum(Fraction(zk) * Fraction(r[j]) for zk, r in zip(z, rows)) < 0:
            return False
    return sum(Fraction(zk) * Fraction(bk) for zk, bk in zip(z, b)) < 0
