"""Native (ancilla-free) Ising encodings of truth tables.

A truth table is a set of bit-rows over named qubits; an encoding is native
when its ground-state set is exactly that row set on the same qubits.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from . import _simplex
from .errors import CapacityError, DegenerateSpectrumError, DimensionError, InfeasibleEncodingError
from .ising import (
    DEFAULT_ENUMERATION_CAP,
    DEFAULT_GROUP_TOL,
    IsingProblem,
    all_energies,
    bits_to_index,
    enumerate_spectrum,
    gauge_flip,
    index_to_bits,
    spin_matrix,
)


@dataclass(frozen=True)
class TruthTable:
    """Valid rows over ordered qubit labels."""

    labels: tuple[str, ...]
    rows: frozenset[str]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        rows = frozenset(str(r) for r in self.rows)
        n = len(labels)
        if n == 0:
            raise ValueError("a truth table needs at least one qubit")
        if len(set(labels)) != n:
            raise ValueError("labels must be unique")
        if not rows:
            raise ValueError("a truth table needs at least one row")
        for r in rows:
            if len(r) != n or set(r) - {"0", "1"}:
                raise ValueError(f"row {r!r} is not a {n}-bit string")
        if len(rows) == 2 ** n:
            raise ValueError("a table containing every row cannot be a strict ground set")
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "rows", rows)

    @property
    def n(self) -> int:
        return len(self.labels)

    def sorted_rows(self) -> list[str]:
        return sorted(self.rows)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "rows": self.sorted_rows()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "TruthTable":
        rows = list(data["rows"])
        if len(set(rows)) != len(rows):
            raise ValueError("duplicate rows in truth table")
        return cls(tuple(data["labels"]), frozenset(rows))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "TruthTable":
        return cls.from_dict(json.loads(text))


class GateKind(enum.Enum):
    NOR = "nor"
    NAND = "nand"
    OR = "or"
    AND = "and"
    MULTIPLIER_CELL = "multiplier"


GATE_LABELS = ("A", "B", "R")
CELL_LABELS = ("X", "Y", "Z", "D", "C", "S")

_GATE_FUNCS = {
    GateKind.NOR: lambda a, b: 1 - (a | b),
    GateKind.NAND: lambda a, b: 1 - (a & b),
    GateKind.OR: lambda a, b: a | b,
    GateKind.AND: lambda a, b: a & b,
}

# Couplings (J_AB, J_AR, J_BR) and fields for the three-qubit gates.
_GATE_COEFFS = {
    GateKind.NOR: ((0.5, 0.5, 1.0), (0.5, 1.0, 1.0)),
    GateKind.NAND: ((-0.5, -0.5, -1.0), (0.5, 1.0, 1.0)),
    GateKind.OR: ((0.5, 0.5, -1.0), (0.5, -1.0, -1.0)),
    GateKind.AND: ((-0.5, -0.5, 1.0), (0.5, -1.0, -1.0)),
}


def multiplier_table() -> TruthTable:
    """The 16 rows of ``X*Y + Z + D = S + 2*C`` over (X, Y, Z, D, C, S)."""
    rows = set()
    for x, y, z, d in itertools.product((0, 1), repeat=4):
        t = x * y + z + d
        rows.add(f"{x}{y}{z}{d}{t >> 1}{t & 1}")
    return TruthTable(CELL_LABELS, frozenset(rows))


def truth_table(kind: GateKind) -> TruthTable:
    if kind is GateKind.MULTIPLIER_CELL:
        return multiplier_table()
    f = _GATE_FUNCS[kind]
    rows = frozenset(f"{a}{b}{f(a, b)}" for a, b in itertools.product((0, 1), repeat=2))
    return TruthTable(GATE_LABELS, rows)


def gate(kind: GateKind | str) -> IsingProblem:
    """Canonical native encoding for a gate or the multiplier cell.

    Qubit order is (A, B, R) for gates and (X, Y, Z, D, C, S) for the cell.
    """
    kind = GateKind(kind) if not isinstance(kind, GateKind) else kind
    if kind is GateKind.MULTIPLIER_CELL:
        return _canonical_cell()
    h, (j_ab, j_ar, j_br) = _GATE_COEFFS[kind]
    return IsingProblem(h=h, J={(0, 1): j_ab, (0, 2): j_ar, (1, 2): j_br}, labels=GATE_LABELS)


@lru_cache(maxsize=1)
def _canonical_cell() -> IsingProblem:
    return synthesize(multiplier_table(), CANONICAL_CELL_CONFIG)


# -- synthesis -------------------------------------------------------------


def _exact(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


@dataclass(frozen=True)
class SynthesisConfig:
    """Search settings for :func:`synthesize`.

    ``fixed_couplings`` pins chosen J entries (keys are qubit pairs);
    ``bound`` caps every free coefficient in absolute value; ``min_gap``
    is the required energy margin between valid rows and all other
    states. ``mode`` is ``"lp"`` (exact rational LP) or ``"grid"`` (exhaustive
    search over multiples of ``grid_step``).
    """

    fixed_couplings: Mapping[tuple[int, int], float] | None = None
    bound: float = 4.0
    min_gap: float = 1.0
    mode: str = "lp"
    grid_step: float = 0.5
    max_grid_candidates: int = 5_000_000

    def __post_init__(self):
        if self.bound <= 0:
            raise ValueError("coefficient bound must be positive")
        if self.min_gap <= 0:
            raise ValueError("minimum gap must be positive")
        if self.mode not in ("lp", "grid"):
            raise ValueError(f"unknown synthesis mode {self.mode!r}")
        if self.grid_step <= 0:
            raise ValueError("grid step must be positive")


CANONICAL_CELL_CONFIG = SynthesisConfig(bound=4.0, min_gap=1.0)


@dataclass(frozen=True)
class SynthesisResult:
    problem: IsingProblem
    h: tuple[Fraction, ...]
    J: dict[tuple[int, int], Fraction]
    l1_norm: Fraction
    pivots: int = 0


def _terms(n: int) -> list[tuple[int, ...]]:
    return [(i,) for i in range(n)] + list(itertools.combinations(range(n), 2))


def _features(n: int) -> np.ndarray:
    """Rows: basis states; columns: s_i then s_i s_j (i < j)."""
    s = spin_matrix(np.arange(2 ** n), n).astype(np.int64)
    cols = [s[:, t[0]] if len(t) == 1 else s[:, t[0]] * s[:, t[1]] for t in _terms(n)]
    return np.stack(cols, axis=1)


def synthesize(table: TruthTable, cfg: SynthesisConfig | None = None) -> IsingProblem:
    """Find fields and couplings whose ground set is exactly ``table.rows``.

    Raises
    ------
    InfeasibleEncodingError
        If no encoding on the table's own qubits exists within the bound.
    """
    return synthesize_exact(table, cfg).problem


def synthesize_exact(table: TruthTable, cfg: SynthesisConfig | None = None,
                     cap: int = DEFAULT_ENUMERATION_CAP) -> SynthesisResult:
    """Like :func:`synthesize` but also returns the exact rational coefficients."""
    cfg = cfg or SynthesisConfig()
    n = table.n
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds the enumeration cap of {cap}")
    terms = _terms(n)
    fixed: dict[tuple[int, ...], Fraction] = {}
    for (i, j), v in dict(cfg.fixed_couplings or {}).items():
        i, j = int(i), int(j)
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise DimensionError(f"fixed coupling ({i}, {j}) invalid for {n} qubits")
        fixed[(min(i, j), max(i, j))] = _exact(v)
    free = [t for t in terms if t not in fixed]
    phi = _features(n)
    col = {t: k for k, t in enumerate(terms)}
    free_cols = [col[t] for t in free]
    const = np.zeros(2 ** n, dtype=object)
    for t, v in fixed.items():
        const = const + phi[:, col[t]].astype(object) * v
    rows = sorted(bits_to_index(r) for r in table.rows)
    if cfg.mode == "lp":
        coeffs, l1, pivots = _solve_lp(phi, free_cols, const, rows, table, cfg)
    else:
        coeffs, l1 = _solve_grid(phi, free_cols, const, rows, table, cfg)
        pivots = 0
    values: dict[tuple[int, ...], Fraction] = dict(fixed)
    values.update(zip(free, coeffs))
    h = tuple(values[(i,)] for i in range(n))
    J = {t: values[t] for t in terms if len(t) == 2 and values[t] != 0}
    problem = IsingProblem(h=[float(v) for v in h], J={k: float(v) for k, v in J.items()},
                           labels=table.labels)
    return SynthesisResult(problem, h, J, l1, pivots)


def _solve_lp(phi, free_cols, const, rows, table, cfg):
    n = table.n
    m = len(free_cols)
    bound, gap = _exact(cfg.bound), _exact(cfg.min_gap)
    ref = rows[0]
    row_set = set(rows)
    # variables: u_0..u_{m-1}, v_0..v_{m-1}; coefficient w = u - v
    c = [1] * (2 * m)
    A_eq, b_eq, eq_names = [], [], []
    A_ub, b_ub, ub_names = [], [], []
    for r in rows[1:]:
        d = [int(phi[r, k] - phi[ref, k]) for k in free_cols]
        A_eq.append(d + [-x for x in d])
        b_eq.append(-(const[r] - const[ref]))
        eq_names.append(f"row {index_to_bits(r, n)} = row {index_to_bits(ref, n)}")
    for t in range(2 ** n):
        if t in row_set:
            continue
        d = [int(phi[t, k] - phi[ref, k]) for k in free_cols]
        # E(t) - E(ref) >= gap  ->  -d.w <= -(gap - dc)
        A_ub.append([-x for x in d] + d)
        b_ub.append(-(gap - (const[t] - const[ref])))
        ub_names.append(f"state {index_to_bits(t, n)} >= gap")
    for k in range(2 * m):
        e = [0] * (2 * m)
        e[k] = 1
        A_ub.append(e)
        b_ub.append(bound)
        ub_names.append(f"bound {'+' if k < m else '-'}coef{k % m}")
    res = _simplex.solve_lp(c, A_eq, b_eq, A_ub, b_ub)
    if res.status != "optimal":
        cert = {name: z for name, z in zip(eq_names + ub_names,
                                           res.certificate_eq + res.certificate_ub) if z != 0}
        raise InfeasibleEncodingError(
            f"no ancilla-free 2-local encoding of the {len(rows)}-row table on {n} qubits "
            f"with |coefficient| <= {cfg.bound} and gap >= {cfg.min_gap}; "
            f"Farkas certificate over {len(cert)} constraints",
            certificate=cert,
        )
    w = [res.x[k] - res.x[k + m] for k in range(m)]
    return w, res.objective, res.pivots


def _solve_grid(phi, free_cols, const, rows, table, cfg):
    n = table.n
    m = len(free_cols)
    step, bound = _exact(cfg.grid_step), _exact(cfg.bound)
    kmax = int(bound / step)
    # candidate values ordered by magnitude so the first optimum is the sparsest
    ladder = sorted(range(-kmax, kmax + 1), key=lambda k: (abs(k), k < 0))
    total = len(ladder) ** m
    if total > cfg.max_grid_candidates:
        raise CapacityError(f"grid search needs {total} candidates (limit "
                            f"{cfg.max_grid_candidates}); use mode='lp'")
    grid = np.array(ladder, dtype=np.float64) * float(step)
    const_f = np.array([float(v) for v in const])
    sub = phi[:, free_cols].astype(np.float64)
    row_mask = np.zeros(2 ** n, dtype=bool)
    row_mask[rows] = True
    tol = 1e-9
    gap = float(cfg.min_gap)
    best = None
    chunk = 1 << 16
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk))
        digits = np.stack(np.unravel_index(idx, (len(ladder),) * m), axis=1) if m else np.zeros((idx.size, 0), int)
        W = grid[digits]
        E = W @ sub.T + const_f
        Er = E[:, row_mask]
        emin = Er.min(axis=1)
        ok = (Er.max(axis=1) - emin <= tol)
        if (~row_mask).any():
            ok &= (E[:, ~row_mask].min(axis=1) >= emin + gap - tol)
        if ok.any():
            l1 = np.abs(W[ok]).sum(axis=1)
            k = int(np.argmin(l1))
            cand = (float(l1[k]), int(idx[ok][k]))
            if best is None or cand[0] < best[0] - tol:
                best = cand
    if best is None:
        raise InfeasibleEncodingError(
            f"no ancilla-free 2-local encoding of the {len(rows)}-row table on {n} qubits: "
            f"exhausted {total} grid candidates with step {cfg.grid_step} and bound {cfg.bound}",
        )
    digits = np.unravel_index(best[1], (len(ladder),) * m) if m else ()
    w = [ladder[int(d)] * step for d in digits]
    return w, sum((abs(x) for x in w), Fraction(0))


# -- verification ----------------------------------------------------------


@dataclass(frozen=True)
class VerificationReport:
    passed: bool
    degeneracy: int
    classical_gap: float | None
    missing_rows: tuple[str, ...] = ()
    extra_states: tuple[str, ...] = ()
    worst_state: str | None = None
    worst_excess: float = 0.0

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "degeneracy": self.degeneracy,
            "classical_gap": self.classical_gap,
            "missing_rows": list(self.missing_rows),
            "extra_states": list(self.extra_states),
            "worst_state": self.worst_state,
            "worst_excess": self.worst_excess,
        }


def verify(problem: IsingProblem, table: TruthTable, group_tol: float = DEFAULT_GROUP_TOL,
           cap: int = DEFAULT_ENUMERATION_CAP) -> VerificationReport:
    """Compare the ground set of ``problem`` with the rows of ``table``.

    The worst violating state is the table row sitting highest above the
    ground energy; when every row is a ground state but extra states are
    too, it is the first extra state.
    """
    if problem.n != table.n:
        raise DimensionError(f"problem has {problem.n} qubits, table has {table.n}")
    spec = enumerate_spectrum(problem, group_tol, cap)
    ground = spec.ground.states
    gap = spec.levels[1].energy - spec.levels[0].energy if len(spec.levels) > 1 else None
    missing = tuple(sorted(table.rows - ground))
    extra = tuple(sorted(ground - table.rows))
    passed = not missing and not extra
    worst, excess = None, 0.0
    if missing:
        energies = all_energies(problem, cap)
        e0 = spec.ground.energy
        worst = max(missing, key=lambda r: (energies[bits_to_index(r)], r))
        excess = float(energies[bits_to_index(worst)] - e0)
    elif extra:
        worst = extra[0]
    return VerificationReport(passed, spec.ground.degeneracy, gap, missing, extra, worst, excess)


# -- gauges ----------------------------------------------------------------


@dataclass(frozen=True)
class Gauge:
    """Per-qubit flips plus a scale mapping one problem's J onto another's.

    ``flips[i]`` is True when qubit i is negated. ``residual`` is the
    relative least-squares misfit of the couplings; ``h_matched`` tells
    whether the same gauge and scale also carry the fields across.
    """

    flips: tuple[bool, ...]
    scale: float
    residual: float
    h_matched: bool
    h_residual: float = field(default=0.0)

    @property
    def flipped(self) -> tuple[int, ...]:
        return tuple(i for i, f in enumerate(self.flips) if f)


def best_gauge(a: IsingProblem, b: IsingProblem, tol: float = 1e-9) -> Gauge:
    """Search all flip vectors for the one making ``a``'s J best fit ``b``'s.

    Ties on the coupling residual go to the vector with fewer flips, then to
    the lexicographically smallest one.
    """
    if a.n != b.n:
        raise DimensionError(f"problems have {a.n} and {b.n} qubits")
    n = a.n
    pairs = list(itertools.combinations(range(n), 2))
    ja = np.array([a.coupling(i, j) for i, j in pairs])
    jb = np.array([b.coupling(i, j) for i, j in pairs])
    ha, hb = np.asarray(a.h), np.asarray(b.h)
    norm_b = float(np.linalg.norm(jb)) or 1.0
    best = None
    for flips in sorted(itertools.product((False, True), repeat=n), key=lambda f: (sum(f), f)):
        sign = np.where(flips, -1.0, 1.0)
        jf = ja * np.array([sign[i] * sign[j] for i, j in pairs]) if pairs else ja
        denom = float(jf @ jf)
        scale = float(jf @ jb) / denom if denom > 0 else 1.0
        residual = float(np.linalg.norm(scale * jf - jb)) / norm_b
        if best is None or residual < best[0] - tol:
            best = (residual, flips, scale, sign)
    residual, flips, scale, sign = best
    hf = scale * sign * ha
    h_res = float(np.linalg.norm(hf - hb)) / (float(np.linalg.norm(hb)) or 1.0)
    return Gauge(tuple(flips), scale, residual, h_res <= 1e-6, h_res)


def gauge_match(a: IsingProblem, b: IsingProblem, tol: float = 1e-6) -> Gauge | None:
    """Gauge under which ``a``'s couplings are proportional to ``b``'s, if any."""
    g = best_gauge(a, b)
    return g if g.residual <= tol else None


def apply_gauge(problem: IsingProblem, gauge: Gauge) -> IsingProblem:
    flipped = gauge_flip(problem, gauge.flipped)
    return flipped.replace(h=[gauge.scale * v for v in flipped.h],
                           J={k: gauge.scale * v for k, v in flipped.J.items()},
                           offset=gauge.scale * flipped.offset)
