"""Array multipliers assembled from native multiplier cells.

Cell ``(i, j)`` computes ``x_i * y_j + Z + D = S + 2 C`` at weight ``i + j``.
Its sum input ``Z`` is the previous row's partial sum at the same weight
(``S`` of cell ``(i+1, j-1)``, or the previous row's final carry for the
leftmost cell), and its carry input ``D`` is ``C`` of cell ``(i-1, j)``.
Inputs with no driver are the constant 0 and are eliminated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .anneal import Histogram, Schedule, SweepRow, ThermalConfig, run_histogram
from .errors import DimensionError
from .ising import (
    IsingProblem,
    clamp,
    clamp_threshold,
    enumerate_spectrum,
    fix_spins,
)
from .logic import GateKind, gate

_Z, _D = 2, 3


@dataclass(frozen=True)
class ComposedProblem:
    """An array multiplier on shared spins.

    ``cells`` holds global qubit indices ``(X, Y, Z, D, C, S)`` per cell,
    with ``None`` for a constant-zero input. Bit lists are LSB first.
    """

    problem: IsingProblem
    x_bits: int
    y_bits: int
    x_qubits: tuple[int, ...]
    y_qubits: tuple[int, ...]
    product_qubits: tuple[int, ...]
    cells: tuple[tuple[int | None, ...], ...]
    roles: dict[int, str] = field(default_factory=dict)
    ground_energy: float = 0.0

    @property
    def n_qubits(self) -> int:
        return self.problem.n

    @property
    def product_bits(self) -> int:
        return self.x_bits + self.y_bits


def build_array(x_bits: int, y_bits: int, cell: IsingProblem | None = None) -> ComposedProblem:
    """Wire ``x_bits * y_bits`` cells into a carry-save array multiplier."""
    if x_bits < 1 or y_bits < 1:
        raise ValueError("operand widths must be at least 1")
    cell = cell or gate(GateKind.MULTIPLIER_CELL)
    if cell.n != 6:
        raise DimensionError("a multiplier cell has 6 qubits (X, Y, Z, D, C, S)")
    cell_ground = enumerate_spectrum(cell).ground.energy

    labels = [f"x{i}" for i in range(x_bits)] + [f"y{j}" for j in range(y_bits)]
    x_q = list(range(x_bits))
    y_q = list(range(x_bits, x_bits + y_bits))
    carry: dict[tuple[int, int], int] = {}
    total: dict[tuple[int, int], int] = {}
    for j in range(y_bits):
        for i in range(x_bits):
            carry[i, j] = len(labels)
            labels.append(f"c{i}{j}")
            total[i, j] = len(labels)
            labels.append(f"s{i}{j}")

    cells = []
    for j in range(y_bits):
        for i in range(x_bits):
            if j == 0:
                z = None
            elif i + 1 < x_bits:
                z = total[i + 1, j - 1]
            else:
                z = carry[x_bits - 1, j - 1]
            d = None if i == 0 else carry[i - 1, j]
            cells.append((x_q[i], y_q[j], z, d, carry[i, j], total[i, j]))

    product = [total[0, j] for j in range(y_bits - 1)]
    product += [total[i, y_bits - 1] for i in range(x_bits)]
    product.append(carry[x_bits - 1, y_bits - 1])

    n = len(labels)
    h = [0.0] * n
    J: dict[tuple[int, int], float] = {}
    offset = 0.0
    ground = 0.0
    for wiring in cells:
        zeros = {k: 0 for k in (_Z, _D) if wiring[k] is None}
        reduced = fix_spins(cell, zeros)
        live = [q for k, q in enumerate(wiring) if k not in zeros]
        for local, q in enumerate(live):
            h[q] += reduced.h[local]
        for (a, b), v in reduced.J.items():
            key = (min(live[a], live[b]), max(live[a], live[b]))
            J[key] = J.get(key, 0.0) + v
        offset += reduced.offset
        ground += cell_ground

    roles = {q: f"x{i}" for i, q in enumerate(x_q)}
    roles.update({q: f"y{j}" for j, q in enumerate(y_q)})
    for k, q in enumerate(product):
        roles[q] = f"p{k}"
    for q in range(n):
        roles.setdefault(q, "internal")
    problem = IsingProblem(h=h, J=J, offset=offset, labels=labels)
    return ComposedProblem(problem, x_bits, y_bits, tuple(x_q), tuple(y_q), tuple(product),
                           tuple(cells), roles, ground)


@dataclass(frozen=True)
class Decoded:
    x: int
    y: int
    product: int
    consistent: bool


def _read(bits: str, qubits: Sequence[int]) -> int:
    return sum(int(bits[q]) << k for k, q in enumerate(qubits))


def decode(arr: ComposedProblem, bits: str) -> Decoded:
    """Read operands and product from a bitstring; check every cell's arithmetic."""
    if len(bits) != arr.n_qubits:
        raise DimensionError(f"bitstring has {len(bits)} bits, array has {arr.n_qubits} qubits")
    ok = True
    for wiring in arr.cells:
        x, y, z, d, c, s = (0 if q is None else int(bits[q]) for q in wiring)
        if x * y + z + d != s + 2 * c:
            ok = False
            break
    return Decoded(_read(bits, arr.x_qubits), _read(bits, arr.y_qubits),
                   _read(bits, arr.product_qubits), ok)


def _bit_targets(qubits: Sequence[int], value: int) -> dict[int, int]:
    return {q: (value >> k) & 1 for k, q in enumerate(qubits)}


def pinning_alpha(problem: IsingProblem, qubits: Sequence[int], margin: float = 0.5) -> float:
    """A clamp strength strictly above every targeted qubit's threshold."""
    return max(clamp_threshold(problem, q) for q in qubits) + margin


def _sample(problem: IsingProblem, engine: str, iterations: int, schedule, thermal,
            threads) -> Histogram:
    if engine == "exhaustive":
        ground = enumerate_spectrum(problem).ground.states
        return Histogram({s: 1 for s in ground}, len(ground), problem.n, {"engine": "exhaustive"})
    return run_histogram(problem, engine, iterations, schedule, thermal, threads)


@dataclass(frozen=True)
class ForwardResult:
    product: int | None
    candidates: tuple[int, ...]
    histogram: Histogram


def multiply_forward(arr: ComposedProblem, x: int, y: int, alpha: float,
                     engine: str = "exhaustive", iterations: int = 1000,
                     schedule: Schedule | None = None, thermal: ThermalConfig | None = None,
                     threads: int | None = None) -> ForwardResult:
    """Clamp the operand bits and anneal; decode the product from the histogram mode.

    The mode is taken over consistent array states only. If tied modes
    decode to different products, ``product`` is None and ``candidates``
    lists them.
    """
    if not (0 <= x < 2 ** arr.x_bits and 0 <= y < 2 ** arr.y_bits):
        raise ValueError(f"operands ({x}, {y}) do not fit {arr.x_bits}x{arr.y_bits} bits")
    targets = _bit_targets(arr.x_qubits, x) | _bit_targets(arr.y_qubits, y)
    clamped = clamp(arr.problem, targets, alpha)
    hist = _sample(clamped, engine, iterations, schedule, thermal, threads)
    valid = {k: v for k, v in hist.counts.items() if decode(arr, k).consistent}
    if not valid:
        return ForwardResult(None, (), hist)
    top = max(valid.values())
    products = tuple(sorted({decode(arr, k).product for k, v in valid.items() if v == top}))
    return ForwardResult(products[0] if len(products) == 1 else None, products, hist)


@dataclass(frozen=True)
class FactorQuery:
    """Backward computation request: find ``(x, y)`` with ``x * y == n``."""

    n: int
    x_bits: int
    y_bits: int
    alpha: float
    engine: str = "exhaustive"
    iterations: int = 1000
    thermal: ThermalConfig | None = None
    schedule: Schedule | None = None
    threads: int | None = None

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("the product must be non-negative")
        if self.x_bits < 1 or self.y_bits < 1:
            raise ValueError("operand widths must be at least 1")
        if self.n >= 2 ** (self.x_bits + self.y_bits):
            raise ValueError(f"N={self.n} does not fit in {self.x_bits + self.y_bits} product bits")
        if self.alpha < 0:
            raise ValueError("alpha must be non-negative")


@dataclass(frozen=True)
class FactorResult:
    pairs: frozenset[tuple[int, int]]
    frequencies: dict[tuple[int, int], float]
    success: float
    histogram: Histogram


def _factor_success(arr: ComposedProblem, hist: Histogram, n: int) -> float:
    if hist.total == 0:
        return 0.0
    good = 0
    for k, v in hist.counts.items():
        d = decode(arr, k)
        if d.x * d.y == n:
            good += v
    return good / hist.total


def factor(query: FactorQuery, arr: ComposedProblem | None = None) -> FactorResult:
    """Clamp the product bits to ``query.n`` and collect consistent operand pairs.

    ``success`` is the histogram mass on states whose operand bits multiply
    to ``n``; ``pairs`` are the operand pairs read from consistent states
    with the right product, and ``frequencies`` their share of all samples.
    """
    arr = arr or build_array(query.x_bits, query.y_bits)
    targets = _bit_targets(arr.product_qubits, query.n)
    clamped = clamp(arr.problem, targets, query.alpha)
    hist = _sample(clamped, query.engine, query.iterations, query.schedule, query.thermal,
                   query.threads)
    freq: dict[tuple[int, int], float] = {}
    for k, v in hist.counts.items():
        d = decode(arr, k)
        if d.consistent and d.product == query.n:
            freq[(d.x, d.y)] = freq.get((d.x, d.y), 0.0) + v / hist.total
    return FactorResult(frozenset(freq), dict(sorted(freq.items())),
                        _factor_success(arr, hist, query.n), hist)


def alpha_sweep_factor(query: FactorQuery, grid: Sequence[float],
                       arr: ComposedProblem | None = None) -> list[SweepRow]:
    """Factorisation success probability for each clamp strength in ``grid``."""
    grid = [float(a) for a in grid]
    if not grid:
        raise ValueError("alpha grid must be non-empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("alpha grid must be ascending")
    arr = arr or build_array(query.x_bits, query.y_bits)
    rows = []
    for alpha in grid:
        q = FactorQuery(query.n, query.x_bits, query.y_bits, alpha, query.engine,
                        query.iterations, query.thermal, query.schedule, query.threads)
        rows.append(SweepRow(alpha, factor(q, arr).success, query.iterations))
    return rows


def trial_division_pairs(n: int, x_bits: int, y_bits: int) -> frozenset[tuple[int, int]]:
    """All ``(x, y)`` within the widths with ``x * y == n``, by brute force."""
    return frozenset((x, y) for x in range(2 ** x_bits) for y in range(2 ** y_bits) if x * y == n)
