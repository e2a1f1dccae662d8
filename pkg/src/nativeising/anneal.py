"""Annealing engines: exact Schrodinger evolution and Metropolis thermal annealing.

The time-dependent Hamiltonian is

    H(s) = -A(s)/2 * sum_i X_i + B(s)/2 * E_problem(Z)

with ``s = t / T_a``. Measurement is an ideal projective readout in the
computational basis.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import linalg, optimize

from .errors import CapacityError
from .ising import (
    IsingProblem,
    all_energies,
    bits_to_index,
    clamp,
    clamp_threshold,
    index_to_bits,
    spins_to_bits,
)

DEFAULT_SEED = 20240101
MAX_EXACT_QUBITS = 12
_REPLICA_CHUNK = 256


@dataclass(frozen=True)
class Schedule:
    """Annealing envelopes on normalised time ``s`` in [0, 1].

    The default envelopes are linear, ``A(s) = A0 (1 - s)`` and
    ``B(s) = B0 s``; pass ``A_fn``/``B_fn`` for other shapes. The
    integrator takes ``max(steps, ceil(100 * T_a))`` steps.
    """

    T_a: float = 100.0
    A0: float = 2.0
    B0: float = 2.0
    steps: int = 1000
    A_fn: Callable[[float], float] | None = field(default=None, compare=False)
    B_fn: Callable[[float], float] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.T_a) or self.T_a < 0:
            raise ValueError(f"non-normalizable schedule: T_a={self.T_a}")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        grid = np.linspace(0.0, 1.0, 101)
        a = np.array([self.A(s) for s in grid])
        b = np.array([self.B(s) for s in grid])
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise ValueError("non-normalizable schedule: envelopes must be finite")
        if np.any(a < 0) or np.any(b < 0):
            raise ValueError("schedule envelopes must be non-negative")
        if abs(self.A(1.0)) > 1e-12:
            raise ValueError("transverse field must vanish at s=1")

    def A(self, s: float) -> float:
        return float(self.A_fn(s)) if self.A_fn is not None else self.A0 * (1.0 - s)

    def B(self, s: float) -> float:
        return float(self.B_fn(s)) if self.B_fn is not None else self.B0 * s

    @property
    def n_steps(self) -> int:
        return max(self.steps, math.ceil(100 * self.T_a))

    def with_T_a(self, T_a: float) -> "Schedule":
        return Schedule(T_a, self.A0, self.B0, self.steps, self.A_fn, self.B_fn)

    def to_dict(self) -> dict:
        return {"A0": self.A0, "B0": self.B0, "Ta": self.T_a, "steps": self.steps}

    @classmethod
    def from_dict(cls, data: Mapping) -> "Schedule":
        return cls(T_a=float(data.get("Ta", 100.0)), A0=float(data.get("A0", 2.0)),
                   B0=float(data.get("B0", 2.0)), steps=int(data.get("steps", 1000)))


def _check_exact_size(problem: IsingProblem, max_qubits: int) -> None:
    if problem.n > max_qubits:
        raise CapacityError(f"{problem.n} qubits exceeds the exact-simulation limit of {max_qubits}")


def _transverse_sum(n: int) -> np.ndarray:
    dim = 1 << n
    mat = np.zeros((dim, dim))
    idx = np.arange(dim)
    for i in range(n):
        mat[idx, idx ^ (1 << (n - 1 - i))] = 1.0
    return mat


def hamiltonian(problem: IsingProblem, schedule: Schedule, s: float) -> np.ndarray:
    """Dense real-symmetric H(s) in the computational basis."""
    _check_exact_size(problem, MAX_EXACT_QUBITS)
    diag = all_energies(problem)
    return -0.5 * schedule.A(s) * _transverse_sum(problem.n) + np.diag(0.5 * schedule.B(s) * diag)


@dataclass(frozen=True)
class EvolutionResult:
    """Final measurement distribution of an exact anneal."""

    probabilities: np.ndarray
    n: int
    steps: int
    norm_error: float

    def mass(self, states: Iterable[str]) -> float:
        return float(sum(self.probabilities[bits_to_index(b)] for b in set(states)))

    def to_dict(self, cutoff: float = 0.0) -> dict[str, float]:
        return {index_to_bits(k, self.n): float(p)
                for k, p in enumerate(self.probabilities) if p > cutoff}


def _apply_transverse(psi: np.ndarray, n: int, theta: float) -> np.ndarray:
    """Apply prod_i exp(i theta X_i)."""
    c, s = math.cos(theta), 1j * math.sin(theta)
    for i in range(n):
        v = psi.reshape(1 << i, 2, 1 << (n - 1 - i))
        psi = (c * v + s * v[:, ::-1, :]).reshape(-1)
    return psi


def exact_evolve(problem: IsingProblem, schedule: Schedule,
                 max_qubits: int = MAX_EXACT_QUBITS) -> EvolutionResult:
    """Integrate the Schrodinger equation from the uniform superposition.

    Uses a fixed-step Strang splitting (diagonal half-step, transverse
    step, diagonal half-step) evaluated at each step's midpoint, which is
    second order and exactly unitary.
    """
    _check_exact_size(problem, max_qubits)
    n = problem.n
    dim = 1 << n
    diag = all_energies(problem)
    psi = np.full(dim, 2.0 ** (-n / 2), dtype=np.complex128)
    steps = schedule.n_steps
    worst = abs(float(np.vdot(psi, psi).real) - 1.0)
    if schedule.T_a > 0:
        dt = schedule.T_a / steps
        for k in range(steps):
            s = (k + 0.5) / steps
            half = np.exp(-0.25j * dt * schedule.B(s) * diag)
            psi = half * psi
            psi = _apply_transverse(psi, n, 0.5 * schedule.A(s) * dt)
            psi = half * psi
            dev = abs(float(np.vdot(psi, psi).real) - 1.0)
            if dev > worst:
                worst = dev
        if worst > 1e-9:
            raise RuntimeError(f"norm drifted by {worst:.3e} during evolution")
    probs = np.abs(psi) ** 2
    return EvolutionResult(probs, n, steps if schedule.T_a > 0 else 0, worst)


@dataclass(frozen=True)
class GapResult:
    s: float
    gap: float
    cluster_size: int


def min_gap(problem: IsingProblem, schedule: Schedule, resolution: int = 1001,
            cluster_tol: float | None = None, refine: bool = True,
            max_qubits: int = MAX_EXACT_QUBITS) -> GapResult:
    """Minimum spectral gap of H(s) over a uniform grid of ``resolution`` points.

    When the final classical ground level is g-fold degenerate the gap is
    measured from the lowest level to level g, i.e. to the first level above
    the ground cluster. The grid minimum is polished with a bounded scalar
    search over the neighbouring grid cells when ``refine`` is set.
    """
    _check_exact_size(problem, max_qubits)
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    n = problem.n
    dim = 1 << n
    diag = all_energies(problem)
    xsum = _transverse_sum(n)
    tol = 1e-6 * schedule.B0 if cluster_tol is None else cluster_tol
    final = 0.5 * schedule.B(1.0) * diag
    g = int(np.sum(final <= final.min() + tol))
    upper = g if g < dim else 1

    def gap_at(s: float) -> float:
        H = -0.5 * schedule.A(s) * xsum + np.diag(0.5 * schedule.B(s) * diag)
        vals = linalg.eigh(H, eigvals_only=True, subset_by_index=[0, upper])
        return float(vals[upper] - vals[0])

    grid = np.linspace(0.0, 1.0, resolution)
    gaps = np.array([gap_at(s) for s in grid])
    k = int(np.argmin(gaps))
    best_s, best_gap = float(grid[k]), float(gaps[k])
    if refine:
        lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, resolution - 1)]
        res = optimize.minimize_scalar(gap_at, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        if res.fun < best_gap:
            best_s, best_gap = float(res.x), float(res.fun)
    return GapResult(best_s, best_gap, g)


# -- thermal engine --------------------------------------------------------


@dataclass(frozen=True)
class ThermalConfig:
    """Metropolis annealing settings, temperatures in problem energy units.

    ``schedule="fixed"`` holds ``temperature`` for every sweep;
    ``"geometric"`` cools from ``initial_temperature`` (default: the largest
    single-flip energy change the problem allows) down to ``temperature``.
    """

    temperature: float = 0.01
    sweeps: int = 1000
    schedule: str = "geometric"
    initial_temperature: float | None = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if not self.temperature >= 0:
            raise ValueError("temperature must be >= 0")
        if self.sweeps < 1:
            raise ValueError("sweeps must be >= 1")
        if self.schedule not in ("fixed", "geometric"):
            raise ValueError(f"unknown temperature schedule {self.schedule!r}")
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ValueError("initial temperature must be positive")

    def replace(self, **changes) -> "ThermalConfig":
        data = dict(temperature=self.temperature, sweeps=self.sweeps, schedule=self.schedule,
                    initial_temperature=self.initial_temperature, seed=self.seed)
        data.update(changes)
        return ThermalConfig(**data)

    def temperatures(self, problem: IsingProblem) -> np.ndarray:
        if self.schedule == "fixed":
            return np.full(self.sweeps, float(self.temperature))
        t0 = self.initial_temperature
        if t0 is None:
            t0 = 2.0 * max((clamp_threshold(problem, i) for i in range(problem.n)), default=1.0)
            t0 = t0 or 1.0
        if self.temperature > 0:
            return np.geomspace(t0, max(self.temperature, 1e-300), self.sweeps)
        ladder = np.geomspace(t0, t0 * 1e-4, max(self.sweeps - 1, 1))[: self.sweeps - 1]
        return np.concatenate([ladder, [0.0]])


def _thermal_batch(problem: IsingProblem, cfg: ThermalConfig, seeds: Sequence[int],
                   threads: int | None = None) -> np.ndarray:
    from ._kernels import metropolis_batch

    n = problem.n
    h = np.asarray(problem.h, dtype=np.float64)
    couplings = problem.coupling_matrix()
    temps = cfg.temperatures(problem)
    seeds = list(seeds)
    out = np.empty((len(seeds), n), dtype=np.int8)

    def run_chunk(start: int) -> None:
        chunk = seeds[start:start + _REPLICA_CHUNK]
        spins = np.empty((len(chunk), n), dtype=np.int8)
        uniforms = np.empty((len(chunk), temps.size, n))
        for r, seed in enumerate(chunk):
            rng = np.random.default_rng(seed)
            spins[r] = 2 * rng.integers(0, 2, size=n) - 1
            uniforms[r] = rng.random((temps.size, n))
        metropolis_batch(h, couplings, temps, spins, uniforms)
        out[start:start + len(chunk)] = spins

    starts = range(0, len(seeds), _REPLICA_CHUNK)
    if threads is not None and threads > 1 and len(seeds) > _REPLICA_CHUNK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run_chunk, starts))
    else:
        for start in starts:
            run_chunk(start)
    return out


def thermal_anneal(problem: IsingProblem, cfg: ThermalConfig | None = None) -> tuple[int, ...]:
    """One Metropolis anneal from a uniformly random state; returns the final spins."""
    cfg = cfg or ThermalConfig()
    spins = _thermal_batch(problem, cfg, [cfg.seed])[0]
    return tuple(int(s) for s in spins)


# -- histograms ------------------------------------------------------------


@dataclass(frozen=True)
class Histogram:
    """Counts of measured bitstrings over repeated anneals."""

    counts: dict[str, int]
    total: int
    n: int
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if sum(self.counts.values()) != self.total:
            raise ValueError("histogram counts do not sum to the total")
        if any(len(k) != self.n for k in self.counts):
            raise ValueError("histogram keys must all have length n")
        object.__setattr__(self, "counts", dict(sorted(self.counts.items())))

    def mass(self, states: Iterable[str]) -> float:
        if self.total == 0:
            return 0.0
        return sum(self.counts.get(s, 0) for s in set(states)) / self.total

    def mode(self) -> list[str]:
        """Most frequent bitstrings; more than one entry means a tie."""
        if not self.counts:
            return []
        top = max(self.counts.values())
        return [k for k, v in self.counts.items() if v == top]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("bitstring,count\n")
        for k, v in self.counts.items():
            buf.write(f"{k},{v}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Histogram":
        lines = [ln for ln in text.strip().splitlines() if ln]
        if lines and lines[0].startswith("bitstring"):
            lines = lines[1:]
        counts = {}
        for ln in lines:
            key, value = ln.split(",")
            counts[key] = int(value)
        n = len(next(iter(counts))) if counts else 0
        return cls(counts, sum(counts.values()), n)


def success_probability(hist: Histogram, target: Iterable[str]) -> float:
    """Fraction of the histogram's mass on ``target`` bitstrings."""
    return hist.mass(target)


def histogram_from_distribution(probs: np.ndarray, n: int, iterations: int,
                                metadata: dict | None = None) -> Histogram:
    """Expected counts, rounded, with the rounding residual given to the mode."""
    counts = np.rint(probs * iterations).astype(np.int64)
    counts[int(np.argmax(probs))] += iterations - int(counts.sum())
    table = {index_to_bits(k, n): int(c) for k, c in enumerate(counts) if c > 0}
    return Histogram(table, iterations, n, metadata or {})


def run_histogram(problem: IsingProblem, engine: str, iterations: int,
                  schedule: Schedule | None = None, thermal: ThermalConfig | None = None,
                  threads: int | None = None) -> Histogram:
    """Histogram of ``iterations`` anneals with the ``"exact"`` or ``"thermal"`` engine.

    Thermal iteration ``k`` uses seed ``thermal.seed + k``, so results do not
    depend on ``threads``.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    if engine == "exact":
        schedule = schedule or Schedule()
        res = exact_evolve(problem, schedule)
        meta = {"engine": "exact", **schedule.to_dict()}
        return histogram_from_distribution(res.probabilities, problem.n, iterations, meta)
    if engine == "thermal":
        thermal = thermal or ThermalConfig()
        seeds = [thermal.seed + k for k in range(iterations)]
        spins = _thermal_batch(problem, thermal, seeds, threads)
        counts: dict[str, int] = {}
        for row in spins:
            key = spins_to_bits(row.tolist())
            counts[key] = counts.get(key, 0) + 1
        meta = {"engine": "thermal", "seed": thermal.seed, "temperature": thermal.temperature,
                "sweeps": thermal.sweeps, "schedule": thermal.schedule}
        return Histogram(counts, iterations, problem.n, meta)
    raise ValueError(f"unknown engine {engine!r}")


# -- sweeps ----------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    value: float
    success_probability: float
    iterations: int


def sweep(problem: IsingProblem, variable: str, grid: Sequence[float], engine: str,
          targets: Iterable[str], iterations: int = 1000,
          clamp_targets: Mapping[int | str, int] | None = None,
          schedule: Schedule | None = None, thermal: ThermalConfig | None = None,
          threads: int | None = None) -> list[SweepRow]:
    """Success probability on ``targets`` as one parameter varies.

    ``variable`` is ``"alpha"`` (clamp strength on ``clamp_targets``),
    ``"T_a"`` (anneal time, exact engine) or ``"temperature"`` (final
    thermal temperature).
    """
    grid = [float(v) for v in grid]
    if not grid:
        raise ValueError("sweep grid must be non-empty")
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("sweep grid must be ascending")
    targets = frozenset(targets)
    schedule = schedule or Schedule()
    thermal = thermal or ThermalConfig()
    if variable == "alpha" and not clamp_targets:
        raise ValueError("an alpha sweep needs clamp targets")
    rows = []
    for value in grid:
        prob, sched, therm = problem, schedule, thermal
        if variable == "alpha":
            prob = clamp(problem, clamp_targets, value)
        elif variable == "T_a":
            sched = schedule.with_T_a(value)
        elif variable == "temperature":
            therm = thermal.replace(temperature=value)
        else:
            raise ValueError(f"unknown sweep variable {variable!r}")
        hist = run_histogram(prob, engine, iterations, sched, therm, threads)
        rows.append(SweepRow(value, success_probability(hist, targets), iterations))
    return rows


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    buf.write("value,success_probability,iterations\n")
    for r in rows:
        buf.write(f"{r.value!r},{r.success_probability!r},{r.iterations}\n")
    return buf.getvalue()
