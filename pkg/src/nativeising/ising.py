"""Dimensionless Ising problems, exhaustive spectra and spin-fixing transforms.

Conventions used throughout the package:

* bit ``b`` maps to spin ``s = 2*b - 1``; qubit state "1" is ``s = +1``;
* a bitstring lists qubits in index order, qubit 0 first;
* basis index ``k`` of a bitstring is its value read as a binary number with
  qubit 0 as the most significant bit;
* ``E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DegenerateSpectrumError, DimensionError

DEFAULT_GROUP_TOL = 1e-9
DEFAULT_ENUMERATION_CAP = 24
_CHUNK = 1 << 20


def bits_to_spins(bits: str | Sequence[int]) -> tuple[int, ...]:
    """Map a bitstring (or sequence of 0/1) to a tuple of +-1 spins."""
    return tuple(2 * int(b) - 1 for b in bits)


def spins_to_bits(spins: Sequence[int]) -> str:
    out = []
    for s in spins:
        if s not in (-1, 1):
            raise ValueError(f"spin values must be -1 or +1, got {s!r}")
        out.append("1" if s == 1 else "0")
    return "".join(out)


def index_to_bits(index: int, n: int) -> str:
    return format(index, f"0{n}b") if n else ""


def bits_to_index(bits: str) -> int:
    return int(bits, 2) if bits else 0


def spin_matrix(indices: np.ndarray, n: int) -> np.ndarray:
    """Spins (rows of +-1, int8) for a batch of basis indices."""
    indices = np.asarray(indices, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    bits = (indices[:, None] >> shifts[None, :]) & 1
    return (2 * bits - 1).astype(np.int8)


def _normalize_pair(i: int, j: int) -> tuple[int, int]:
    if i == j:
        raise ValueError(f"self-coupling on qubit {i} is not allowed")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class IsingProblem:
    """An Ising problem ``offset + sum h_i s_i + sum_{i<j} J_ij s_i s_j``.

    Parameters
    ----------
    h : sequence of float
        Dimensionless self-bias per qubit; its length fixes ``n``.
    J : mapping of (i, j) -> float
        Couplings on unordered pairs. Keys are normalised to ``i < j``;
        supplying both ``(i, j)`` and ``(j, i)`` is an error. Zero entries
        are dropped.
    offset : float
        Constant energy term.
    labels : sequence of str, optional
        Qubit names, unique.
    """

    h: tuple[float, ...]
    J: Mapping[tuple[int, int], float] = field(default_factory=dict)
    offset: float = 0.0
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        h = tuple(float(v) for v in self.h)
        n = len(h)
        couplings: dict[tuple[int, int], float] = {}
        for (i, j), v in dict(self.J).items():
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise DimensionError(f"coupling ({i}, {j}) out of range for {n} qubits")
            key = _normalize_pair(i, j)
            if key in couplings:
                raise ValueError(f"duplicate coupling for pair {key}")
            v = float(v)
            if v != 0.0:
                couplings[key] = v
        labels = None
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != n:
                raise DimensionError(f"expected {n} labels, got {len(labels)}")
            if len(set(labels)) != n:
                raise ValueError("qubit labels must be unique")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "J", dict(sorted(couplings.items())))
        object.__setattr__(self, "offset", float(self.offset))
        object.__setattr__(self, "labels", labels)
        if not all(np.isfinite(h)) or not all(np.isfinite(list(couplings.values()) or [0.0])):
            raise ValueError("coefficients must be finite")

    @property
    def n(self) -> int:
        return len(self.h)

    def coupling(self, i: int, j: int) -> float:
        return self.J.get(_normalize_pair(i, j), 0.0)

    def qubit(self, key: int | str) -> int:
        """Resolve a qubit index or label to an index."""
        if isinstance(key, str) and not key.lstrip("-").isdigit():
            if self.labels is None or key not in self.labels:
                raise KeyError(f"unknown qubit label {key!r}")
            return self.labels.index(key)
        idx = int(key)
        if not 0 <= idx < self.n:
            raise DimensionError(f"qubit index {idx} out of range for {self.n} qubits")
        return idx

    def coupling_matrix(self) -> np.ndarray:
        """Symmetric dense coupling matrix with zero diagonal."""
        mat = np.zeros((self.n, self.n))
        for (i, j), v in self.J.items():
            mat[i, j] = mat[j, i] = v
        return mat

    def replace(self, **changes) -> "IsingProblem":
        data = dict(h=self.h, J=self.J, offset=self.offset, labels=self.labels)
        data.update(changes)
        return IsingProblem(**data)

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        out: dict = {"n": self.n}
        if self.labels is not None:
            out["labels"] = list(self.labels)
        out["h"] = list(self.h)
        out["j"] = [{"i": i, "j": j, "v": v} for (i, j), v in self.J.items()]
        out["offset"] = self.offset
        return out

    @classmethod
    def from_dict(cls, data: Mapping) -> "IsingProblem":
        h = list(data["h"])
        if "n" in data and int(data["n"]) != len(h):
            raise DimensionError(f"n={data['n']} does not match {len(h)} h values")
        couplings: dict[tuple[int, int], float] = {}
        for term in data.get("j", []):
            key = _normalize_pair(int(term["i"]), int(term["j"]))
            if key in couplings:
                raise ValueError(f"duplicate coupling for pair {key}")
            couplings[key] = float(term["v"])
        return cls(h=h, J=couplings, offset=data.get("offset", 0.0), labels=data.get("labels"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "IsingProblem":
        return cls.from_dict(json.loads(text))


def _as_spins(problem: IsingProblem, state) -> np.ndarray:
    if isinstance(state, str):
        spins = np.array(bits_to_spins(state), dtype=np.int64)
    else:
        spins = np.asarray(state, dtype=np.int64).ravel()
        if not np.all(np.abs(spins) == 1):
            raise ValueError("spin values must be -1 or +1")
    if spins.size != problem.n:
        raise DimensionError(f"state has {spins.size} spins, problem has {problem.n} qubits")
    return spins


def energy(problem: IsingProblem, state) -> float:
    """Classical energy of one state.

    ``state`` is a sequence of +-1 spins or a bitstring.
    """
    s = _as_spins(problem, state)
    total = problem.offset + float(np.dot(problem.h, s)) if problem.n else problem.offset
    for (i, j), v in problem.J.items():
        total += v * s[i] * s[j]
    return float(total)


def all_energies(problem: IsingProblem, cap: int = DEFAULT_ENUMERATION_CAP) -> np.ndarray:
    """Energies of all ``2**n`` basis states in basis-index order."""
    n = problem.n
    if n > cap:
        raise CapacityError(f"{n} qubits exceeds the enumeration cap of {cap}")
    size = 1 << n
    out = np.empty(size, dtype=np.float64)
    h = np.asarray(problem.h)
    pairs = list(problem.J.items())
    for start in range(0, size, _CHUNK):
        idx = np.arange(start, min(size, start + _CHUNK), dtype=np.int64)
        s = spin_matrix(idx, n).astype(np.float64)
        e = np.full(idx.size, problem.offset)
        if n:
            e += s @ h
        for (i, j), v in pairs:
            e += v * s[:, i] * s[:, j]
        out[start:start + idx.size] = e
    return out


@dataclass(frozen=True)
class Level:
    energy: float
    indices: np.ndarray
    n: int

    @property
    def degeneracy(self) -> int:
        return int(self.indices.size)

    @cached_property
    def states(self) -> frozenset[str]:
        return frozenset(index_to_bits(int(k), self.n) for k in self.indices)


@dataclass(frozen=True)
class Spectrum:
    """Energy levels in ascending order; ``levels[0]`` is the ground level."""

    levels: tuple[Level, ...]
    n: int
    group_tol: float

    @property
    def ground(self) -> Level:
        return self.levels[0]

    @property
    def energies(self) -> list[float]:
        return [lv.energy for lv in self.levels]


def enumerate_spectrum(problem: IsingProblem, group_tol: float = DEFAULT_GROUP_TOL,
                       cap: int = DEFAULT_ENUMERATION_CAP) -> Spectrum:
    """Exhaustively enumerate all states and group them into energy levels.

    Consecutive sorted energies closer than ``group_tol`` share a level; a
    level's energy is the lowest member energy.
    """
    energies = all_energies(problem, cap)
    order = np.argsort(energies, kind="stable")
    sorted_e = energies[order]
    breaks = np.flatnonzero(np.diff(sorted_e) > group_tol) + 1
    bounds = np.concatenate([[0], breaks, [sorted_e.size]])
    levels = tuple(
        Level(float(sorted_e[a]), np.sort(order[a:b]), problem.n)
        for a, b in zip(bounds[:-1], bounds[1:])
    )
    return Spectrum(levels, problem.n, group_tol)


def ground_set(problem: IsingProblem, group_tol: float = DEFAULT_GROUP_TOL,
               cap: int = DEFAULT_ENUMERATION_CAP) -> frozenset[str]:
    """Bitstrings of all minimum-energy states."""
    return enumerate_spectrum(problem, group_tol, cap).ground.states


def classical_gap(problem: IsingProblem, group_tol: float = DEFAULT_GROUP_TOL,
                  cap: int = DEFAULT_ENUMERATION_CAP) -> float:
    """Energy difference between the first excited and the ground level."""
    spec = enumerate_spectrum(problem, group_tol, cap)
    if len(spec.levels) < 2:
        raise DegenerateSpectrumError("degenerate spectrum: all states share one energy level")
    return spec.levels[1].energy - spec.levels[0].energy


def _resolve_assignment(problem: IsingProblem, assignment: Mapping) -> dict[int, int]:
    resolved: dict[int, int] = {}
    for key, bit in assignment.items():
        idx = problem.qubit(key)
        if idx in resolved:
            raise ValueError(f"qubit {idx} assigned more than once")
        bit = int(bit)
        if bit not in (0, 1):
            raise ValueError(f"bit values must be 0 or 1, got {bit}")
        resolved[idx] = bit
    return resolved


def fix_spins(problem: IsingProblem, assignment: Mapping[int | str, int]) -> IsingProblem:
    """Exactly eliminate assigned qubits.

    Returns a problem on the unassigned qubits (original order preserved)
    whose energy equals the original energy of the merged state for every
    completion.
    """
    fixed = _resolve_assignment(problem, assignment)
    free = [i for i in range(problem.n) if i not in fixed]
    new_index = {old: k for k, old in enumerate(free)}
    spin = {i: 2 * b - 1 for i, b in fixed.items()}

    offset = problem.offset + sum(problem.h[i] * s for i, s in spin.items())
    h = [problem.h[i] for i in free]
    J: dict[tuple[int, int], float] = {}
    for (i, j), v in problem.J.items():
        if i in spin and j in spin:
            offset += v * spin[i] * spin[j]
        elif i in spin:
            h[new_index[j]] += v * spin[i]
        elif j in spin:
            h[new_index[i]] += v * spin[j]
        else:
            J[(new_index[i], new_index[j])] = v
    labels = None if problem.labels is None else [problem.labels[i] for i in free]
    return IsingProblem(h=h, J=J, offset=offset, labels=labels)


def clamp(problem: IsingProblem, targets: Mapping[int | str, int], alpha: float) -> IsingProblem:
    """Bias targeted qubits toward desired bits by an offset ``alpha``.

    Each targeted qubit gets ``h_i - (2b - 1) * alpha``; couplings and the
    offset are untouched.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    resolved = _resolve_assignment(problem, targets)
    h = list(problem.h)
    for i, b in resolved.items():
        h[i] -= (2 * b - 1) * alpha
    return problem.replace(h=h)


def clamp_threshold(problem: IsingProblem, qubit: int | str) -> float:
    """Sufficient clamp strength ``|h_i| + sum_j |J_ij|`` for one qubit.

    Any ``alpha`` strictly above this pins the qubit in every ground state
    of the clamped problem.
    """
    i = problem.qubit(qubit)
    return abs(problem.h[i]) + sum(abs(v) for (a, b), v in problem.J.items() if i in (a, b))


def gauge_flip(problem: IsingProblem, qubits: Iterable[int]) -> IsingProblem:
    """Negate the given spins together with their fields and incident couplings."""
    flip = set(problem.qubit(q) for q in qubits)
    h = [-v if i in flip else v for i, v in enumerate(problem.h)]
    J = {(i, j): (-v if (i in flip) != (j in flip) else v) for (i, j), v in problem.J.items()}
    return problem.replace(h=h, J=J)


def negate_fields(problem: IsingProblem) -> IsingProblem:
    return problem.replace(h=[-v for v in problem.h])


def complement(bits: str, positions: Iterable[int] | None = None) -> str:
    """Flip all bits, or only the bits at ``positions``."""
    pos = set(range(len(bits))) if positions is None else set(positions)
    return "".join(("1" if c == "0" else "0") if k in pos else c for k, c in enumerate(bits))
