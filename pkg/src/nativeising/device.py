"""Mapping between flux-qubit device quantities (SI units) and dimensionless h, J.

Coupling energy is ``M * I_p**2`` and bias energy ``M_bias * I_h * I_p``;
both are divided by a user-chosen energy scale ``E0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

PHI0 = 2.07e-15  # Wb, flux quantum as used for the device design
BETA_L_LIMIT = 8.0

# Design values of the demonstrated circuits.
GATE_QUBIT_L = 110e-12
GATE_COUPLING_M = {(0, 1): 10e-12, (0, 2): 22e-12, (1, 2): 22e-12}
BIAS_MUTUAL = 31e-12
JUNCTION_IC = 6.25e-6
NOR_BIAS_CURRENTS = (-1.99e-6, -1.42e-6, -4.50e-6)
CELL_QUBIT_L = (278e-12, 278e-12, 284e-12, 287e-12, 277e-12, 300e-12)
CELL_MUTUAL_PH = {
    (0, 1): -5.6, (0, 2): -9.7, (0, 3): 10.0, (0, 4): 20.7, (0, 5): 10.1,
    (1, 2): -9.9, (1, 3): -11.0, (1, 4): 20.7, (1, 5): 11.5,
    (2, 3): -20.3, (2, 4): 44.5, (2, 5): 20.4,
    (3, 4): 44.0, (3, 5): 23.0,
    (4, 5): -43.4,
}
CELL_REPORTED_BETA_L = 10.8
THERMAL_ENERGY_4K2 = 5.8e-23  # J
THERMAL_ENERGY_10MK = 1.38e-25  # J
RF_SQUID_WELL_ENERGY = 4.9e-22  # J


def _positive(name: str, value: float) -> None:
    if not value > 0:
        raise ValueError(f"{name} must be positive, got {value}")


@dataclass(frozen=True)
class BetaL:
    value: float
    passes: bool
    limit: float = BETA_L_LIMIT


def beta_L(L: float, I_c: float, phi0: float = PHI0) -> BetaL:
    """rf-SQUID screening parameter ``2 pi L I_c / Phi0`` and its pass flag (< 8)."""
    _positive("L", L)
    _positive("I_c", I_c)
    value = 2.0 * math.pi * L * I_c / phi0
    return BetaL(value, value < BETA_L_LIMIT)


def j_from_mutual(M: float, I_p: float, E0: float) -> float:
    _positive("E0", E0)
    return M * I_p ** 2 / E0


def mutual_from_j(J: float, I_p: float, E0: float) -> float:
    _positive("E0", E0)
    _positive("I_p", abs(I_p))
    return J * E0 / I_p ** 2


@dataclass(frozen=True)
class BiasField:
    h: float
    flux: float  # Wb
    flux_quanta: float


def h_from_bias(I_h: float, M_bias: float, I_p: float, E0: float, sign_h: int = -1,
                phi0: float = PHI0) -> BiasField:
    """Dimensionless field from a self-bias current.

    ``sign_h = -1`` (default) makes "raise the bias current" pin the qubit to
    bit 1, matching :func:`nativeising.ising.clamp` which lowers h for bit 1.
    """
    _positive("E0", E0)
    if sign_h not in (-1, 1):
        raise ValueError("sign_h must be +1 or -1")
    flux = M_bias * I_h
    return BiasField(sign_h * flux * I_p / E0, flux, flux / phi0)


def bias_flux(I_h: float, M_bias: float, phi0: float = PHI0) -> float:
    """Applied flux ``M_bias * I_h`` in units of the flux quantum."""
    return M_bias * I_h / phi0


def temperature_ratio(thermal_energy: float, energy_scale: float) -> float:
    """Dimensionless temperature: thermal energy (J) over an energy scale (J)."""
    _positive("energy scale", energy_scale)
    if thermal_energy < 0:
        raise ValueError("thermal energy must be non-negative")
    return thermal_energy / energy_scale


@dataclass(frozen=True)
class DeviceParams:
    """Physical parameters of one circuit, SI units.

    ``I_p`` (persistent current) has no default; without it only the
    geometry-derived quantities (beta_L, applied flux) can be reported.
    ``E0`` defaults to ``max|M| * I_p**2`` so the largest |J| is 1.
    """

    L: tuple[float, ...]
    I_c: float
    M: Mapping[tuple[int, int], float] = field(default_factory=dict)
    M_bias: float = BIAS_MUTUAL
    I_h: tuple[float, ...] = ()
    I_p: float | None = None
    E0: float | None = None
    sign_h: int = -1

    def __post_init__(self):
        object.__setattr__(self, "L", tuple(float(x) for x in self.L))
        object.__setattr__(self, "I_h", tuple(float(x) for x in self.I_h))
        for x in self.L:
            _positive("L", x)
        _positive("I_c", self.I_c)
        if self.E0 is not None:
            _positive("E0", self.E0)
        if self.sign_h not in (-1, 1):
            raise ValueError("sign_h must be +1 or -1")
        if self.I_h and len(self.I_h) != len(self.L):
            raise ValueError("need one bias current per qubit")
        M = {}
        for (i, j), v in dict(self.M).items():
            i, j = int(i), int(j)
            if i == j or not (0 <= i < len(self.L) and 0 <= j < len(self.L)):
                raise ValueError(f"invalid mutual-inductance pair ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in M:
                raise ValueError(f"duplicate mutual inductance for pair {key}")
            M[key] = float(v)
        object.__setattr__(self, "M", dict(sorted(M.items())))

    @property
    def n(self) -> int:
        return len(self.L)

    def energy_scale(self) -> float | None:
        if self.E0 is not None:
            return self.E0
        if self.I_p is None or not self.M:
            return None
        return max(abs(v) for v in self.M.values()) * self.I_p ** 2

    @classmethod
    def from_dict(cls, data: Mapping) -> "DeviceParams":
        L = data["L"]
        if isinstance(L, (int, float)):
            L = [L] * int(data.get("n", 1))
        M = {(int(t["i"]), int(t["j"])): float(t["v"]) for t in data.get("M", [])}
        if len(M) != len(data.get("M", [])):
            raise ValueError("duplicate mutual-inductance pairs")
        return cls(L=tuple(L), I_c=float(data["I_c"]), M=M,
                   M_bias=float(data.get("M_bias", BIAS_MUTUAL)),
                   I_h=tuple(data.get("I_h", ())),
                   I_p=None if data.get("I_p") is None else float(data["I_p"]),
                   E0=None if data.get("E0") is None else float(data["E0"]),
                   sign_h=int(data.get("sign_h", -1)))


def device_report(params: DeviceParams, reported_beta_L: float | None = None) -> dict:
    """Derived h, J, flux and beta_L for a device description.

    When ``reported_beta_L`` is given, the report includes the range of
    beta_L computed from the per-qubit L values and whether the reported
    figure falls inside it.
    """
    betas = [beta_L(L, params.I_c) for L in params.L]
    out: dict = {
        "beta_L": [{"qubit": i, "value": b.value, "passes": b.passes} for i, b in enumerate(betas)],
        "beta_L_limit": BETA_L_LIMIT,
    }
    if params.I_h:
        out["flux_quanta"] = [bias_flux(I, params.M_bias) for I in params.I_h]
    E0 = params.energy_scale()
    if params.I_p is not None and E0 is not None:
        out["E0"] = E0
        out["J"] = [{"i": i, "j": j, "v": j_from_mutual(v, params.I_p, E0)}
                    for (i, j), v in params.M.items()]
        if params.I_h:
            out["h"] = [h_from_bias(I, params.M_bias, params.I_p, E0, params.sign_h).h
                        for I in params.I_h]
    else:
        out["note"] = "I_p not given: h and J are not derived"
    if reported_beta_L is not None:
        lo, hi = min(b.value for b in betas), max(b.value for b in betas)
        out["reported_beta_L"] = {
            "value": reported_beta_L,
            "computed_range": [lo, hi],
            "reproduced": lo - 1e-3 <= reported_beta_L <= hi + 1e-3,
        }
    return out


def gate_device(I_p: float | None = None) -> DeviceParams:
    """Design parameters of the three-qubit NOR/NAND circuit."""
    return DeviceParams(L=(GATE_QUBIT_L,) * 3, I_c=JUNCTION_IC, M=GATE_COUPLING_M,
                        M_bias=BIAS_MUTUAL, I_h=NOR_BIAS_CURRENTS, I_p=I_p)


def cell_device(I_p: float | None = None) -> DeviceParams:
    """Design parameters of the six-qubit multiplier cell circuit."""
    return DeviceParams(L=CELL_QUBIT_L, I_c=JUNCTION_IC,
                        M={k: v * 1e-12 for k, v in CELL_MUTUAL_PH.items()},
                        M_bias=BIAS_MUTUAL, I_p=I_p)


def couplings_from_mutuals(mutuals: Mapping[tuple[int, int], float],
                           normalise_to: float | None = None) -> dict[tuple[int, int], float]:
    """Couplings proportional to mutual inductances, largest |J| equal 1 by default."""
    scale = normalise_to or max(abs(v) for v in mutuals.values())
    return {k: v / scale for k, v in mutuals.items()}


def thermal_temperatures(energy_scale: float = RF_SQUID_WELL_ENERGY) -> dict[str, float]:
    """Dimensionless temperatures for the 4.2 K and 10 mK thermal energies."""
    return {"4.2K": temperature_ratio(THERMAL_ENERGY_4K2, energy_scale),
            "10mK": temperature_ratio(THERMAL_ENERGY_10MK, energy_scale)}

