"""Native Ising encodings of Boolean logic, annealing simulators and factoring."""

from .anneal import (
    Histogram,
    Schedule,
    ThermalConfig,
    exact_evolve,
    min_gap,
    run_histogram,
    success_probability,
    sweep,
    thermal_anneal,
)
from .composer import FactorQuery, alpha_sweep_factor, build_array, factor, multiply_forward
from .device import DeviceParams, beta_L, h_from_bias, j_from_mutual, temperature_ratio
from .errors import (
    CapacityError,
    DegenerateSpectrumError,
    DimensionError,
    InfeasibleEncodingError,
)
from .ising import (
    IsingProblem,
    clamp,
    clamp_threshold,
    classical_gap,
    energy,
    enumerate_spectrum,
    fix_spins,
    ground_set,
)
from .logic import (
    GateKind,
    SynthesisConfig,
    TruthTable,
    gate,
    gauge_match,
    multiplier_table,
    synthesize,
    truth_table,
    verify,
)

__version__ = "0.1.0"
