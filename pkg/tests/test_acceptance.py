"""Acceptance gate: one test, and one printed PASS/FAIL line, per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the summary lines.
"""

import itertools
import math
import os
import time

import numpy as np
import pytest

from nativeising.anneal import Schedule, ThermalConfig, exact_evolve, min_gap, run_histogram
from nativeising.cli import main
from nativeising.composer import (
    FactorQuery,
    alpha_sweep_factor,
    build_array,
    decode,
    factor,
    pinning_alpha,
    trial_division_pairs,
)
from nativeising.device import (
    BIAS_MUTUAL,
    CELL_REPORTED_BETA_L,
    GATE_QUBIT_L,
    JUNCTION_IC,
    beta_L,
    bias_flux,
    cell_device,
    device_report,
    thermal_temperatures,
)
from nativeising.errors import InfeasibleEncodingError
from nativeising.ising import (
    IsingProblem,
    clamp,
    complement,
    enumerate_spectrum,
    gauge_flip,
    ground_set,
    negate_fields,
)
from nativeising.logic import (
    SynthesisConfig,
    GateKind,
    TruthTable,
    gate,
    multiplier_table,
    synthesize,
    truth_table,
    verify,
)

GATES = [GateKind.NOR, GateKind.NAND, GateKind.OR, GateKind.AND]
XOR = TruthTable(("A", "B", "R"), frozenset({"000", "011", "101", "110"}))


def report(number, ok, detail):
    print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:2d}: {detail}")
    assert ok, detail


def test_criterion_01_gate_ground_sets():
    t0 = time.perf_counter()
    bad = []
    for kind in GATES:
        spec = enumerate_spectrum(gate(kind))
        if spec.ground.states != truth_table(kind).rows or spec.ground.degeneracy != 4:
            bad.append(kind.value)
    dt = time.perf_counter() - t0
    report(1, not bad and dt < 1.0, f"gate ground sets, mismatches={bad}, {dt:.3f}s")


def test_criterion_02_sign_flip_family():
    checks = {}
    for a, b in [(GateKind.NOR, GateKind.NAND), (GateKind.OR, GateKind.AND)]:
        flipped = {complement(s) for s in ground_set(gate(a))}
        checks[f"{a.value}->{b.value}"] = (ground_set(negate_fields(gate(a))) == flipped
                                           == ground_set(gate(b)))
        back = {complement(s) for s in ground_set(gate(b))}
        checks[f"{b.value}->{a.value}"] = ground_set(negate_fields(gate(b))) == back
    checks["nor~or"] = gauge_flip(gate("nor"), [2]) == gate("or")
    checks["or~nor"] = gauge_flip(gate("or"), [2]) == gate("nor")
    report(2, all(checks.values()), f"sign-flip family {checks}")


def test_criterion_03_multiplier_cell():
    cfg = SynthesisConfig(bound=4, min_gap=1)
    t0 = time.perf_counter()
    problem = synthesize(multiplier_table(), cfg)
    rep = verify(problem, multiplier_table())
    dt = time.perf_counter() - t0
    ok = rep.passed and rep.degeneracy == 16 and rep.classical_gap >= cfg.min_gap - 1e-12
    report(3, ok and dt < 10.0,
           f"cell verify={rep.passed}, degeneracy={rep.degeneracy}/64, "
           f"gap={rep.classical_gap}, {dt:.2f}s")


def test_criterion_04_xor_infeasible():
    # averaging oracle: every feature averages to zero over both the rows and
    # the non-rows, so mean row energy equals mean non-row energy
    states = ["".join(p) for p in itertools.product("01", repeat=3)]
    spins = {s: np.array([2 * int(c) - 1 for c in s]) for s in states}
    feats = lambda s: np.r_[spins[s], [spins[s][i] * spins[s][j]
                                        for i, j in itertools.combinations(range(3), 2)]]
    rows_mean = np.mean([feats(s) for s in XOR.rows], axis=0)
    rest_mean = np.mean([feats(s) for s in set(states) - XOR.rows], axis=0)
    oracle_infeasible = np.allclose(rows_mean, rest_mean)
    t0 = time.perf_counter()
    diagnosed = []
    for bound in (0.25, 1, 4, 64, 10 ** 9):
        try:
            synthesize(XOR, SynthesisConfig(bound=bound))
            diagnosed.append(False)
        except InfeasibleEncodingError as exc:
            diagnosed.append(bool(exc.certificate))
    dt = time.perf_counter() - t0
    report(4, oracle_infeasible and all(diagnosed) and dt < 1.0,
           f"XOR infeasible at all bounds={all(diagnosed)}, oracle={oracle_infeasible}, {dt:.3f}s")


def test_criterion_05_adiabatic_limit():
    lines, ok = [], True
    t0 = time.perf_counter()
    for kind in GATES:
        problem, rows = gate(kind), truth_table(kind).rows
        mass = [exact_evolve(problem, Schedule(T_a=T)).mass(rows) for T in (1, 10, 100)]
        ok &= mass[-1] >= 0.99 and all(b >= a - 1e-3 for a, b in zip(mass, mass[1:]))
        lines.append(f"{kind.value}={mass[-1]:.5f}")
    gate_time = time.perf_counter() - t0
    t0 = time.perf_counter()
    cell, rows = gate("multiplier"), multiplier_table().rows
    mass = [exact_evolve(cell, Schedule(T_a=T)).mass(rows) for T in (1, 10, 100)]
    cell_time = time.perf_counter() - t0
    ok &= mass[-1] >= 0.99 and all(b >= a - 1e-3 for a, b in zip(mass, mass[1:]))
    lines.append(f"cell={mass[-1]:.5f}")
    report(5, ok and gate_time < 30 and cell_time < 300,
           f"ground mass at T_a=100 {', '.join(lines)}; gates {gate_time:.1f}s, cell {cell_time:.1f}s")


def test_criterion_06_sudden_limit():
    worst = 0.0
    for problem in [gate(k) for k in GATES] + [gate("multiplier")]:
        p = exact_evolve(problem, Schedule(T_a=0)).probabilities
        worst = max(worst, float(np.max(np.abs(p - 1 / p.size))))
    report(6, worst < 1e-6, f"T_a=0 max deviation from uniform {worst:.2e}")


def test_criterion_07_analytic_gap():
    res = min_gap(IsingProblem(h=[1.0]), Schedule())
    err = abs(res.gap - math.sqrt(2))
    report(7, err < 1e-6, f"single-qubit min gap {res.gap:.9f} at s={res.s:.6f}, error {err:.1e}")


def test_criterion_08_thermal_contrast():
    temps = thermal_temperatures()
    nor, rows = gate("nor"), truth_table(GateKind.NOR).rows
    excited = {}
    for name in ("4.2K", "10mK"):
        cfg = ThermalConfig(temperature=temps[name])
        hist = run_histogram(nor, "thermal", 10000, thermal=cfg)
        excited[name] = 1.0 - hist.mass(rows)
    ok = excited["4.2K"] > excited["10mK"] and excited["10mK"] <= 0.01
    report(8, ok, f"NOR excited mass T={temps['4.2K']:.4f}: {excited['4.2K']:.4f}, "
                  f"T={temps['10mK']:.2e}: {excited['10mK']:.4f}")


def test_criterion_09_forward_cell():
    cell = gate("multiplier")
    inputs = [0, 1, 2, 3]
    alpha = pinning_alpha(cell, inputs)
    bad = []
    for row in multiplier_table().rows:
        targets = {q: int(row[q]) for q in inputs}
        if ground_set(clamp(cell, targets, alpha)) != {row}:
            bad.append(row)
    report(9, not bad, f"16 clamped inputs at alpha={alpha}, wrong={bad}")


def test_criterion_10_backward_cell():
    cell = gate("multiplier")
    outputs = [4, 5]
    alpha = pinning_alpha(cell, outputs)
    bad = []
    for c, s in itertools.product((0, 1), repeat=2):
        expect = {f"{x}{y}{z}{d}{c}{s}" for x, y, z, d in itertools.product((0, 1), repeat=4)
                  if x * y + z + d == s + 2 * c}
        got = ground_set(clamp(cell, {4: c, 5: s}, alpha))
        if not expect or got != expect:
            bad.append(f"{c}{s}")
    report(10, not bad, f"4 clamped outputs at alpha={alpha}, wrong={bad}")


def test_criterion_11_array():
    t0 = time.perf_counter()
    arr = build_array(2, 2)
    ground = enumerate_spectrum(arr.problem).ground.states
    decoded = [decode(arr, s) for s in ground]
    triples = {(d.x, d.y, d.product) for d in decoded}
    bijective = (len(ground) == 16 and len(triples) == 16 and all(d.consistent for d in decoded)
                 and triples == {(x, y, x * y) for x in range(4) for y in range(4)})
    f9 = factor(FactorQuery(9, 2, 2, alpha=3.0), arr).pairs
    f6 = factor(FactorQuery(6, 2, 2, alpha=3.0), arr).pairs
    ok = (bijective and f9 == trial_division_pairs(9, 2, 2) == {(3, 3)}
          and f6 == trial_division_pairs(6, 2, 2) == {(2, 3), (3, 2)})
    dt = time.perf_counter() - t0
    report(11, ok and dt < 60, f"2x2 array bijective={bijective}, factor(9)={sorted(f9)}, "
                               f"factor(6)={sorted(f6)}, {dt:.1f}s")


def test_criterion_12_alpha_sweep():
    n = 10000
    grid = [0.0, 0.5, 1.0, 2.0, 3.0]
    q = FactorQuery(6, 2, 2, 0.0, engine="thermal", iterations=n, thermal=ThermalConfig())
    p = [r.success_probability for r in alpha_sweep_factor(q, grid)]
    sigma = [math.sqrt(max(v * (1 - v), 1e-12) / n) for v in p]
    ok = all(p[k + 1] >= p[k] - 2 * math.hypot(sigma[k], sigma[k + 1]) for k in range(len(p) - 1))
    report(12, ok, "success by alpha " + ", ".join(f"{a}:{v:.4f}" for a, v in zip(grid, p)))


def test_criterion_13_device():
    b = beta_L(GATE_QUBIT_L, JUNCTION_IC).value
    flux = bias_flux(-4.50e-6, BIAS_MUTUAL)
    flagged = device_report(cell_device(), CELL_REPORTED_BETA_L)["reported_beta_L"]
    ok = abs(b - 2.087) <= 1e-3 and abs(flux + 0.0674) <= 1e-4 and flagged["reproduced"] is False
    lo, hi = flagged["computed_range"]
    report(13, ok, f"beta_L={b:.4f}, flux={flux:.5f} Phi0, reported 10.8 vs computed "
                   f"{lo:.2f}-{hi:.2f} flagged unreproduced")


def test_criterion_14_determinism(tmp_path):
    threads = [1, os.cpu_count() or 1, 16]
    commands = {
        "anneal": ["anneal", "--unit", "multiplier", "--iters", "3000", "--sweeps", "100"],
        "sweep": ["sweep", "--unit", "nor", "--variable", "temperature", "--grid", "0.1,1",
                  "--targets", "001,010,100,110", "--iters", "1000", "--sweeps", "50"],
        "factor": ["factor", "--n", "6", "--engine", "thermal", "--iters", "2000",
                   "--sweeps", "100"],
        "exact": ["anneal", "--unit", "nor", "--engine", "exact", "--Ta", "5"],
    }
    bad = []
    for name, argv in commands.items():
        outputs = set()
        for k, t in enumerate(threads + [threads[0]]):
            out = tmp_path / f"{name}{k}.out"
            extra = ["--histogram", str(tmp_path / "h.csv")] if name == "factor" else []
            assert main(argv + extra + ["--threads", str(t), "--seed", "5", "--out", str(out)]) == 0
            blob = out.read_bytes()
            if name == "factor":
                blob += (tmp_path / "h.csv").read_bytes()
            outputs.add(blob)
        if len(outputs) != 1:
            bad.append(name)
    report(14, not bad, f"byte-identical repeats over threads {threads}, differing={bad}")
