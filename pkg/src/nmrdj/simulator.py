"""Deutsch-Jozsa runs on pure states and on thermal NMR deviation matrices.

The NMR run follows the experiment: (pi/2)_y on every spin of the thermal
state, one application of the compiled oracle, then per spin the final
pseudo-Hadamard h^-1 and the selective (pi/2)_y read-out pulse, which
cancel. Each spin's multiplet is read from its single-quantum coherences.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np

from .compiler import Y_PHASE, RF, PulseSequence, apply_gate, compile_diagonal, sequence_unitary
from .oracle import (
    BooleanFunction,
    FunctionClass,
    PromiseViolation,
    classify_operator,
    phase_oracle,
    table1_operator,
)
from .qop import UNITARY_TOL, DiagonalSignOperator, bit
from .spins import SpinSystem, topology_of

IDEAL_PHASE_TOL = 1e-6
IMPERFECT_PHASE_TOL = 0.2


class Verdict(enum.Enum):
    CONSTANT = "Constant"
    BALANCED = "Balanced"
    INCONCLUSIVE = "Inconclusive"


class PhaseClass(enum.Enum):
    ABSORPTIVE = "absorptive"
    EMISSIVE = "emissive"
    MIXED = "mixed"


@dataclass(frozen=True)
class ImperfectionModel:
    """Pulse-angle miscalibration: every RF angle is scaled by 1 + eps."""

    eps: float = 0.0

    def __post_init__(self):
        if not abs(self.eps) < 0.5:
            raise ValueError(f"|eps| must be < 0.5, got {self.eps}")

    @property
    def rf_scale(self) -> float:
        return 1.0 + self.eps

    @property
    def ideal(self) -> bool:
        return self.eps == 0


IDEAL = ImperfectionModel()


def classify_phase(amplitude: complex, tol: float) -> PhaseClass:
    arg = math.atan2(amplitude.imag, amplitude.real)
    if abs(arg) < tol:
        return PhaseClass.ABSORPTIVE
    if abs(math.remainder(arg - math.pi, 2 * math.pi)) < tol:
        return PhaseClass.EMISSIVE
    return PhaseClass.MIXED


@dataclass(frozen=True)
class SpectrumLine:
    spin: str
    frequency_hz: float
    amplitude: complex
    phase_class: PhaseClass

    def reclassify(self, tol: float) -> "SpectrumLine":
        return SpectrumLine(self.spin, self.frequency_hz, self.amplitude,
                            classify_phase(self.amplitude, tol))


class CountingOracle:
    """Wraps an oracle action and counts how often it is applied."""

    def __init__(self, action: Callable[[np.ndarray], np.ndarray]):
        self._action = action
        self.calls = 0

    def __call__(self, state: np.ndarray) -> np.ndarray:
        self.calls += 1
        return self._action(state)


# --- pure-state run ----------------------------------------------------------

@dataclass(frozen=True)
class PureRunResult:
    outcome: str
    probability: float
    verdict: Verdict
    oracle_calls: int


def _hadamard_layer(state: np.ndarray, n: int, angle: float, scale: float = 1.0) -> np.ndarray:
    for q in range(1, n + 1):
        state = apply_gate(RF(q, Y_PHASE, angle), state, n, scale)
    return state


def _as_operator(f: BooleanFunction | DiagonalSignOperator) -> DiagonalSignOperator:
    return phase_oracle(f) if isinstance(f, BooleanFunction) else f


def _check_promise(d: DiagonalSignOperator) -> FunctionClass:
    cls = classify_operator(d)
    if cls is FunctionClass.NEITHER:
        raise PromiseViolation("function is neither constant nor balanced; the verdict is undefined")
    return cls


def pure_dj_run(f: BooleanFunction | DiagonalSignOperator) -> PureRunResult:
    """|0..0> -> h^n -> U_f -> (h^-1)^n, with h = (pi/2)_y."""
    d = _as_operator(f)
    _check_promise(d)
    n = d.n
    oracle = CountingOracle(lambda psi: d.signs * psi)
    psi = np.zeros(2 ** n, dtype=complex)
    psi[0] = 1.0
    psi = _hadamard_layer(psi, n, math.pi / 2)
    psi = oracle(psi)
    psi = _hadamard_layer(psi, n, -math.pi / 2)
    probs = np.abs(psi) ** 2
    best = int(np.argmax(probs))
    constant = best == 0 and abs(probs[0] - 1) <= 1e-9
    return PureRunResult(
        outcome=format(best, f"0{n}b"),
        probability=float(probs[best]),
        verdict=Verdict.CONSTANT if constant else Verdict.BALANCED,
        oracle_calls=oracle.calls,
    )


# --- density matrices ----------------------------------------------------------

def z_on(k: int, n: int) -> np.ndarray:
    """Diagonal of Pauli-z on spin k (1-based) in the n-spin register."""
    return 1.0 - 2.0 * bit(np.arange(2 ** n), k, n)


def thermal_state(system: SpinSystem) -> np.ndarray:
    """Deviation matrix sum_k gamma_k Z_k (unnormalized)."""
    n = system.n
    diag = sum(g * z_on(k, n) for k, g in enumerate(system.gammas, start=1))
    return np.diag(np.asarray(diag, dtype=complex))


Operation = Union[PulseSequence, np.ndarray]


def apply(op: Operation, state: np.ndarray, model: ImperfectionModel = IDEAL) -> np.ndarray:
    """U|psi> for vectors, U rho U^dagger for matrices."""
    if isinstance(op, PulseSequence):
        u = sequence_unitary(op, model.rf_scale)
    else:
        u = np.asarray(op)
    if u.shape[0] != state.shape[0]:
        raise ValueError(f"dimension mismatch: operator {u.shape}, state {state.shape}")
    if state.ndim == 1:
        return u @ state
    return u @ state @ u.conj().T


def hard_pulse(n: int, spins: Sequence[int], angle: float, phase: float = Y_PHASE) -> PulseSequence:
    return PulseSequence(n, tuple(RF(k, phase, angle) for k in spins))


def is_hermitian(rho: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return bool(np.max(np.abs(rho - rho.conj().T)) <= tol)


# --- read-out --------------------------------------------------------------------

def _quartet(j: float, s: int) -> list[tuple[float, float]]:
    """(offset Hz, weight) of the methyl lines replacing the logical s = +-1 line."""
    if s > 0:
        return [(1.5 * j, 0.25), (0.5 * j, 0.75)]
    return [(-0.5 * j, 0.75), (-1.5 * j, 0.25)]


def readout_spectrum(
    rho: np.ndarray,
    spin: int | str,
    system: SpinSystem,
    methyl_expand: bool = False,
    model: ImperfectionModel = IDEAL,
    phase_tol: float = IDEAL_PHASE_TOL,
) -> list[SpectrumLine]:
    """Selective (pi/2)_y on ``spin`` and its multiplet, one line per spectator state.

    Spectator l in |0> shifts the line by +J/2, in |1> by -J/2. With
    ``methyl_expand`` a multiplicity-3 spectator splits each of its two
    logical lines into half of a 1:3:3:1 quartet.
    """
    n = system.n
    k = system.index(spin)
    if rho.shape != (2 ** n, 2 ** n):
        raise ValueError(f"density matrix shape {rho.shape} does not match {n} spins")
    rho = apply(hard_pulse(n, [k], math.pi / 2), rho, model)
    label = system.labels[k - 1]
    nu = system.spins[k - 1].shift_hz
    others = [l for l in range(1, n + 1) if l != k]
    lines = []
    for m in range(2 ** (n - 1)):
        i0 = 0
        freq = nu
        branches = [(0.0, 1.0)]
        for pos, l in enumerate(others):
            b = (m >> (n - 2 - pos)) & 1
            i0 |= b << (n - l)
            s = 1 - 2 * b
            j = system.coupling(k, l)
            if methyl_expand and system.spins[l - 1].multiplicity == 3:
                branches = [(o + do, w * dw) for o, w in branches for do, dw in _quartet(j, s)]
            else:
                freq += 0.5 * j * s
        i1 = i0 | 1 << (n - k)
        amp = complex(2 * rho[i0, i1])
        for offset, weight in branches:
            a = amp * weight
            lines.append(SpectrumLine(label, freq + offset, a, classify_phase(a, phase_tol)))
    return lines


# --- NMR run -----------------------------------------------------------------------

@dataclass
class NMRRunResult:
    verdict: Verdict
    spectra: dict[str, list[SpectrumLine]]
    oracle_calls: int
    sequence: PulseSequence
    operator: DiagonalSignOperator = field(repr=False)

    @property
    def emissive_lines(self) -> list[SpectrumLine]:
        return [ln for lines in self.spectra.values() for ln in lines
                if ln.phase_class is PhaseClass.EMISSIVE]

    def emissive_spins(self) -> list[str]:
        return [lab for lab, lines in self.spectra.items()
                if any(ln.phase_class is PhaseClass.EMISSIVE for ln in lines)]


def resolve_oracle(oracle, system: SpinSystem) -> DiagonalSignOperator:
    if isinstance(oracle, str):
        return table1_operator(oracle, system.labels)
    if isinstance(oracle, BooleanFunction):
        return phase_oracle(oracle)
    return oracle


def dj_nmr_run(
    oracle: DiagonalSignOperator | BooleanFunction | str,
    system: SpinSystem,
    model: ImperfectionModel = IDEAL,
    phase_tol: float | None = None,
    methyl_expand: bool = False,
    sequence: PulseSequence | None = None,
) -> NMRRunResult:
    """Thermal-state D-J experiment; ``oracle`` may be a crotonic-acid operator id like ``"f9"``.

    Verdict is Constant iff every line of every spin is absorptive and
    Balanced iff at least one line is emissive. Under ideal pulses any mixed
    line is an internal error.
    """
    d = resolve_oracle(oracle, system)
    if d.n != system.n:
        raise ValueError(f"oracle acts on {d.n} qubits but the system has {system.n} spins")
    _check_promise(d)
    if phase_tol is None:
        phase_tol = IDEAL_PHASE_TOL if model.ideal else IMPERFECT_PHASE_TOL
    n = system.n
    if sequence is None:
        sequence = compile_diagonal(d, topology_of(system))
    u = sequence_unitary(sequence, model.rf_scale)
    counted = CountingOracle(lambda rho: u @ rho @ u.conj().T)

    rho = thermal_state(system)
    rho = apply(hard_pulse(n, range(1, n + 1), math.pi / 2), rho, model)
    rho = counted(rho)

    spectra = {}
    for k in range(1, n + 1):
        rho_k = apply(hard_pulse(n, [k], -math.pi / 2), rho, model)
        spectra[system.labels[k - 1]] = readout_spectrum(
            rho_k, k, system, methyl_expand, model, phase_tol
        )

    classes = {ln.phase_class for lines in spectra.values() for ln in lines}
    if model.ideal and PhaseClass.MIXED in classes:
        raise RuntimeError("mixed-phase line under ideal pulses")
    if PhaseClass.EMISSIVE in classes:
        verdict = Verdict.BALANCED
    elif classes == {PhaseClass.ABSORPTIVE}:
        verdict = Verdict.CONSTANT
    else:
        verdict = Verdict.INCONCLUSIVE
    return NMRRunResult(verdict, spectra, counted.calls, sequence, d)

