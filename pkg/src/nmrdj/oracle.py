"""Boolean functions, constant/balanced classification and phase oracles.

Also holds the nine seven-spin crotonic-acid operators (f1..f9) and the
four-factor parity-phase factorization of the balanced family
``collins_family``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qop import (
    MAX_QUBITS,
    DiagonalSignOperator,
    ParityPhaseGate,
    ParityTerm,
    _check_n,
    _frozen,
    walsh_reconstruct,
)


class FunctionClass(enum.Enum):
    CONSTANT = "Constant"
    BALANCED = "Balanced"
    NEITHER = "Neither"


class PromiseViolation(ValueError):
    """The function is neither constant nor balanced."""


@dataclass(frozen=True)
class BooleanFunction:
    n: int
    table: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        table = np.array(self.table, dtype=np.uint8)
        if table.shape != (2 ** self.n,):
            raise ValueError(f"truth table must have length {2 ** self.n}, got {table.shape}")
        if np.any(table > 1):
            raise ValueError("truth table entries must be 0 or 1")
        object.__setattr__(self, "table", _frozen(table))

    @classmethod
    def constant(cls, n: int, value: int = 0) -> "BooleanFunction":
        return cls(n, np.full(2 ** n, value & 1))

    @classmethod
    def from_hex(cls, text: str, n: int | None = None) -> "BooleanFunction":
        """Parse an MSB-first hex bit string; the first bit is f(0).

        Without ``n`` the bit count must be a power of two >= 4. With ``n``
        the leading 2**n bits are used and the rest must be zero padding.
        """
        digits = text.strip().lower().removeprefix("0x")
        if not digits or any(c not in "0123456789abcdef" for c in digits):
            raise ValueError(f"not a hex string: {text!r}")
        bits = [int(b) for c in digits for b in format(int(c, 16), "04b")]
        if n is None:
            n = int(math.log2(len(bits)))
            if 2 ** n != len(bits):
                raise ValueError(f"{len(bits)} bits is not a power of two; pass n explicitly")
        if 2 ** n > len(bits) or any(bits[2 ** n:]):
            raise ValueError(f"hex string does not encode a {n}-bit truth table")
        return cls(n, bits[: 2 ** n])

    def to_hex(self) -> str:
        bits = list(self.table) + [0] * (-len(self.table) % 4)
        return "".join(
            format(int("".join(map(str, bits[i:i + 4])), 2), "x") for i in range(0, len(bits), 4)
        )

    @property
    def ones(self) -> int:
        return int(self.table.sum(dtype=np.int64))

    def __eq__(self, other):
        if not isinstance(other, BooleanFunction):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash((self.n, self.table.tobytes()))


def classify(f: BooleanFunction) -> FunctionClass:
    ones = f.ones
    if ones in (0, 2 ** f.n):
        return FunctionClass.CONSTANT
    if 2 * ones == 2 ** f.n:
        return FunctionClass.BALANCED
    return FunctionClass.NEITHER


def phase_oracle(f: BooleanFunction) -> DiagonalSignOperator:
    return DiagonalSignOperator(f.n, 1 - 2 * f.table.astype(np.int8))


def function_of(d: DiagonalSignOperator) -> BooleanFunction:
    """Inverse of :func:`phase_oracle`."""
    return BooleanFunction(d.n, (1 - d.signs) // 2)


def classify_operator(d: DiagonalSignOperator) -> FunctionClass:
    """Trace test: |tr| = 2**n for constant, tr = 0 for balanced."""
    tr = d.trace
    if abs(tr) == 2 ** d.n:
        return FunctionClass.CONSTANT
    if tr == 0:
        return FunctionClass.BALANCED
    return FunctionClass.NEITHER


def collins_terms(order: Sequence[int]) -> list[ParityTerm]:
    """Parity terms of the balanced template over the qubits in ``order``.

    With ``order = (q_1, ..., q_m)`` the eigenvalue is
    1/2 (z_{m-1} + z_{m-1} z_m + z_1...z_{m-1} - z_1...z_m).
    """
    m = len(order)
    if m < 2 or len(set(order)) != m:
        raise ValueError(f"template needs >= 2 distinct qubits, got {order}")
    a, b = order[-2], order[-1]
    terms: dict[frozenset, float] = {}
    # at m == 2 the head term coincides with z_a and the last two cancel
    for support, c in (((a,), 0.5), ((a, b), 0.5), (order[:-1], 0.5), (order, -0.5)):
        key = frozenset(support)
        terms[key] = terms.get(key, 0.0) + c
    return [ParityTerm(tuple(s), c) for s, c in terms.items() if c]


def collins_family(n: int) -> BooleanFunction:
    """Balanced f with f = x_{n-1} if x_n = 0 and x_1 xor ... xor x_{n-1} if x_n = 1."""
    if n < 2:
        raise ValueError("collins_family needs n >= 2")
    _check_n(n)
    d = walsh_reconstruct(collins_terms(range(1, n + 1)), n)
    return function_of(d)


@dataclass(frozen=True)
class Factorization:
    global_phase: float
    gates: tuple[ParityPhaseGate, ...]


def eq3_factorization(n: int) -> Factorization:
    """Four parity-phase factors whose product is the collins_family oracle.

    The factors are written as exp(i*theta*Z_S). Their rotation angles in the
    exp(-i*alpha*Z_S/2) convention are +-pi/2, i.e. theta = -+pi/4. The
    returned product equals the oracle up to the constant phase e^{i pi/2}.
    """
    if n < 2:
        raise ValueError("eq3_factorization needs n >= 2")
    _check_n(n)
    q = math.pi / 4
    gates = (
        ParityPhaseGate(tuple(range(1, n)), -q),
        ParityPhaseGate(tuple(range(1, n + 1)), +q),
        ParityPhaseGate((n - 1, n), -q),
        ParityPhaseGate((n - 1,), -q),
    )
    return Factorization(math.pi, gates)


# Seven-spin crotonic-acid register. Qubit order follows the coupling chain.
CROTONIC_LABELS = ("C1", "C2", "C3", "C4", "H1", "H2", "H3")

TABLE1_IDS = tuple(f"f{i}" for i in range(1, 10))

# Rows f4..f9 are the balanced template instantiated with the listed spin
# ordering (last two entries are the qubits n-1 and n of the template).
TABLE1_ORDERINGS: dict[str, tuple[str, ...]] = {
    "f4": ("C3", "C2", "C4"),
    "f5": ("C2", "C1", "H3"),
    "f6": ("C1", "C2", "C3", "C4"),
    "f7": ("C1", "C2", "C3", "C4", "H1"),
    "f8": ("C1", "C2", "C3", "C4", "H1", "H2"),
    "f9": ("C4", "C3", "H2", "H1", "H3", "C1", "C2"),
}

_TABLE1_SINGLE: dict[str, tuple[str, ...] | None] = {
    "f1": None,
    "f2": ("C2", "C3"),
    "f3": CROTONIC_LABELS,
}


def table1_terms(table_id: str, labels: Sequence[str] = CROTONIC_LABELS) -> list[ParityTerm]:
    """Parity terms of a crotonic-acid operator on the register ordered as ``labels``."""
    if sorted(labels) != sorted(CROTONIC_LABELS):
        raise ValueError(f"register must consist of {CROTONIC_LABELS}, got {tuple(labels)}")
    index = {lab: i + 1 for i, lab in enumerate(labels)}
    if table_id in _TABLE1_SINGLE:
        spins = _TABLE1_SINGLE[table_id]
        if spins is None:
            return [ParityTerm((), 1.0)]
        return [ParityTerm(tuple(index[s] for s in spins), 1.0)]
    if table_id in TABLE1_ORDERINGS:
        return collins_terms([index[s] for s in TABLE1_ORDERINGS[table_id]])
    raise KeyError(f"unknown crotonic-acid operator {table_id!r}; expected one of {TABLE1_IDS}")


def table1_operator(table_id: str, labels: Sequence[str] = CROTONIC_LABELS) -> DiagonalSignOperator:
    d = walsh_reconstruct(table1_terms(table_id, labels), len(CROTONIC_LABELS))
    expected = FunctionClass.CONSTANT if table_id == "f1" else FunctionClass.BALANCED
    got = classify_operator(d)
    if got is not expected:
        raise ValueError(f"{table_id}: trace test gives {got.value}, expected {expected.value}")
    return d


__all__ = [
    "BooleanFunction",
    "CROTONIC_LABELS",
    "Factorization",
    "FunctionClass",
    "MAX_QUBITS",
    "PromiseViolation",
    "TABLE1_IDS",
    "TABLE1_ORDERINGS",
    "classify",
    "classify_operator",
    "collins_family",
    "collins_terms",
    "eq3_factorization",
    "function_of",
    "phase_oracle",
    "table1_operator",
    "table1_terms",
]
