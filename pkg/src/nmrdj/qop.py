"""Dense complex-matrix kernel and parity (Walsh) algebra.

Index convention used everywhere in the package: qubit 1 is the most
significant bit of a basis index and the first Kronecker factor. Pauli-z
has eigenvalue +1 on |0> and -1 on |1>.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 12
UNITARY_TOL = 1e-12
SIGN_TOL = 1e-9

E = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def bit(x, qubit: int, n: int):
    """Value of ``qubit`` (1-based, MSB first) in basis index ``x``."""
    return (x >> (n - qubit)) & 1


def parity_sign(x, support: Iterable[int], n: int):
    """prod_{i in support} (-1)^{x_i}; works on ints and integer arrays."""
    mask = 0
    for q in support:
        mask |= 1 << (n - q)
    if isinstance(x, np.ndarray):
        return 1 - 2 * (np.bitwise_count(x & mask).astype(np.int64) & 1)
    return 1 - 2 * (bin(x & mask).count("1") & 1)


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    d = u.shape[0]
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(d))) <= tol)


def kron_chain(single_qubit_ops: Sequence[np.ndarray]) -> np.ndarray:
    """Left-to-right Kronecker product; the first factor acts on qubit 1."""
    if len(single_qubit_ops) == 0:
        raise ValueError("kron_chain needs at least one factor")
    _check_n(len(single_qubit_ops))
    for op in single_qubit_ops:
        if np.shape(op) != (2, 2):
            raise ValueError(f"factor has shape {np.shape(op)}, expected (2, 2)")
    return reduce(np.kron, [np.asarray(op, dtype=complex) for op in single_qubit_ops])


def _normalize_support(support: Iterable[int]) -> tuple[int, ...]:
    return tuple(sorted(set(int(q) for q in support)))


@dataclass(frozen=True)
class DiagonalSignOperator:
    """A diagonal operator whose entries are all +1 or -1."""

    n: int
    signs: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        signs = np.array(self.signs, dtype=np.int8)
        if signs.shape != (2 ** self.n,):
            raise ValueError(f"expected {2 ** self.n} signs, got shape {signs.shape}")
        if not np.all(np.abs(signs) == 1):
            raise ValueError("diagonal entries must be exactly +1 or -1")
        object.__setattr__(self, "signs", _frozen(signs))

    @property
    def trace(self) -> int:
        return int(self.signs.sum(dtype=np.int64))

    def matrix(self) -> np.ndarray:
        return np.diag(self.signs.astype(complex))

    def __eq__(self, other):
        if not isinstance(other, DiagonalSignOperator):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.signs, other.signs)

    def __hash__(self):
        return hash((self.n, self.signs.tobytes()))


@dataclass(frozen=True)
class ParityTerm:
    support: tuple[int, ...]
    coefficient: float

    def __post_init__(self):
        object.__setattr__(self, "support", _normalize_support(self.support))


@dataclass(frozen=True)
class ParityPhaseGate:
    """exp(i * angle * Z_S) where Z_S is the product of Pauli-z over ``support``."""

    support: tuple[int, ...]
    angle: float

    def __post_init__(self):
        s = _normalize_support(self.support)
        if not s:
            raise ValueError("parity-phase gate needs a nonempty support")
        if s[0] < 1:
            raise ValueError(f"qubit indices are 1-based, got {s}")
        object.__setattr__(self, "support", s)

    @property
    def order(self) -> int:
        return len(self.support)


def parity_phase_diagonal(g: ParityPhaseGate, n: int) -> np.ndarray:
    _check_n(n)
    if g.support[-1] > n:
        raise ValueError(f"support {g.support} out of range for n={n}")
    chi = parity_sign(np.arange(2 ** n), g.support, n)
    return np.exp(1j * g.angle * chi)


def parity_phase_unitary(g: ParityPhaseGate, n: int) -> np.ndarray:
    return np.diag(parity_phase_diagonal(g, n))


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform (natural/Hadamard order).

    Output index s is the bitmask of the support in the same MSB-first
    layout as basis indices, so out[s] = sum_x v[x] (-1)^{popcount(x & s)}.
    """
    a = np.array(values, copy=True)
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError("length must be a power of two")
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1)
        h *= 2
    return a.reshape(size)


def _mask_to_support(mask: int, n: int) -> tuple[int, ...]:
    return tuple(q for q in range(1, n + 1) if mask >> (n - q) & 1)


def _support_to_mask(support: Iterable[int], n: int) -> int:
    mask = 0
    for q in support:
        if not 1 <= q <= n:
            raise ValueError(f"support index {q} out of range for n={n}")
        mask |= 1 << (n - q)
    return mask


def walsh_transform(d: DiagonalSignOperator) -> list[ParityTerm]:
    """Parity-term expansion of a sign diagonal.

    Coefficients are computed in exact integer arithmetic (scaled by 2**n)
    and are dyadic rationals, so the float division is exact.
    """
    scaled = fwht(d.signs.astype(np.int64))
    terms = [
        ParityTerm(_mask_to_support(int(mask), d.n), int(scaled[mask]) / 2 ** d.n)
        for mask in np.flatnonzero(scaled)
    ]
    terms.sort(key=lambda t: (len(t.support), t.support))
    return terms


def walsh_reconstruct(terms: Sequence[ParityTerm], n: int) -> DiagonalSignOperator:
    _check_n(n)
    spectrum = np.zeros(2 ** n)
    seen = set()
    for t in terms:
        mask = _support_to_mask(t.support, n)
        if mask in seen:
            raise ValueError(f"duplicate support {t.support}")
        seen.add(mask)
        spectrum[mask] = t.coefficient
    values = fwht(spectrum)
    if np.max(np.abs(np.abs(values) - 1)) > SIGN_TOL:
        raise ValueError("terms do not reconstruct a +-1 diagonal")
    return DiagonalSignOperator(n, np.sign(values).astype(np.int8))


def global_phase_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|tr(A^dagger B)| / dim; equals 1 iff A = e^{i phi} B for unitaries."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)) / a.shape[0])
