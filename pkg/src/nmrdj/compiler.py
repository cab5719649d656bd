"""Compilation onto the NMR native gate set.

Native gates are single-spin RF rotations, RF(spin, axis, angle) =
exp(-i angle/2 sigma.a) with ``a`` in the transverse plane at phase ``axis``
(radians from x) or ``a = z``, and neighbour couplings
ZZ(k, l, angle) = exp(-i angle sigma_z^k sigma_z^l), which the free J
evolution produces in time 2*angle/(pi*J).

Every PulseSequence carries its global phase, so
``sequence_unitary(ps)`` equals the compiled target exactly, not only up to
phase.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .qop import (
    SX,
    SY,
    SZ,
    DiagonalSignOperator,
    ParityPhaseGate,
    _check_n,
    parity_sign,
    walsh_transform,
)

Z_AXIS = "z"
X_PHASE = 0.0
Y_PHASE = math.pi / 2

TWO_PI = 2 * math.pi


class TopologyError(ValueError):
    """A two-spin gate was requested on spins that are not coupled."""


def normalize_rf_angle(angle: float) -> float:
    """Map an angle to (-2pi, 2pi]; RF rotations are 4pi periodic."""
    a = math.fmod(angle, 2 * TWO_PI)
    if a <= -TWO_PI:
        a += 2 * TWO_PI
    elif a > TWO_PI:
        a -= 2 * TWO_PI
    return a


@dataclass(frozen=True)
class RF:
    spin: int
    axis: Union[float, str]
    angle: float

    def __post_init__(self):
        if self.axis != Z_AXIS and not isinstance(self.axis, (int, float)):
            raise ValueError(f"RF axis must be a phase in radians or 'z', got {self.axis!r}")
        object.__setattr__(self, "angle", normalize_rf_angle(float(self.angle)))

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.spin,)

    @property
    def diagonal(self) -> bool:
        return self.axis == Z_AXIS

    def matrix(self, scale: float = 1.0) -> np.ndarray:
        half = 0.5 * self.angle * scale
        if self.axis == Z_AXIS:
            gen = SZ
        else:
            gen = math.cos(self.axis) * SX + math.sin(self.axis) * SY
        return math.cos(half) * np.eye(2) - 1j * math.sin(half) * gen


@dataclass(frozen=True)
class ZZ:
    k: int
    l: int
    angle: float
    duration: float | None = None

    def __post_init__(self):
        if self.k == self.l:
            raise ValueError("ZZ gate needs two distinct spins")
        if self.k > self.l:
            k, l = self.l, self.k
            object.__setattr__(self, "k", k)
            object.__setattr__(self, "l", l)

    @property
    def spins(self) -> tuple[int, ...]:
        return (self.k, self.l)

    @property
    def diagonal(self) -> bool:
        return True


NativeGate = Union[RF, ZZ]


@dataclass(frozen=True)
class CouplingTopology:
    """Linear coupling chain 1-2-...-n, optionally with the J value per edge."""

    n: int
    couplings: Mapping[tuple[int, int], float | None] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("topology needs at least one spin")
        edges = {tuple(sorted(e)): j for e, j in self.couplings.items()}
        path = {(k, k + 1) for k in range(1, self.n)}
        for e in path:
            edges.setdefault(e, None)
        if set(edges) != path:
            raise ValueError(f"only path topologies are supported, got edges {sorted(edges)}")
        object.__setattr__(self, "couplings", dict(sorted(edges.items())))

    @classmethod
    def path(cls, n: int) -> "CouplingTopology":
        return cls(n)

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(self.couplings)

    def adjacent(self, k: int, l: int) -> bool:
        return tuple(sorted((k, l))) in self.couplings

    def j_hz(self, k: int, l: int) -> float | None:
        return self.couplings.get(tuple(sorted((k, l))))

    def check_spin(self, k: int) -> None:
        if not 1 <= k <= self.n:
            raise ValueError(f"spin {k} out of range 1..{self.n}")


def zz_duration(angle: float, j_hz: float) -> float:
    """Free-evolution time for exp(-i angle ZZ), using angle mod pi >= 0."""
    if j_hz == 0:
        raise ValueError("zero coupling cannot drive a ZZ gate")
    return 2 * (angle % math.pi) / (math.pi * abs(j_hz))


@dataclass(frozen=True)
class PulseSequence:
    n: int
    gates: tuple[NativeGate, ...] = ()
    global_phase: float = 0.0
    cnot_count: int = 0
    swap_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            for s in g.spins:
                if not 1 <= s <= self.n:
                    raise ValueError(f"gate {g} acts outside the {self.n}-spin register")

    def __add__(self, other: "PulseSequence") -> "PulseSequence":
        if other.n != self.n:
            raise ValueError("cannot concatenate sequences on different registers")
        return PulseSequence(
            self.n,
            self.gates + other.gates,
            self.global_phase + other.global_phase,
            self.cnot_count + other.cnot_count,
            self.swap_count + other.swap_count,
        )

    def __len__(self):
        return len(self.gates)

    @property
    def rf_count(self) -> int:
        return sum(isinstance(g, RF) for g in self.gates)

    @property
    def zz_count(self) -> int:
        return sum(isinstance(g, ZZ) for g in self.gates)

    def with_phase(self, phase: float) -> "PulseSequence":
        return replace(self, global_phase=self.global_phase + phase)

    def check_topology(self, topo: CouplingTopology) -> None:
        for g in self.gates:
            if isinstance(g, ZZ) and not topo.adjacent(g.k, g.l):
                raise TopologyError(f"ZZ on non-adjacent pair ({g.k}, {g.l})")


def _sum(n: int, parts: Iterable[PulseSequence]) -> PulseSequence:
    gates: list[NativeGate] = []
    phase = 0.0
    cnots = swaps = 0
    for p in parts:
        if p.n != n:
            raise ValueError("cannot concatenate sequences on different registers")
        gates.extend(p.gates)
        phase += p.global_phase
        cnots += p.cnot_count
        swaps += p.swap_count
    return PulseSequence(n, tuple(gates), phase, cnots, swaps)


# --- unitary evaluation ----------------------------------------------------

def apply_gate(gate: NativeGate, target: np.ndarray, n: int, rf_scale: float = 1.0) -> np.ndarray:
    """Left-multiply a state vector or a 2**n-row matrix by ``gate``."""
    if isinstance(gate, RF):
        u = gate.matrix(rf_scale)
        shaped = target.reshape(2 ** (gate.spin - 1), 2, -1)
        return np.einsum("ij,ajb->aib", u, shaped).reshape(target.shape)
    chi = parity_sign(np.arange(2 ** n), gate.spins, n)
    phase = np.exp(-1j * gate.angle * chi)
    if target.ndim == 1:
        return phase * target
    return phase[:, None] * target


def sequence_unitary(ps: PulseSequence, rf_scale: float = 1.0) -> np.ndarray:
    """Dense unitary of a sequence; RF angles multiplied by ``rf_scale``.

    Runs of diagonal gates are accumulated as one phase vector and applied
    only before the next transverse pulse.
    """
    n = ps.n
    _check_n(n)
    dim = 2 ** n
    z = {k: parity_sign(np.arange(dim), (k,), n) for k in range(1, n + 1)}
    u = np.eye(dim, dtype=complex)
    pending = np.zeros(dim)
    dirty = False
    for g in ps.gates:
        if isinstance(g, ZZ):
            pending -= g.angle * z[g.k] * z[g.l]
            dirty = True
        elif g.axis == Z_AXIS:
            pending -= 0.5 * g.angle * rf_scale * z[g.spin]
            dirty = True
        else:
            if dirty:
                u *= np.exp(1j * pending)[:, None]
                pending[:] = 0
                dirty = False
            shaped = u.reshape(2 ** (g.spin - 1), 2, -1)
            u = np.matmul(g.matrix(rf_scale), shaped).reshape(dim, dim)
    if dirty:
        u *= np.exp(1j * pending)[:, None]
    return np.exp(1j * ps.global_phase) * u


# --- expansions ------------------------------------------------------------

def _zz(k: int, l: int, angle: float, topo: CouplingTopology) -> ZZ:
    j = topo.j_hz(k, l)
    return ZZ(k, l, angle, None if j is None else zz_duration(angle, j))


def compile_cnot(control: int, target: int, topo: CouplingTopology) -> PulseSequence:
    """CNOT = Ry_t(pi/2) . CZ . Ry_t(-pi/2), with CZ from one ZZ(pi/4) and two z turns."""
    topo.check_spin(control)
    topo.check_spin(target)
    if not topo.adjacent(control, target):
        raise TopologyError(f"CNOT needs coupled spins, ({control}, {target}) are not adjacent")
    gates = (
        RF(target, Y_PHASE, -math.pi / 2),
        RF(control, Z_AXIS, -math.pi / 2),
        RF(target, Z_AXIS, -math.pi / 2),
        _zz(control, target, math.pi / 4, topo),
        RF(target, Y_PHASE, math.pi / 2),
    )
    return PulseSequence(topo.n, gates, -math.pi / 4, cnot_count=1)


def compile_swap(k: int, l: int, topo: CouplingTopology) -> PulseSequence:
    seq = compile_cnot(k, l, topo) + compile_cnot(l, k, topo) + compile_cnot(k, l, topo)
    return replace(seq, swap_count=1)


def route_contiguous(support: Sequence[int]) -> tuple[list[tuple[int, int]], int]:
    """Adjacent swaps that pack ``support`` next to its lowest-index spin.

    Returns the swap list and the first chain position of the packed block.
    Spins are moved leftwards one at a time, closest first.
    """
    s = sorted(support)
    base = s[0]
    swaps = []
    for j, spin in enumerate(s[1:], start=1):
        # Earlier moves only shuffle non-support spins to the right, so ``spin``
        # still sits at its original position here.
        for p in range(spin, base + j, -1):
            swaps.append((p - 1, p))
    return swaps, base


def compile_parity_phase(g: ParityPhaseGate, topo: CouplingTopology) -> PulseSequence:
    """exp(i theta Z_S) via swap routing, a CNOT ladder and one z rotation."""
    n = topo.n
    if g.support[-1] > n:
        raise ValueError(f"support {g.support} out of range for {n} spins")
    swaps, base = route_contiguous(g.support)
    k = len(g.support)
    route = [compile_swap(a, b, topo) for a, b in swaps]
    ladder = [compile_cnot(q, q + 1, topo) for q in range(base, base + k - 1)]
    rz = PulseSequence(n, (RF(base + k - 1, Z_AXIS, -2 * g.angle),))
    return _sum(n, route + ladder + [rz] + ladder[::-1] + route[::-1])


def compile_gates(
    gates: Iterable[ParityPhaseGate], topo: CouplingTopology, global_phase: float = 0.0
) -> PulseSequence:
    return _sum(topo.n, (compile_parity_phase(g, topo) for g in gates)).with_phase(global_phase)


def diagonal_gates(d: DiagonalSignOperator) -> tuple[float, list[ParityPhaseGate]]:
    """Phase and commuting parity gates with product equal to ``d``.

    (-1)^f = e^{i pi/2} exp(-i pi/2 sum_S c_S chi_S); the empty support only
    shifts the phase.
    """
    phase = math.pi / 2
    gates = []
    for t in walsh_transform(d):
        theta = -math.pi / 2 * t.coefficient
        if t.support:
            gates.append(ParityPhaseGate(t.support, theta))
        else:
            phase += theta
    return phase, gates


def compile_diagonal(d: DiagonalSignOperator, topo: CouplingTopology) -> PulseSequence:
    if d.n != topo.n:
        raise ValueError(f"operator has {d.n} qubits, topology has {topo.n} spins")
    phase, gates = diagonal_gates(d)
    return compile_gates(gates, topo, phase)


# --- reporting -------------------------------------------------------------

@dataclass(frozen=True)
class SequenceStats:
    rf_count: int
    zz_count: int
    cnot_count: int
    swap_count: int
    j_evolution_s: float
    negative_zz: int

    def as_dict(self) -> dict:
        return {
            "rf_count": self.rf_count,
            "zz_count": self.zz_count,
            "cnot_count": self.cnot_count,
            "swap_count": self.swap_count,
            "j_evolution_s": self.j_evolution_s,
            "negative_zz": self.negative_zz,
        }


def sequence_stats(ps: PulseSequence, system) -> SequenceStats:
    """Gate counts and total free-evolution time under ``system``'s couplings.

    A ZZ gate with negative angle is timed as its phase-inverted equivalent
    angle + pi and counted in ``negative_zz``.
    """
    total = 0.0
    negative = 0
    for g in ps.gates:
        if not isinstance(g, ZZ):
            continue
        j = system.coupling(g.k, g.l)
        if j == 0:
            raise ValueError(f"pair ({g.k}, {g.l}) has zero coupling")
        if g.angle < 0:
            negative += 1
        total += zz_duration(g.angle, j)
    return SequenceStats(ps.rf_count, ps.zz_count, ps.cnot_count, ps.swap_count, total, negative)


# --- peephole --------------------------------------------------------------

def _commute(a: NativeGate, b: NativeGate) -> bool:
    return not set(a.spins) & set(b.spins) or (a.diagonal and b.diagonal)


def _merge(a: NativeGate, b: NativeGate, topo: CouplingTopology | None):
    if isinstance(a, RF) and isinstance(b, RF):
        if a.spin == b.spin and a.axis == b.axis:
            return RF(a.spin, a.axis, a.angle + b.angle)
    elif isinstance(a, ZZ) and isinstance(b, ZZ) and a.spins == b.spins:
        angle = a.angle + b.angle
        j = topo.j_hz(a.k, a.l) if topo is not None else None
        return ZZ(a.k, a.l, angle, None if j is None else zz_duration(angle, j))
    return None


def _is_trivial(g: NativeGate) -> tuple[bool, float]:
    """(can drop, global phase to add when dropping)."""
    if g.angle == 0:
        return True, 0.0
    if isinstance(g, RF) and g.angle == TWO_PI:
        return True, math.pi
    return False, 0.0


def simplify(ps: PulseSequence, topo: CouplingTopology | None = None) -> PulseSequence:
    """Merge same-axis rotations and drop identities.

    A gate is merged into the latest earlier gate it can combine with,
    moving past gates it commutes with (disjoint spins, or both diagonal).
    """
    out: list[NativeGate] = []
    phase = ps.global_phase
    for g in ps.gates:
        drop, extra = _is_trivial(g)
        if drop:
            phase += extra
            continue
        for i in range(len(out) - 1, -1, -1):
            merged = _merge(out[i], g, topo)
            if merged is not None:
                drop, extra = _is_trivial(merged)
                if drop:
                    phase += extra
                    del out[i]
                else:
                    out[i] = merged
                break
            if not _commute(out[i], g):
                out.append(g)
                break
        else:
            out.append(g)
    return PulseSequence(ps.n, tuple(out), phase, ps.cnot_count, ps.swap_count)


# --- text format -----------------------------------------------------------

def _fmt(x: float | None) -> str:
    return "nan" if x is None else format(x, ".17g")


def dumps_sequence(ps: PulseSequence) -> str:
    lines = [f"# n={ps.n} global_phase={_fmt(ps.global_phase)}"]
    for g in ps.gates:
        if isinstance(g, RF):
            axis = Z_AXIS if g.axis == Z_AXIS else _fmt(float(g.axis))
            lines.append(f"RF {g.spin} {axis} {_fmt(g.angle)}")
        else:
            lines.append(f"ZZ {g.k} {g.l} {_fmt(g.angle)} {_fmt(g.duration)}")
    return "\n".join(lines) + "\n"


def loads_sequence(text: str) -> PulseSequence:
    n = None
    phase = 0.0
    gates: list[NativeGate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(
                tok.split("=", 1) for tok in line[1:].split() if "=" in tok
            )
            if "n" in fields:
                n = int(fields["n"])
                phase = float(fields.get("global_phase", 0.0))
            continue
        tok = line.split()
        try:
            if tok[0] == "RF" and len(tok) == 4:
                axis = Z_AXIS if tok[2] == Z_AXIS else float(tok[2])
                gates.append(RF(int(tok[1]), axis, float(tok[3])))
            elif tok[0] == "ZZ" and len(tok) == 5:
                dur = float(tok[4])
                gates.append(ZZ(int(tok[1]), int(tok[2]), float(tok[3]), None if math.isnan(dur) else dur))
            else:
                raise ValueError(tok[0])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: cannot parse {raw!r}") from exc
    if n is None:
        raise ValueError("missing '# n=<n> global_phase=<rad>' header")
    return PulseSequence(n, tuple(gates), phase)
