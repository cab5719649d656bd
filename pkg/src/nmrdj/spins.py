"""Spin-system description and JSON config ingestion.

Config layout::

    {
      "provenance": "...",
      "spins": [{"label": "C1", "species": "13C", "shift_hz": 0.0,
                 "gamma": 1.0, "multiplicity": 1}, ...],
      "j_hz": [[0.0, 72.0, ...], ...]
    }

The order of ``spins`` is both the qubit order and the coupling chain.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .compiler import CouplingTopology
from .qop import MAX_QUBITS


class SpinSystemError(ValueError):
    pass


@dataclass(frozen=True)
class Spin:
    label: str
    species: str
    shift_hz: float = 0.0
    gamma: float = 1.0
    multiplicity: int = 1

    def __post_init__(self):
        if not self.label:
            raise SpinSystemError("spin label must be nonempty")
        if int(self.multiplicity) != self.multiplicity or self.multiplicity < 1:
            raise SpinSystemError(f"{self.label}: multiplicity must be a positive integer")


@dataclass(frozen=True)
class SpinSystem:
    spins: tuple[Spin, ...]
    j_hz: np.ndarray
    provenance: str = ""

    def __post_init__(self):
        spins = tuple(self.spins)
        n = len(spins)
        if not 1 <= n <= MAX_QUBITS:
            raise SpinSystemError(f"spin count must be in 1..{MAX_QUBITS}, got {n}")
        labels = [s.label for s in spins]
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        if dupes:
            raise SpinSystemError(f"duplicate spin labels: {dupes}")
        j = np.array(self.j_hz, dtype=float)
        if j.shape != (n, n):
            raise SpinSystemError(f"j_hz must be {n}x{n}, got {j.shape}")
        if not np.array_equal(j, j.T):
            raise SpinSystemError("J matrix is asymmetric")
        if np.any(np.diag(j) != 0):
            raise SpinSystemError("J matrix must have a zero diagonal")
        for k in range(n - 1):
            if j[k, k + 1] == 0:
                raise SpinSystemError(
                    f"adjacent pair {labels[k]}-{labels[k + 1]} has zero coupling"
                )
        j.setflags(write=False)
        object.__setattr__(self, "spins", spins)
        object.__setattr__(self, "j_hz", j)

    @property
    def n(self) -> int:
        return len(self.spins)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(s.label for s in self.spins)

    @property
    def gammas(self) -> np.ndarray:
        return np.array([s.gamma for s in self.spins], dtype=float)

    def index(self, spin: int | str) -> int:
        """1-based chain position of a spin given by label or position."""
        if isinstance(spin, str):
            try:
                return self.labels.index(spin) + 1
            except ValueError:
                raise SpinSystemError(f"no spin labelled {spin!r}") from None
        if not 1 <= spin <= self.n:
            raise SpinSystemError(f"spin index {spin} out of range 1..{self.n}")
        return int(spin)

    def coupling(self, k: int, l: int) -> float:
        return float(self.j_hz[k - 1, l - 1])

    def with_gammas(self, gammas: Sequence[float]) -> "SpinSystem":
        spins = tuple(
            Spin(s.label, s.species, s.shift_hz, float(g), s.multiplicity)
            for s, g in zip(self.spins, gammas, strict=True)
        )
        return SpinSystem(spins, self.j_hz, self.provenance)

    def __eq__(self, other):
        if not isinstance(other, SpinSystem):
            return NotImplemented
        return (
            self.spins == other.spins
            and np.array_equal(self.j_hz, other.j_hz)
            and self.provenance == other.provenance
        )

    def __hash__(self):
        return hash((self.spins, self.j_hz.tobytes(), self.provenance))

    @classmethod
    def chain(cls, n: int, j: float = 10.0, spacing_hz: float = 100.0, gamma: float = 1.0):
        """Toy homonuclear chain with uniform neighbour couplings."""
        spins = tuple(Spin(f"Q{k}", "1H", k * spacing_hz, gamma) for k in range(1, n + 1))
        jm = np.zeros((n, n))
        for k in range(n - 1):
            jm[k, k + 1] = jm[k + 1, k] = j
        return cls(spins, jm, "synthetic chain")


def system_from_dict(doc: Mapping[str, Any]) -> SpinSystem:
    try:
        spins = tuple(
            Spin(
                label=str(s["label"]),
                species=str(s["species"]),
                shift_hz=float(s.get("shift_hz", 0.0)),
                gamma=float(s.get("gamma", 1.0)),
                multiplicity=s.get("multiplicity", 1),
            )
            for s in doc["spins"]
        )
        j = doc["j_hz"]
    except (KeyError, TypeError) as exc:
        raise SpinSystemError(f"malformed spin-system document: {exc}") from exc
    return SpinSystem(spins, j, str(doc.get("provenance", "")))


def system_to_dict(system: SpinSystem) -> dict[str, Any]:
    return {
        "provenance": system.provenance,
        "spins": [
            {
                "label": s.label,
                "species": s.species,
                "shift_hz": s.shift_hz,
                "gamma": s.gamma,
                "multiplicity": s.multiplicity,
            }
            for s in system.spins
        ],
        "j_hz": system.j_hz.tolist(),
    }


def dumps_system(system: SpinSystem) -> str:
    return json.dumps(system_to_dict(system), indent=2)


def load_system(source: str | Path | Mapping[str, Any]) -> SpinSystem:
    """Load a spin system from a mapping, a JSON path, or a bundled config name."""
    if isinstance(source, Mapping):
        return system_from_dict(source)
    path = Path(source)
    if not path.exists():
        bundled = resources.files("nmrdj") / "data" / path.name
        if not path.suffix:
            bundled = resources.files("nmrdj") / "data" / f"{path.name}.json"
        if not bundled.is_file():
            raise SpinSystemError(f"no such spin-system file: {source}")
        text = bundled.read_text()
    else:
        text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpinSystemError(f"{source}: invalid JSON ({exc})") from exc
    return system_from_dict(doc)


def crotonic_acid() -> SpinSystem:
    return load_system("crotonic-acid")


def topology_of(system: SpinSystem) -> CouplingTopology:
    """Path graph over the chain order, carrying neighbour couplings."""
    couplings = {(k, k + 1): system.coupling(k, k + 1) for k in range(1, system.n)}
    return CouplingTopology(system.n, couplings)
