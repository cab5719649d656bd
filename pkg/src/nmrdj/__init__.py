"""Deutsch-Jozsa phase oracles compiled to nearest-neighbour NMR pulse sequences."""

from .compiler import (
    RF,
    ZZ,
    CouplingTopology,
    PulseSequence,
    compile_cnot,
    compile_diagonal,
    compile_parity_phase,
    compile_swap,
    sequence_stats,
    sequence_unitary,
    simplify,
)
from .oracle import (
    BooleanFunction,
    FunctionClass,
    classify,
    collins_family,
    eq3_factorization,
    phase_oracle,
    table1_operator,
)
from .qop import (
    DiagonalSignOperator,
    ParityPhaseGate,
    ParityTerm,
    global_phase_fidelity,
    kron_chain,
    parity_phase_unitary,
    walsh_reconstruct,
    walsh_transform,
)
from .simulator import ImperfectionModel, Verdict, dj_nmr_run, pure_dj_run, readout_spectrum, thermal_state
from .spins import Spin, SpinSystem, load_system, topology_of

__version__ = "0.1.0"
