"""Command-line entry point.

    nmrdj verify   [--system PATH]
    nmrdj run      --oracle SEL [--system PATH] [--eps E] [--methyl-expand] [--output DIR]
    nmrdj compile  --oracle SEL [--system PATH] [--simplify] [--output DIR]
    nmrdj spectrum --oracle SEL [--system PATH] [--eps E] [--methyl-expand] [--output DIR]
    nmrdj walsh    --oracle SEL [--system PATH]

Oracle selectors: ``table1:f1`` .. ``table1:f9``, ``collins:N``,
``hex:DIGITS`` or ``hex:DIGITS:N`` (MSB-first truth table, f(0) first).

Exit status: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from .compiler import (
    CouplingTopology,
    compile_diagonal,
    compile_gates,
    dumps_sequence,
    sequence_stats,
    sequence_unitary,
    simplify,
)
from .oracle import (
    TABLE1_IDS,
    BooleanFunction,
    PromiseViolation,
    classify_operator,
    collins_family,
    eq3_factorization,
    phase_oracle,
    table1_operator,
)
from .qop import DiagonalSignOperator, global_phase_fidelity, walsh_transform
from .simulator import ImperfectionModel, dj_nmr_run, pure_dj_run
from .spins import SpinSystem, SpinSystemError, load_system, topology_of

DEFAULT_SYSTEM = "crotonic-acid"
FIDELITY_TOL = 1e-10


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def parse_oracle(selector: str) -> tuple[str, object]:
    """Split a selector into its kind and payload; raises UsageError."""
    kind, _, rest = selector.partition(":")
    if kind == "table1":
        if rest not in TABLE1_IDS:
            raise UsageError(f"unknown crotonic-acid operator {rest!r}; expected one of {', '.join(TABLE1_IDS)}")
        return kind, rest
    if kind == "collins":
        try:
            n = int(rest)
        except ValueError:
            raise UsageError(f"collins selector needs an integer, got {rest!r}") from None
        if not 2 <= n <= 12:
            raise UsageError("collins:N needs 2 <= N <= 12")
        return kind, n
    if kind == "hex":
        digits, _, n = rest.partition(":")
        try:
            return kind, BooleanFunction.from_hex(digits, int(n) if n else None)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError(f"unknown oracle selector {selector!r}")


def _system_for(args, n: int | None) -> SpinSystem:
    if args.system is not None:
        system = load_system(args.system)
    elif n is None or n == 7:
        system = load_system(DEFAULT_SYSTEM)
    else:
        system = SpinSystem.chain(n)
    if n is not None and system.n != n:
        raise ValueError(f"oracle acts on {n} qubits but the system has {system.n} spins")
    return system


def _resolve(args) -> tuple[str, DiagonalSignOperator, SpinSystem]:
    if not args.oracle:
        raise UsageError("an oracle selector is required (--oracle)")
    if len(args.oracle) > 1:
        raise UsageError(f"conflicting oracle selectors: {args.oracle}")
    kind, payload = parse_oracle(args.oracle[0])
    if kind == "table1":
        system = _system_for(args, 7)
        return args.oracle[0], table1_operator(payload, system.labels), system
    if kind == "collins":
        d = phase_oracle(collins_family(payload))
    else:
        d = phase_oracle(payload)
    return args.oracle[0], d, _system_for(args, d.n)


def _spectrum_csv(lines) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["spin", "frequency_hz", "re", "im", "phase_class"])
    for ln in lines:
        w.writerow([ln.spin, _fmt(ln.frequency_hz), _fmt(ln.amplitude.real),
                    _fmt(ln.amplitude.imag), ln.phase_class.value])
    return buf.getvalue()


def _write(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _run_nmr(args, d, system):
    return dj_nmr_run(d, system, ImperfectionModel(args.eps), methyl_expand=args.methyl_expand)


def cmd_verify(args) -> int:
    system = _system_for(args, 7)
    topo = topology_of(system)
    rows = []
    for tid in TABLE1_IDS:
        d = table1_operator(tid, system.labels)
        ps = compile_diagonal(d, topo)
        ps.check_topology(topo)
        rows.append((f"table1:{tid}", global_phase_fidelity(sequence_unitary(ps), d.matrix())))
    for n in range(2, 8):
        fac = eq3_factorization(n)
        ps = compile_gates(fac.gates, CouplingTopology.path(n), fac.global_phase)
        target = phase_oracle(collins_family(n)).matrix()
        rows.append((f"eq3:n={n}", global_phase_fidelity(sequence_unitary(ps), target)))
    print(f"{'operator':<12} fidelity")
    ok = True
    for name, fid in rows:
        print(f"{name:<12} {fid:.12f}")
        ok &= fid >= 1 - FIDELITY_TOL
    return 0 if ok else 1


def cmd_run(args) -> int:
    name, d, system = _resolve(args)
    result = _run_nmr(args, d, system)
    pure = pure_dj_run(d)
    report = {
        "oracle": name,
        "class": classify_operator(d).value,
        "verdict": result.verdict.value,
        "oracle_calls": result.oracle_calls,
        "emissive_lines": [
            {"spin": ln.spin, "frequency_hz": ln.frequency_hz,
             "re": ln.amplitude.real, "im": ln.amplitude.imag}
            for ln in result.emissive_lines
        ],
        "pure": {
            "outcome": pure.outcome,
            "probability": pure.probability,
            "verdict": pure.verdict.value,
            "oracle_calls": pure.oracle_calls,
        },
    }
    text = json.dumps(report, indent=2) + "\n"
    out = args.output
    _write(out, "report.json", text)
    _write(out, "sequence.txt", dumps_sequence(result.sequence))
    for label, lines in result.spectra.items():
        _write(out, f"spectrum_{label}.csv", _spectrum_csv(lines))
    print(f"NMR verdict: {result.verdict.value} (oracle calls: {result.oracle_calls}, "
          f"emissive lines: {len(result.emissive_lines)})")
    print(f"pure-state verdict: {pure.verdict.value} (outcome |{pure.outcome}>)")
    return 0


def cmd_compile(args) -> int:
    _, d, system = _resolve(args)
    topo = topology_of(system)
    ps = compile_diagonal(d, topo)
    if args.simplify:
        ps = simplify(ps, topo)
    stats = sequence_stats(ps, system)
    text = dumps_sequence(ps)
    _write(args.output, "sequence.txt", text)
    _write(args.output, "report.json", json.dumps(stats.as_dict(), indent=2) + "\n")
    if args.output is None:
        sys.stdout.write(text)
    for key, value in stats.as_dict().items():
        print(f"# {key}={value}")
    return 0


def cmd_spectrum(args) -> int:
    _, d, system = _resolve(args)
    result = _run_nmr(args, d, system)
    for label, lines in result.spectra.items():
        text = _spectrum_csv(lines)
        if args.output is None:
            sys.stdout.write(text)
        _write(args.output, f"spectrum_{label}.csv", text)
    return 0


def cmd_walsh(args) -> int:
    _, d, system = _resolve(args)
    for t in walsh_transform(d):
        spins = ",".join(system.labels[q - 1] for q in t.support) or "-"
        print(f"{t.coefficient:+.6f}  {spins}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nmrdj", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", help="spin-system JSON (default: bundled crotonic acid)")
    common.add_argument("--oracle", action="append", help="oracle selector")
    common.add_argument("--output", type=Path, help="directory for output files")
    common.add_argument("--eps", type=float, default=0.0, help="RF pulse-angle miscalibration")
    common.add_argument("--methyl-expand", action="store_true", help="split methyl spectators into quartets")
    for name, func in (("verify", cmd_verify), ("run", cmd_run), ("compile", cmd_compile),
                       ("spectrum", cmd_spectrum), ("walsh", cmd_walsh)):
        sp = sub.add_parser(name, parents=[common])
        sp.set_defaults(func=func)
        if name == "compile":
            sp.add_argument("--simplify", action="store_true", help="run the peephole pass")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if not abs(args.eps) < 0.5:
            raise UsageError("--eps must satisfy |eps| < 0.5")
        return args.func(args)
    except UsageError as exc:
        print(f"nmrdj: error: {exc}", file=sys.stderr)
        return 2
    except (SpinSystemError, PromiseViolation, ValueError, OSError) as exc:
        print(f"nmrdj: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
