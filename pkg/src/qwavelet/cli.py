"""Command-line front end: ``qwavelet build|sim|verify|count|factor|matrix``."""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import builders, classical, qcformat, simulator
from .circuit import Circuit, CircuitError, GateCountReport, count_gates, validate
from .decompose import decompose_to_elementary
from .plan import PlanError, TransformPlan, two_adic_valuation
from .qcformat import fmt_float
from .words import SplitWord

EXIT_FAIL, EXIT_CONFIG, EXIT_BUILD, EXIT_SIGNAL, EXIT_DIMENSION, EXIT_TOO_BIG = 1, 2, 3, 4, 5, 6
KINDS = ("walsh", "increment", "decrement", "packet", "pyramid")
MATRIX_VERIFY_LIMIT = 6


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class Target:
    """A circuit plus what is known about the transform it implements."""

    circuit: Circuit
    kind: str | None = None
    plan: TransformPlan | None = None
    pair: classical.QmfPair | None = None
    length: int | None = None  # meaningful inputs are 0..length-1


def _is_pow2(m: int) -> bool:
    return m > 0 and m & (m - 1) == 0


def _length(args) -> int:
    if args.length is not None:
        if args.length < 1:
            raise CliError("--length must be positive", EXIT_CONFIG)
        if args.qubits is not None and (args.length - 1).bit_length() != args.qubits:
            raise CliError(f"--length {args.length} needs {(args.length - 1).bit_length()} "
                           f"qubits, not {args.qubits}", EXIT_CONFIG)
        return args.length
    if args.qubits is None:
        raise CliError("give --qubits or --length", EXIT_CONFIG)
    if args.qubits < 1:
        raise CliError("--qubits must be positive", EXIT_CONFIG)
    return 1 << args.qubits


def _filter(args, period: int) -> tuple[SplitWord, classical.QmfPair]:
    name = args.filter or "haar"
    if name in classical.NAMED_FILTERS:
        word = classical.named_word(name)
        return word, classical.extract_qmf(word, period)
    path = Path(name)
    if not path.exists():
        raise CliError(f"unknown filter {name!r} (not a named filter or a file)", EXIT_CONFIG)
    try:
        pair = classical.load_filter(path, period)
        word = classical.word_for_pair(pair)
    except classical.LatticeError as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    except classical.OracleError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    return word, pair


def _make_target(args) -> Target:
    kind = args.kind
    if kind is None:
        raise CliError(f"give a transform kind ({', '.join(KINDS)}) or --circuit", EXIT_CONFIG)
    length = _length(args)
    try:
        if kind == "walsh":
            if not _is_pow2(length):
                raise CliError("walsh needs a power-of-two length", EXIT_CONFIG)
            n = length.bit_length() - 1
            return Target(builders.build_walsh_hadamard(n), kind, length=length)
        if kind in ("increment", "decrement"):
            if _is_pow2(length):
                n = length.bit_length() - 1
                build = (builders.build_increment_pow2 if kind == "increment"
                         else builders.build_decrement_pow2)
                return Target(build(n), kind, length=length)
            build = (builders.build_increment_mod if kind == "increment"
                     else builders.build_decrement_mod)
            return Target(build(length), kind, length=length)
        depth = args.depth if args.depth is not None else two_adic_valuation(length)
        plan = TransformPlan(kind, depth, length, args.ordering)
    except (PlanError, classical.OracleError) as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    except (builders.BuildError, CircuitError) as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    word, pair = _filter(args, length)
    try:
        circuit = builders.build_transform(plan, word)
    except (builders.BuildError, CircuitError) as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    return Target(circuit, kind, plan, pair, length)


def _load_circuit(path) -> Circuit:
    try:
        circuit = qcformat.load(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_CONFIG) from None
    except qcformat.FormatError as exc:
        raise CliError(f"{path}: {exc}", EXIT_CONFIG) from None
    problems = validate(circuit)
    if problems:
        raise CliError(f"{path}: " + "; ".join(problems), EXIT_CONFIG)
    return circuit


def _target(args, circuit_path) -> Target:
    """Kind/size flags describe the transform; a circuit file, if given, replaces
    the freshly built circuit (so it can be checked against that description)."""
    if circuit_path is None:
        return _make_target(args)
    circuit = _load_circuit(circuit_path)
    if args.kind is None:
        return Target(circuit, length=1 << circuit.n_data)
    target = _make_target(args)
    if circuit.n_data != target.circuit.n_data:
        raise CliError(f"circuit has {circuit.n_data} data qubits, expected "
                       f"{target.circuit.n_data}", EXIT_DIMENSION)
    target.circuit = circuit
    return target


def _reference(target: Target) -> np.ndarray:
    """Expected matrix on the first ``length`` inputs, as 2^n x length."""
    n, length = target.circuit.n_data, target.length
    ref = np.zeros((1 << n, length), dtype=complex)
    if target.kind == "walsh":
        h = np.array([[1.0]])
        for _ in range(n):
            h = np.kron(np.array([[1, 1], [1, -1]]) / np.sqrt(2), h)
        ref[:, :] = h
    elif target.kind in ("increment", "decrement"):
        step = 1 if target.kind == "increment" else -1
        m = np.arange(length)
        ref[(m + step) % length, m] = 1
    elif target.plan is not None:
        plan = TransformPlan(target.plan.kind, target.plan.depth, target.plan.length)
        ref[:length] = classical.transform_matrix(plan, target.pair)
    else:
        raise CliError("verify needs a transform kind", EXIT_CONFIG)
    return ref


def _emit(text: str, out) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _summary(report: GateCountReport) -> str:
    return report.format() + "\n"


def cmd_build(args) -> int:
    target = _make_target(args)
    if args.out is None:
        sys.stdout.write(qcformat.serialize(target.circuit))
        return 0
    qcformat.save(target.circuit, args.out)
    sys.stdout.write(_summary(count_gates(target.circuit)))
    return 0


def _read_signal(path, n_data: int, length: int) -> np.ndarray:
    try:
        signal = simulator.read_signal_csv(path)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_SIGNAL) from None
    except ValueError as exc:
        raise CliError(f"malformed signal: {exc}", EXIT_SIGNAL) from None
    if signal.size != 1 << n_data:
        raise CliError(f"signal has {signal.size} entries, expected {1 << n_data}",
                       EXIT_DIMENSION)
    outside = np.flatnonzero(signal[length:])
    if outside.size:
        raise CliError(f"signal entry {length + outside[0]} is nonzero but the transform "
                       f"length is {length}", EXIT_SIGNAL)
    return signal


def cmd_sim(args) -> int:
    if args.input is None:
        raise CliError("sim needs --in <signal.csv>", EXIT_CONFIG)
    target = _target(args, args.circuit)
    signal = _read_signal(args.input, target.circuit.n_data, target.length)
    try:
        out = simulator.simulate(target.circuit, signal)
    except simulator.SimulationError as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    out = out[: target.length]
    if target.plan is not None and args.ordering == "subband":
        out = classical.to_subband(target.plan, out)
    text = "".join(f"{fmt_float(z.real)},{fmt_float(z.imag)}\n" for z in out)
    _emit(text, args.out)
    return 0


def cmd_verify(args) -> int:
    target = _target(args, args.input or args.circuit)
    ref = _reference(target)
    circuit, length = target.circuit, target.length
    try:
        if circuit.n_data <= MATRIX_VERIFY_LIMIT:
            got = simulator.extract_matrix(circuit, columns=length)
            err = np.abs(got - ref)
            col = int(np.argmax(err.max(axis=0)))
            label = "basis column"
        else:
            rng = np.random.default_rng(0)
            sig = np.zeros((1 << circuit.n_data, 8), dtype=complex)
            sig[:length] = rng.normal(size=(length, 8)) + 1j * rng.normal(size=(length, 8))
            got = simulator.simulate(circuit, sig)
            err = np.abs(got - ref @ sig[:length])
            col = int(np.argmax(err.max(axis=0)))
            label = "test signal"
    except simulator.SimulationError as exc:
        sys.stderr.write(f"FAIL: {exc}\n")
        return EXIT_FAIL
    residual = float(err.max())
    if residual <= args.tol:
        sys.stdout.write(f"PASS max residual {residual:.3e} (tol {args.tol:g})\n")
        return 0
    sys.stderr.write(f"FAIL max residual {residual:.3e} (tol {args.tol:g}) "
                     f"at {label} {col}\n")
    return EXIT_FAIL


def cmd_count(args) -> int:
    target = _target(args, args.input or args.circuit)
    circuit = target.circuit
    if args.elementary:
        circuit = decompose_to_elementary(circuit)
    report = count_gates(circuit)
    text = _summary(report)
    if target.kind == "increment" and target.length and _is_pow2(target.length):
        carry = builders.increment_carry_stage(circuit.n_data)
        carry_tof = count_gates(carry).toffoli
        text += f"{'carry-stage toffoli':<22}{carry_tof:>16d}\n"
        text += f"{'cleanup toffoli':<22}{count_gates(target.circuit).toffoli - carry_tof:>16d}\n"
    sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    return 0


def cmd_factor(args) -> int:
    name = args.filter or "haar"
    try:
        if name in classical.NAMED_FILTERS:
            pair = classical.named_pair(name, 4 if name == "d4" else 2)
        else:
            pair = classical.load_filter(name)
        fact = classical.lattice_factor(pair)
    except OSError as exc:
        raise CliError(f"cannot read {name}: {exc.strerror}", EXIT_CONFIG) from None
    except classical.LatticeError as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    except classical.OracleError as exc:
        raise CliError(str(exc), EXIT_CONFIG) from None
    lines = [fmt_float(a) for a in fact.angles]
    lines.append(f"# shift={fact.shift} alpha_sign={fact.alpha_sign} "
                 f"beta_sign={fact.beta_sign}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_matrix(args) -> int:
    target = _target(args, args.input or args.circuit)
    if target.circuit.n_data > simulator.MAX_MATRIX_QUBITS:
        raise CliError(f"{target.circuit.n_data} data qubits is too many for a dense matrix",
                       EXIT_TOO_BIG)
    try:
        matrix = simulator.extract_matrix(target.circuit)
    except simulator.SimulationError as exc:
        raise CliError(str(exc), EXIT_BUILD) from None
    _emit(simulator.format_matrix_csv(matrix), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwavelet",
        description="Build, simulate and verify quantum wavelet and wavelet-packet circuits.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, kind=True):
        if kind:
            p.add_argument("kind", nargs="?", choices=KINDS)
        p.add_argument("--qubits", type=int)
        p.add_argument("--length", type=int, help="signal period 2N")
        p.add_argument("--depth", type=int)
        p.add_argument("--filter", help="haar, d4 or a filter file")
        p.add_argument("--ordering", choices=("interleaved", "subband"), default="interleaved")
        p.add_argument("--out", "-o")

    p = sub.add_parser("build", help="write a circuit file")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("sim", help="run a signal through a circuit")
    common(p)
    p.add_argument("--in", dest="input", help="signal CSV (re,im per line)")
    p.add_argument("--circuit", help="circuit file instead of building one")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("verify", help="compare a circuit with the classical oracle")
    common(p)
    p.add_argument("--in", dest="input", help="circuit file to check")
    p.add_argument("--circuit", help="same as --in")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("count", help="gate counts")
    common(p)
    p.add_argument("--in", dest="input", help="circuit file")
    p.add_argument("--circuit", help="same as --in")
    p.add_argument("--elementary", action="store_true",
                   help="tabulate the circuit after decomposition to elementary gates")
    p.add_argument("--csv", help="also write the table as CSV")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("factor", help="lattice angles of a filter pair")
    p.add_argument("--filter", default="haar")
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("matrix", help="dump the circuit matrix as CSV")
    common(p)
    p.add_argument("--in", dest="input", help="circuit file")
    p.add_argument("--circuit", help="same as --in")
    p.set_defaults(func=cmd_matrix)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write(f"qwavelet: {exc}\n")
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
