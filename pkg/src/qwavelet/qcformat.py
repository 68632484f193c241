"""Line-oriented text format for circuits.

::

    qubits 3
    ancilla 1
    H t=0
    X t=a0 c=+0,+1
    R theta=0.78539816339744828 t=2 c=-0
    U2 m=1,0,0,0,0,0,1,0 t=1

Floats are written with 17 significant digits so parsing is exact.
"""
from __future__ import annotations

from pathlib import Path

from .circuit import Circuit, Control, Gate, Qubit, anc, data


class FormatError(ValueError):
    pass


def fmt_float(x: float) -> str:
    return format(float(x), ".17g")


def _qubit_token(q: Qubit) -> str:
    return str(q)


def _parse_qubit(tok: str) -> Qubit:
    if tok.startswith("a"):
        return anc(int(tok[1:]))
    return data(int(tok))


def _gate_line(g: Gate) -> str:
    parts = [g.kind]
    if g.kind == "R":
        parts.append(f"theta={fmt_float(g.theta)}")
    elif g.kind == "U2":
        flat = []
        for z in g.matrix:
            flat += [fmt_float(z.real), fmt_float(z.imag)]
        parts.append("m=" + ",".join(flat))
    parts.append(f"t={_qubit_token(g.target)}")
    if g.controls:
        parts.append("c=" + ",".join(str(c) for c in g.controls))
    return " ".join(parts)


def serialize(circuit: Circuit) -> str:
    lines = [f"qubits {circuit.n_data}", f"ancilla {circuit.n_ancilla}"]
    lines += [_gate_line(g) for g in circuit.gates]
    return "\n".join(lines) + "\n"


def _parse_gate(tokens: list[str], lineno: int) -> Gate:
    kind, fields = tokens[0], {}
    for tok in tokens[1:]:
        key, sep, value = tok.partition("=")
        if not sep or key in fields:
            raise FormatError(f"line {lineno}: bad token {tok!r}")
        fields[key] = value
    try:
        target = _parse_qubit(fields.pop("t"))
        controls = ()
        if "c" in fields:
            controls = tuple(
                Control(_parse_qubit(c[1:]), c[0] == "+") if c[0] in "+-"
                else _bad(c) for c in fields.pop("c").split(","))
        if kind in ("X", "H"):
            gate = Gate(kind, target, controls)
        elif kind == "R":
            gate = Gate.rot(float(fields.pop("theta")), target, controls)
        elif kind == "U2":
            vals = [float(v) for v in fields.pop("m").split(",")]
            if len(vals) != 8:
                raise ValueError("U2 needs 8 floats")
            m = [complex(vals[i], vals[i + 1]) for i in range(0, 8, 2)]
            gate = Gate("U2", target, controls, matrix=tuple(m))
        else:
            raise ValueError(f"unknown gate {kind!r}")
    except (KeyError, ValueError, IndexError) as exc:
        raise FormatError(f"line {lineno}: {exc}") from None
    if fields:
        raise FormatError(f"line {lineno}: unexpected fields {sorted(fields)}")
    return gate


def _bad(tok: str):
    raise ValueError(f"control {tok!r} needs a + or - prefix")


def parse(text: str) -> Circuit:
    header: dict[str, int] = {}
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(header) < 2:
            expected = "qubits" if not header else "ancilla"
            if tokens[0] != expected or len(tokens) != 2:
                raise FormatError(f"line {lineno}: expected '{expected} <count>'")
            try:
                header[expected] = int(tokens[1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad count {tokens[1]!r}") from None
            continue
        gates.append(_parse_gate(tokens, lineno))
    if len(header) < 2:
        raise FormatError("missing 'qubits'/'ancilla' header")
    return Circuit(header["qubits"], header["ancilla"], tuple(gates))


def save(circuit: Circuit, path: str | Path) -> None:
    Path(path).write_text(serialize(circuit), encoding="utf-8")


def load(path: str | Path) -> Circuit:
    return parse(Path(path).read_text(encoding="utf-8"))
