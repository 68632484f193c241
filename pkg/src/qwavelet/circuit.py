"""Gate-level intermediate representation.

A :class:`Circuit` is an immutable, ordered list of single-target gates acting
on ``n_data`` data qubits and ``n_ancilla`` helper qubits. Gates apply first to
last, each one left-multiplying the state vector. Qubit 0 is the least
significant bit of a basis index.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

UNITARY_TOL = 1e-12

_SQRT1_2 = 1 / math.sqrt(2)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=complex)
H_MATRIX = np.array([[_SQRT1_2, _SQRT1_2], [_SQRT1_2, -_SQRT1_2]], dtype=complex)


def rot_matrix(theta: float) -> np.ndarray:
    """Real rotation ``[[cos, sin], [-sin, cos]]``."""
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, s], [-s, c]], dtype=complex)


class CircuitError(ValueError):
    """Raised for invalid circuits or incompatible circuit operations."""


class Role(Enum):
    DATA = "data"
    ANCILLA = "ancilla"


@dataclass(frozen=True, order=True)
class Qubit:
    index: int
    role: Role = Role.DATA

    @property
    def is_ancilla(self) -> bool:
        return self.role is Role.ANCILLA

    def __str__(self) -> str:
        return f"a{self.index}" if self.is_ancilla else str(self.index)


def data(index: int) -> Qubit:
    return Qubit(index, Role.DATA)


def anc(index: int) -> Qubit:
    return Qubit(index, Role.ANCILLA)


@dataclass(frozen=True)
class Control:
    """A control condition; ``positive=False`` fires when the qubit is |0>."""

    qubit: Qubit
    positive: bool = True

    def __str__(self) -> str:
        return ("+" if self.positive else "-") + str(self.qubit)


def pos(q: Qubit | int) -> Control:
    return Control(q if isinstance(q, Qubit) else data(q), True)


def neg(q: Qubit | int) -> Control:
    return Control(q if isinstance(q, Qubit) else data(q), False)


@dataclass(frozen=True)
class Gate:
    """Single-target gate with zero or more (possibly negative) controls.

    ``kind`` is one of ``"X"``, ``"H"``, ``"R"`` (real rotation by ``theta``)
    and ``"U2"`` (arbitrary 2x2 matrix stored row-major in ``matrix``).
    """

    kind: str
    target: Qubit
    controls: tuple[Control, ...] = ()
    theta: float | None = None
    matrix: tuple[complex, ...] | None = None

    @classmethod
    def x(cls, target: Qubit, controls: Iterable[Control] = ()) -> Gate:
        return cls("X", target, tuple(controls))

    @classmethod
    def h(cls, target: Qubit, controls: Iterable[Control] = ()) -> Gate:
        return cls("H", target, tuple(controls))

    @classmethod
    def rot(cls, theta: float, target: Qubit, controls: Iterable[Control] = ()) -> Gate:
        return cls("R", target, tuple(controls), theta=float(theta))

    @classmethod
    def u2(cls, m, target: Qubit, controls: Iterable[Control] = ()) -> Gate:
        flat = tuple(complex(v) for v in np.asarray(m, dtype=complex).reshape(4))
        return cls("U2", target, tuple(controls), matrix=flat)

    def unitary(self) -> np.ndarray:
        """The 2x2 matrix applied to the target."""
        if self.kind == "X":
            return X_MATRIX.copy()
        if self.kind == "H":
            return H_MATRIX.copy()
        if self.kind == "R":
            return rot_matrix(self.theta)
        if self.kind == "U2":
            return np.array(self.matrix, dtype=complex).reshape(2, 2)
        raise CircuitError(f"unknown gate kind {self.kind!r}")

    def adjoint(self) -> Gate:
        if self.kind in ("X", "H"):
            return self
        if self.kind == "R":
            return Gate("R", self.target, self.controls, theta=-self.theta)
        m = self.unitary().conj().T
        return Gate.u2(m, self.target, self.controls)

    def with_controls(self, extra: Iterable[Control]) -> Gate:
        return Gate(self.kind, self.target, self.controls + tuple(extra),
                    theta=self.theta, matrix=self.matrix)

    def qubits(self) -> tuple[Qubit, ...]:
        return (self.target,) + tuple(c.qubit for c in self.controls)


@dataclass(frozen=True)
class Circuit:
    n_data: int
    n_ancilla: int = 0
    gates: tuple[Gate, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    @property
    def n_qubits(self) -> int:
        return self.n_data + self.n_ancilla

    def bit(self, q: Qubit) -> int:
        """Position of ``q`` in a basis index; ancillas sit above the data."""
        return self.n_data + q.index if q.is_ancilla else q.index

    def with_ancillas(self, n_ancilla: int) -> Circuit:
        return Circuit(self.n_data, max(self.n_ancilla, n_ancilla), self.gates)

    def inverse(self) -> Circuit:
        return invert(self)

    def __add__(self, other: Circuit) -> Circuit:
        return compose(self, other)


def circuit_from_gates(n_data: int, gates: Sequence[Gate]) -> Circuit:
    """Build a circuit with just enough ancillas for the referenced indices."""
    n_anc = 0
    for g in gates:
        for q in g.qubits():
            if q.is_ancilla:
                n_anc = max(n_anc, q.index + 1)
    return Circuit(n_data, n_anc, tuple(gates))


def validate(circuit: Circuit) -> list[str]:
    """Return the list of invariant violations; empty when the circuit is valid."""
    problems: list[str] = []
    if circuit.n_data < 0 or circuit.n_ancilla < 0:
        problems.append("negative qubit count")
    for i, g in enumerate(circuit.gates):
        where = f"gate {i} ({g.kind})"
        if g.kind not in ("X", "H", "R", "U2"):
            problems.append(f"{where}: unknown kind")
            continue
        for q in g.qubits():
            limit = circuit.n_ancilla if q.is_ancilla else circuit.n_data
            if not 0 <= q.index < limit:
                problems.append(f"{where}: qubit {q} out of range")
        ctrl_qubits = [c.qubit for c in g.controls]
        if g.target in ctrl_qubits:
            problems.append(f"{where}: target in controls")
        if len(set(ctrl_qubits)) != len(ctrl_qubits):
            problems.append(f"{where}: duplicate control")
        if g.kind == "R" and (g.theta is None or not math.isfinite(g.theta)):
            problems.append(f"{where}: rotation angle missing or not finite")
        if g.kind == "U2":
            if g.matrix is None or len(g.matrix) != 4:
                problems.append(f"{where}: matrix must have 4 entries")
                continue
            m = g.unitary()
            if not np.all(np.isfinite(m)):
                problems.append(f"{where}: non-finite matrix entry")
            elif np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
                problems.append(f"{where}: non-unitary")
    return problems


def check(circuit: Circuit) -> Circuit:
    problems = validate(circuit)
    if problems:
        raise CircuitError("invalid circuit: " + "; ".join(problems))
    return circuit


def invert(circuit: Circuit) -> Circuit:
    """Reverse the gate order and take the adjoint of every gate."""
    check(circuit)
    return Circuit(circuit.n_data, circuit.n_ancilla,
                   tuple(g.adjoint() for g in reversed(circuit.gates)))


def compose(*circuits: Circuit) -> Circuit:
    """Apply the circuits in order; ancillas are shared, so the count is the max."""
    if not circuits:
        raise CircuitError("compose needs at least one circuit")
    n_data = circuits[0].n_data
    for c in circuits[1:]:
        if c.n_data != n_data:
            raise CircuitError(f"data width mismatch: {n_data} vs {c.n_data}")
    gates = tuple(g for c in circuits for g in c.gates)
    return Circuit(n_data, max(c.n_ancilla for c in circuits), gates)


def add_controls(circuit: Circuit, controls: Sequence[Control]) -> Circuit:
    """Condition every gate on ``controls``."""
    return Circuit(circuit.n_data, circuit.n_ancilla,
                   tuple(g.with_controls(controls) for g in circuit.gates))


KINDS = ("X", "H", "R", "U2")
CONTROL_BUCKETS = (0, 1, 2, 3)  # 3 stands for "three or more"


@dataclass(frozen=True)
class GateCountReport:
    counts: dict[tuple[str, int], int]
    elementary_total: int

    def get(self, kind: str, n_controls: int) -> int:
        return self.counts.get((kind, min(n_controls, 3)), 0)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def toffoli(self) -> int:
        """Doubly-controlled NOT gates."""
        return self.get("X", 2)

    def rows(self) -> list[tuple[str, int, int, int, int]]:
        return [(k, *(self.get(k, b) for b in CONTROL_BUCKETS)) for k in KINDS]

    def format(self) -> str:
        lines = [f"{'kind':<6}{'c=0':>8}{'c=1':>8}{'c=2':>8}{'c>=3':>8}"]
        for kind, *vals in self.rows():
            lines.append(f"{kind:<6}" + "".join(f"{v:>8d}" for v in vals))
        lines.append(f"{'logical total':<22}{self.total:>16d}")
        lines.append(f"{'elementary total':<22}{self.elementary_total:>16d}")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["kind,c0,c1,c2,c3plus"]
        lines += [",".join(str(v) for v in row) for row in self.rows()]
        lines.append(f"elementary_total,{self.elementary_total},,,")
        return "\n".join(lines) + "\n"


def _logical_counts(circuit: Circuit) -> dict[tuple[str, int], int]:
    return dict(Counter((g.kind, min(len(g.controls), 3)) for g in circuit.gates))


def count_gates(circuit: Circuit) -> GateCountReport:
    from .decompose import decompose_to_elementary

    check(circuit)
    return GateCountReport(_logical_counts(circuit),
                           len(decompose_to_elementary(circuit).gates))
