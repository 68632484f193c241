"""Dense statevector simulation.

Amplitude ``m`` belongs to the basis state whose bit ``i`` is qubit ``i``;
data qubits occupy the low bits and ancillas the bits above them. States may
be 1-D vectors or 2-D arrays whose columns are simulated together.
"""
from __future__ import annotations

import numpy as np

from .circuit import Circuit, Gate, check

MAX_MATRIX_QUBITS = 10
ANCILLA_TOL = 1e-10
_CHUNK_ENTRIES = 1 << 22


class SimulationError(ValueError):
    pass


def _gate_pairs(circuit: Circuit, gate: Gate, dim: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(dim)
    t = circuit.bit(gate.target)
    sel = (idx >> t) & 1 == 0
    for c in gate.controls:
        sel &= (idx >> circuit.bit(c.qubit)) & 1 == int(c.positive)
    i0 = idx[sel]
    return i0, i0 | (1 << t)


def apply_gate(state: np.ndarray, circuit: Circuit, gate: Gate) -> None:
    """Apply one gate of ``circuit`` to ``state`` in place."""
    i0, i1 = _gate_pairs(circuit, gate, state.shape[0])
    a0, a1 = state[i0], state[i1]
    if gate.kind == "X":
        state[i0], state[i1] = a1, a0
        return
    m = gate.unitary()
    state[i0] = m[0, 0] * a0 + m[0, 1] * a1
    state[i1] = m[1, 0] * a0 + m[1, 1] * a1


def apply_circuit(state: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Return ``circuit`` applied to ``state`` (length 2**(n_data + n_ancilla))."""
    check(circuit)
    out = np.array(state, dtype=complex)
    if out.shape[0] != 1 << circuit.n_qubits:
        raise SimulationError(
            f"state has {out.shape[0]} amplitudes, circuit needs {1 << circuit.n_qubits}")
    for g in circuit.gates:
        apply_gate(out, circuit, g)
    return out


def embed(data_state: np.ndarray, circuit: Circuit) -> np.ndarray:
    """Pad a data-register state with ancillas in |0>."""
    data_state = np.asarray(data_state, dtype=complex)
    if data_state.shape[0] != 1 << circuit.n_data:
        raise SimulationError(
            f"signal has {data_state.shape[0]} entries, expected {1 << circuit.n_data}")
    full = np.zeros((1 << circuit.n_qubits,) + data_state.shape[1:], dtype=complex)
    full[: data_state.shape[0]] = data_state
    return full


def simulate(circuit: Circuit, data_state: np.ndarray, *, tol: float = ANCILLA_TOL) -> np.ndarray:
    """Run on a data-register state and return the data amplitudes.

    Raises :class:`SimulationError` if any ancilla is left away from |0>.
    """
    out = apply_circuit(embed(data_state, circuit), circuit)
    d = 1 << circuit.n_data
    leak = np.max(np.abs(out[d:]), initial=0.0)
    if leak > tol:
        raise SimulationError(f"ancilla not restored (leaked amplitude {leak:.3g})")
    return out[:d]


def extract_matrix(circuit: Circuit, *, columns: int | None = None,
                   tol: float = ANCILLA_TOL) -> np.ndarray:
    """Matrix of ``circuit`` on the data register, ancillas in and out |0>.

    ``columns`` limits extraction to the first basis inputs, for circuits
    (general-modulus translations) that only promise behaviour on |0>..|2N-1>.
    """
    if circuit.n_data > MAX_MATRIX_QUBITS:
        raise SimulationError(
            f"{circuit.n_data} data qubits exceeds the matrix limit of {MAX_MATRIX_QUBITS}")
    d = 1 << circuit.n_data
    k = d if columns is None else columns
    if not 0 < k <= d:
        raise SimulationError(f"columns must be in 1..{d}, got {k}")
    chunk = max(1, min(k, _CHUNK_ENTRIES >> circuit.n_qubits))
    result = np.empty((d, k), dtype=complex)
    for start in range(0, k, chunk):
        stop = min(k, start + chunk)
        cols = np.zeros((d, stop - start), dtype=complex)
        cols[np.arange(start, stop), np.arange(stop - start)] = 1
        result[:, start:stop] = simulate(circuit, cols, tol=tol)
    return result


def basis_map(circuit: Circuit, inputs=None) -> dict[int, int]:
    """For permutation circuits: map each input basis index to its image.

    Raises if an image is not a single basis state of the data register.
    """
    d = 1 << circuit.n_data
    inputs = range(d) if inputs is None else list(inputs)
    out = {}
    for m in inputs:
        v = np.zeros(d, dtype=complex)
        v[m] = 1
        r = simulate(circuit, v)
        k = int(np.argmax(np.abs(r)))
        if abs(abs(r[k]) - 1) > ANCILLA_TOL:
            raise SimulationError(f"basis state {m} is not mapped to a basis state")
        out[m] = k
    return out


def format_matrix_csv(matrix: np.ndarray) -> str:
    """One line per row, entries ``re+imj`` separated by commas."""
    from .qcformat import fmt_float

    def cell(z: complex) -> str:
        im = fmt_float(z.imag)
        sign = "" if im.startswith("-") else "+"
        return f"{fmt_float(z.real)}{sign}{im}j"

    return "".join(",".join(cell(z) for z in row) + "\n"
                   for row in np.asarray(matrix, dtype=complex))


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix_csv(matrix))


def read_matrix_csv(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        rows = [[complex(tok) for tok in line.strip().split(",")] for line in fh if line.strip()]
    return np.array(rows, dtype=complex)


def read_signal_csv(path) -> np.ndarray:
    """Read ``re,im`` lines; raises ValueError on malformed input."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 're,im'")
            values.append(complex(float(parts[0]), float(parts[1])))
    return np.array(values, dtype=complex)


def write_signal_csv(values: np.ndarray, path) -> None:
    from .qcformat import fmt_float

    with open(path, "w", encoding="utf-8") as fh:
        for z in np.asarray(values, dtype=complex):
            fh.write(f"{fmt_float(z.real)},{fmt_float(z.imag)}\n")
