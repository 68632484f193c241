"""Lowering to the elementary set {uncontrolled single-qubit gate, CNOT}.

* negative controls are conjugated with X on the control qubit;
* a doubly-controlled NOT becomes the standard 15-gate Clifford+T network
  (:data:`TOFFOLI_COST`);
* a singly-controlled U != X becomes a phase on the control plus the
  A-CNOT-B-CNOT-C construction from a ZYZ Euler decomposition;
* more controls are first folded into a chain of Toffolis on fresh ancillas,
  which are uncomputed afterwards.

Fresh ancillas are appended after the circuit's own and shared between gates.
"""
from __future__ import annotations

import cmath
import math

import numpy as np

from .circuit import Circuit, Control, Gate, Qubit, anc, check

TOFFOLI_COST = 15

_T = np.diag([1, cmath.exp(1j * math.pi / 4)])
_TDG = _T.conj()


def is_elementary(g: Gate) -> bool:
    if not g.controls:
        return True
    return g.kind == "X" and len(g.controls) == 1 and g.controls[0].positive


def _cx(c: Qubit, t: Qubit) -> Gate:
    return Gate.x(t, (Control(c),))


def _toffoli(a: Qubit, b: Qubit, t: Qubit) -> list[Gate]:
    return [
        Gate.h(t),
        _cx(b, t), Gate.u2(_TDG, t),
        _cx(a, t), Gate.u2(_T, t),
        _cx(b, t), Gate.u2(_TDG, t),
        _cx(a, t), Gate.u2(_T, b), Gate.u2(_T, t), Gate.h(t),
        _cx(a, b), Gate.u2(_T, a), Gate.u2(_TDG, b),
        _cx(a, b),
    ]


def _rz(phi: float) -> np.ndarray:
    return np.diag([cmath.exp(-0.5j * phi), cmath.exp(0.5j * phi)])


def _ry(gamma: float) -> np.ndarray:
    c, s = math.cos(gamma / 2), math.sin(gamma / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def zyz(u: np.ndarray) -> tuple[float, float, float, float]:
    """Return ``(phase, beta, gamma, delta)`` with u = e^{i phase} Rz(beta) Ry(gamma) Rz(delta)."""
    phase = cmath.phase(np.linalg.det(u)) / 2
    w = u * cmath.exp(-1j * phase)
    a, b = w[0, 0], w[1, 0]
    gamma = 2 * math.atan2(abs(b), abs(a))
    s = -2 * cmath.phase(a) if abs(a) > 1e-15 else 0.0   # beta + delta
    d = 2 * cmath.phase(b) if abs(b) > 1e-15 else 0.0     # beta - delta
    if abs(a) <= 1e-15:
        s = -d
    if abs(b) <= 1e-15:
        d = 0.0
    return phase, (s + d) / 2, gamma, (s - d) / 2


def _controlled_u(u: np.ndarray, c: Qubit, t: Qubit) -> list[Gate]:
    phase, beta, gamma, delta = zyz(u)
    a_m = _rz(beta) @ _ry(gamma / 2)
    b_m = _ry(-gamma / 2) @ _rz(-(delta + beta) / 2)
    c_m = _rz((delta - beta) / 2)
    out = [Gate.u2(c_m, t), _cx(c, t), Gate.u2(b_m, t), _cx(c, t), Gate.u2(a_m, t)]
    if abs(phase) > 0:
        out.insert(0, Gate.u2(np.diag([1, cmath.exp(1j * phase)]), c))
    return out


def _lower(g: Gate, scratch: list[Qubit]) -> list[Gate]:
    if is_elementary(g):
        return [g]
    flips = [Gate.x(c.qubit) for c in g.controls if not c.positive]
    ctrl = [c.qubit for c in g.controls]
    t = g.target
    if g.kind == "X":
        if len(ctrl) == 1:
            body = [_cx(ctrl[0], t)]
        elif len(ctrl) == 2:
            body = _toffoli(ctrl[0], ctrl[1], t)
        else:
            chain, last = _and_chain(ctrl[:-1], scratch)
            body = chain + _toffoli(ctrl[-1], last, t) + _uncompute(chain)
    else:
        u = g.unitary()
        if len(ctrl) == 1:
            body = _controlled_u(u, ctrl[0], t)
        else:
            chain, last = _and_chain(ctrl, scratch)
            body = chain + _controlled_u(u, last, t) + _uncompute(chain)
    return flips + body + flips


def _and_chain(ctrl: list[Qubit], scratch: list[Qubit]) -> tuple[list[Gate], Qubit]:
    """Toffoli ladder leaving the AND of ``ctrl`` (len >= 2) on a scratch qubit."""
    gates: list[Gate] = []
    acc = ctrl[0]
    for i, q in enumerate(ctrl[1:]):
        gates.extend(_toffoli(acc, q, scratch[i]))
        acc = scratch[i]
    return gates, acc


def _uncompute(chain: list[Gate]) -> list[Gate]:
    return [g.adjoint() for g in reversed(chain)]


def scratch_needed(g: Gate) -> int:
    if is_elementary(g):
        return 0
    c = len(g.controls)
    if g.kind == "X":
        return max(c - 2, 0)
    return c - 1 if c >= 2 else 0


def decompose_to_elementary(circuit: Circuit) -> Circuit:
    """Equivalent circuit over uncontrolled single-qubit gates and CNOTs."""
    check(circuit)
    extra = max((scratch_needed(g) for g in circuit.gates), default=0)
    scratch = [anc(circuit.n_ancilla + i) for i in range(extra)]
    gates: list[Gate] = []
    for g in circuit.gates:
        gates.extend(_lower(g, scratch))
    return Circuit(circuit.n_data, circuit.n_ancilla + extra, tuple(gates))
