"""Circuit constructors for Walsh-Hadamard, translations, splits and transforms.

Windows are ``range`` objects of contiguous data qubits, least significant
first. Every builder returns a circuit whose ancillas start and end in |0>.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .circuit import (
    H_MATRIX, UNITARY_TOL, X_MATRIX, Circuit, Control, Gate, Qubit, anc,
    circuit_from_gates, compose, data, invert, neg, pos,
)
from .plan import TransformPlan
from .words import Rot, SplitWord, lattice_to_word


class BuildError(ValueError):
    pass


def _is_pow2(m: int) -> bool:
    return m > 0 and m & (m - 1) == 0


def _width(modulus: int) -> int:
    return (modulus - 1).bit_length()


def _resolve(window: range | None, width: int, n: int | None) -> tuple[range, int]:
    if window is None:
        window = range(0, width)
    if window.step != 1 or len(window) < 1 or window.start < 0:
        raise BuildError(f"window must be a nonempty contiguous range, got {window!r}")
    n = window.stop if n is None else n
    if window.stop > n:
        raise BuildError(f"window {window!r} exceeds {n} data qubits")
    return window, n


def _check_controls(window: range, controls: Sequence[Control]) -> tuple[Control, ...]:
    controls = tuple(controls)
    for c in controls:
        if not c.qubit.is_ancilla and c.qubit.index in window:
            raise BuildError(f"control on qubit {c.qubit} overlaps the window {window!r}")
    return controls


def _finish(n: int, gates: list[Gate], controls: Sequence[Control]) -> Circuit:
    circ = circuit_from_gates(n, gates)
    for c in controls:
        if not c.qubit.is_ancilla and c.qubit.index >= n:
            raise BuildError(f"control qubit {c.qubit} outside {n} data qubits")
    return circ


def build_walsh_hadamard(n: int) -> Circuit:
    """H on every qubit, least significant first."""
    if n < 1:
        raise BuildError("Walsh-Hadamard needs at least one qubit")
    return Circuit(n, 0, tuple(Gate.h(data(k)) for k in range(n)))


def _increment_stages(a: list[Qubit], controls: tuple[Control, ...],
                      targeted: bool) -> tuple[list[Gate], list[Gate]]:
    """Gates of |m> -> |m+1 mod 2^w> on qubits ``a`` as (carry stage, remainder).

    Carries c_1 = a_1 a_0, c_i = a_i c_{i-1} live on ancillas 0..w-3. The
    remainder adds them most significant first, uncomputing each carry
    right after its last use, then finishes a_1 and a_0. With ``targeted``
    only gates targeting c_1, a_1 and a_0 carry the extra controls: when
    the condition fails c_1 stays 0, so no higher bit changes either.
    """
    w = len(a)
    key = controls
    rest_ctrl = () if targeted else controls

    def tof(x: Qubit, y: Qubit, t: Qubit, extra=rest_ctrl) -> Gate:
        return Gate.x(t, (Control(x), Control(y)) + extra)

    carry: list[Gate] = []
    rest: list[Gate] = []
    if w >= 3:
        c = [None] + [anc(i) for i in range(w - 2)]  # c[i] holds carry c_i
        carry.append(tof(a[0], a[1], c[1], key))
        for i in range(2, w - 1):
            carry.append(tof(a[i], c[i - 1], c[i]))
        for i in range(w - 1, 1, -1):
            rest.append(Gate.x(a[i], (Control(c[i - 1]),) + rest_ctrl))
            if i - 1 >= 2:
                rest.append(tof(a[i - 1], c[i - 2], c[i - 1]))
            else:
                rest.append(tof(a[0], a[1], c[1], key))
    if w >= 2:
        rest.append(Gate.x(a[1], (Control(a[0]),) + key))
    rest.append(Gate.x(a[0], key))
    return carry, rest


def increment_carry_stage(n: int, window: range | None = None,
                          controls: Sequence[Control] = (), *, targeted: bool = True) -> Circuit:
    """Only the carry computation of :func:`build_increment_pow2` (for audits)."""
    window, n = _resolve(window, n, n)
    controls = _check_controls(window, controls)
    carry, _ = _increment_stages([data(q) for q in window], controls, targeted)
    return _finish(n, carry, controls)


def build_increment_pow2(n: int, window: range | None = None,
                         controls: Sequence[Control] = (), *, targeted: bool = True) -> Circuit:
    """|m> -> |m+1 mod 2^w> on ``window`` (default: all ``n`` qubits).

    With ``targeted=False`` every gate is conditioned on ``controls``.
    """
    window, n = _resolve(window, n, n)
    controls = _check_controls(window, controls)
    carry, rest = _increment_stages([data(q) for q in window], controls, targeted)
    return _finish(n, carry + rest, controls)


def build_decrement_pow2(n: int, window: range | None = None,
                         controls: Sequence[Control] = (), *, targeted: bool = True) -> Circuit:
    return invert(build_increment_pow2(n, window, controls, targeted=targeted))


def build_increment_mod(modulus: int, window: range | None = None,
                        controls: Sequence[Control] = (), *, n: int | None = None,
                        targeted: bool = True) -> Circuit:
    """|m> -> |m+1 mod modulus> for 0 <= m < modulus, modulus even but not 2^k.

    Increments mod 2^w, then flags the single overflow value ``modulus`` on an
    exception ancilla, clears the one-bits of ``modulus`` under that flag and
    finally unflags by detecting value 0. Inputs >= modulus are not covered.
    """
    if modulus % 2:
        raise BuildError(f"modulus must be even, got {modulus}")
    if modulus < 4:
        raise BuildError(f"modulus must be at least 4, got {modulus}")
    if _is_pow2(modulus):
        raise BuildError(f"modulus {modulus} is a power of two; use build_increment_pow2")
    w = _width(modulus)
    window, n = _resolve(window, w, n)
    if len(window) != w:
        raise BuildError(f"modulus {modulus} needs a {w}-qubit window, got {len(window)}")
    controls = _check_controls(window, controls)
    a = [data(q) for q in window]
    carry, rest = _increment_stages(a, controls, targeted)
    flag = anc(max(w - 2, 0))
    extra = () if targeted else controls
    pattern = tuple(Control(a[i], bool(modulus >> i & 1)) for i in range(w))
    gates = carry + rest
    gates.append(Gate.x(flag, pattern + extra))
    gates += [Gate.x(a[i], (Control(flag),) + extra) for i in range(w) if modulus >> i & 1]
    # value 0 with the flag up only happens on the wrap path; the outer
    # condition is needed because an untouched |0> must not unflag
    gates.append(Gate.x(flag, tuple(Control(q, False) for q in a) + controls))
    return _finish(n, gates, controls)


def build_decrement_mod(modulus: int, window: range | None = None,
                        controls: Sequence[Control] = (), *, n: int | None = None,
                        targeted: bool = True) -> Circuit:
    return invert(build_increment_mod(modulus, window, controls, n=n, targeted=targeted))


def _shift(direction: int, modulus: int, window: range, controls, n: int,
           targeted: bool) -> Circuit:
    if _is_pow2(modulus):
        build = build_increment_pow2 if direction > 0 else build_decrement_pow2
        return build(n, window, controls, targeted=targeted)
    build = build_increment_mod if direction > 0 else build_decrement_mod
    return build(modulus, window, controls, n=n, targeted=targeted)


def _recognize(m: np.ndarray, target: Qubit, controls) -> Gate:
    if np.allclose(m, X_MATRIX, rtol=0, atol=1e-15):
        return Gate.x(target, controls)
    if np.allclose(m, H_MATRIX, rtol=0, atol=1e-15):
        return Gate.h(target, controls)
    if (np.all(m.imag == 0) and m[0, 0] == m[1, 1] and m[0, 1] == -m[1, 0]):
        theta = float(np.arctan2(m[0, 1].real, m[0, 0].real))
        return Gate.rot(theta, target, controls)
    return Gate.u2(m, target, controls)


def build_local_rotation(m, n: int | None = None, window: range | None = None,
                         controls: Sequence[Control] = ()) -> Circuit:
    """I ⊗ M: the 2x2 unitary ``m`` on the least significant qubit of the window."""
    m = np.asarray(m, dtype=complex).reshape(2, 2)
    if not np.all(np.isfinite(m)) or np.max(np.abs(m.conj().T @ m - np.eye(2))) > UNITARY_TOL:
        raise BuildError("local rotation matrix is not unitary")
    window, n = _resolve(window, 1 if n is None else n, n)
    controls = _check_controls(window, controls)
    return _finish(n, [_recognize(m, data(window.start), controls)], controls)


def build_split_synthesis(word: SplitWord, modulus: int, window: range | None = None,
                          controls: Sequence[Control] = (), *, n: int | None = None,
                          targeted: bool = True) -> Circuit:
    """Circuit for the synthesis operator of ``word`` on sequences of length ``modulus``."""
    if modulus < 2 or modulus % 2:
        raise BuildError(f"modulus must be even and >= 2, got {modulus}")
    w = _width(modulus)
    window, n = _resolve(window, w, n)
    if len(window) != w:
        raise BuildError(f"modulus {modulus} needs a {w}-qubit window, got {len(window)}")
    controls = _check_controls(window, controls)
    parts = []
    for step in word:
        if isinstance(step, Rot):
            parts.append(build_local_rotation(step.array(), n, window, controls))
        else:
            parts.append(_shift(step.direction, modulus, window, controls, n, targeted))
    return compose(*parts)


def build_split_analysis(word: SplitWord, modulus: int, window: range | None = None,
                         controls: Sequence[Control] = (), *, n: int | None = None,
                         targeted: bool = True) -> Circuit:
    """Inverse of the synthesis circuit: maps a signal to its split coefficients."""
    return invert(build_split_synthesis(word, modulus, window, controls, n=n,
                                        targeted=targeted))


def build_transform(plan: TransformPlan, word: SplitWord, *, targeted: bool = True,
                    conditioning: str = "direct") -> Circuit:
    """Analysis circuit for a full packet or pyramid transform.

    Level j splits the stride-2^(j-1) subsequences, i.e. acts on qubits
    j-1..n-1. The pyramid conditions level j on qubits 0..j-2 being |0>,
    which selects the approximation subsequence. With
    ``conditioning="direct"`` those negative controls go on the level's gates;
    with ``"flag"`` their AND is computed once per level onto an extra
    ancilla, the level is controlled by that single qubit, and the flag is
    cleared again.
    """
    if conditioning not in ("direct", "flag"):
        raise BuildError(f"unknown conditioning {conditioning!r}")
    n = plan.n_qubits
    parts = []
    for j in range(1, plan.depth + 1):
        window, modulus = range(j - 1, n), plan.modulus(j)
        controls = [neg(q) for q in range(j - 1)] if plan.kind == "pyramid" else []
        if conditioning == "flag" and len(controls) >= 2:
            flag = anc(n - 1)
            raise_flag = Circuit(n, n, (Gate.x(flag, controls),))
            body = build_split_analysis(word, modulus, window, [pos(flag)], n=n,
                                        targeted=targeted)
            parts += [raise_flag, body, raise_flag]
        else:
            parts.append(build_split_analysis(word, modulus, window, controls, n=n,
                                              targeted=targeted))
    return compose(*parts)


__all__ = [
    "BuildError", "build_walsh_hadamard", "build_increment_pow2", "build_decrement_pow2",
    "build_increment_mod", "build_decrement_mod", "build_local_rotation",
    "build_split_synthesis", "build_split_analysis", "build_transform",
    "increment_carry_stage", "lattice_to_word", "pos", "neg",
]
