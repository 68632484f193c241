"""Splitting words: products of local rotations and unit translations.

A word lists steps in synthesis order. Applied first-to-last to the standard
basis, it carries ``e_0`` and ``e_1`` to the low-pass and high-pass filters
of a QMF pair; every step commutes with the even translation, so any word
yields a valid pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import H_MATRIX, UNITARY_TOL, X_MATRIX, rot_matrix


class WordError(ValueError):
    pass


@dataclass(frozen=True)
class Rot:
    """Local rotation: the 2x2 unitary ``matrix`` on every (even, odd) index pair."""

    matrix: tuple[complex, ...]

    def __init__(self, m):
        flat = tuple(complex(v) for v in np.asarray(m, dtype=complex).reshape(4))
        object.__setattr__(self, "matrix", flat)
        u = self.array()
        if not np.all(np.isfinite(u)) or np.max(np.abs(u.conj().T @ u - np.eye(2))) > UNITARY_TOL:
            raise WordError("local rotation matrix is not unitary")

    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=complex).reshape(2, 2)

    def adjoint(self) -> Rot:
        return Rot(self.array().conj().T)


@dataclass(frozen=True)
class Shift:
    """Cyclic translation by ``direction`` (+1 or -1)."""

    direction: int = 1

    def __post_init__(self):
        if self.direction not in (1, -1):
            raise WordError("shift direction must be +1 or -1")

    def adjoint(self) -> Shift:
        return Shift(-self.direction)


SplitStep = Rot | Shift


@dataclass(frozen=True)
class SplitWord:
    steps: tuple[SplitStep, ...]

    def __init__(self, steps: Sequence[SplitStep]):
        steps = tuple(steps)
        if not steps:
            raise WordError("a split word needs at least one step")
        for s in steps:
            if not isinstance(s, (Rot, Shift)):
                raise WordError(f"not a split step: {s!r}")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def delay_steps() -> list[SplitStep]:
    """Delay of the odd polyphase component by one period.

    Shift(+1) then a swap within each pair fixes ``e_{2k}`` and sends
    ``e_{2k+1}`` to ``e_{2k+3}``.
    """
    return [Shift(+1), Rot(X_MATRIX)]


def lattice_to_word(angles: Sequence[float], parity_fix=None) -> SplitWord:
    """Word for the lattice ``R(t_K) D ... D R(t_1)`` with D the odd-phase delay.

    ``parity_fix`` is an optional 2x2 unitary applied as the first synthesis
    step (and so the last step of the analysis circuit); it carries the sign
    normalization a factored pair may need.
    """
    angles = [float(a) for a in angles]
    if not angles:
        raise WordError("need at least one lattice angle")
    steps: list[SplitStep] = [] if parity_fix is None else [Rot(parity_fix)]
    steps.append(Rot(rot_matrix(angles[0])))
    for theta in angles[1:]:
        steps += delay_steps()
        steps.append(Rot(rot_matrix(theta)))
    return SplitWord(steps)


HAAR_WORD = SplitWord([Rot(H_MATRIX)])
