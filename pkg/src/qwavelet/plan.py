from __future__ import annotations

from dataclasses import dataclass


class PlanError(ValueError):
    pass


def two_adic_valuation(m: int) -> int:
    return (m & -m).bit_length() - 1


@dataclass(frozen=True)
class TransformPlan:
    """Shape of a transform: ``packet`` splits every subspace at each level,
    ``pyramid`` only the approximation.

    Level ``j`` (1-based) works on sequences of length ``length / 2**(j-1)``,
    which must stay even, so ``2**depth`` has to divide ``length``.
    """

    kind: str
    depth: int
    length: int
    ordering: str = "interleaved"

    def __post_init__(self):
        if self.kind not in ("packet", "pyramid"):
            raise PlanError(f"unknown transform kind {self.kind!r}")
        if self.ordering not in ("interleaved", "subband"):
            raise PlanError(f"unknown ordering {self.ordering!r}")
        if self.length < 2 or self.length % 2:
            raise PlanError(f"length must be even and >= 2, got {self.length}")
        if self.depth < 1:
            raise PlanError("depth must be at least 1")
        if self.depth > two_adic_valuation(self.length):
            raise PlanError(
                f"depth {self.depth} too large: 2**depth must divide length {self.length}")

    @property
    def n_qubits(self) -> int:
        return (self.length - 1).bit_length()

    def modulus(self, level: int) -> int:
        return self.length >> (level - 1)

    @classmethod
    def for_qubits(cls, kind: str, n: int, depth: int | None = None,
                   ordering: str = "interleaved") -> TransformPlan:
        return cls(kind, n if depth is None else depth, 1 << n, ordering)
