"""Classical periodized QMF filter banks used as the reference for every circuit.

Conventions: the synthesis (base change) matrix of a pair has columns
``f_{2k} = T_{2k} alpha`` and ``f_{2k+1} = T_{2k} beta``; analysis is its
conjugate transpose. Taps longer than the period wrap around and add up.
Coefficients come out interleaved: approximation at even indices, detail at
odd ones.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .circuit import rot_matrix
from .plan import TransformPlan
from .words import HAAR_WORD, Rot, Shift, SplitWord, lattice_to_word

QMF_TOL = 1e-10
PEEL_TOL = 1e-8


class OracleError(ValueError):
    pass


class LatticeError(OracleError):
    pass


def _check_period(period: int) -> None:
    if period < 2 or period % 2:
        raise OracleError(f"period must be even and >= 2, got {period}")


def periodize(taps, period: int) -> np.ndarray:
    taps = np.asarray(taps, dtype=complex)
    out = np.zeros(period, dtype=complex)
    np.add.at(out, np.arange(taps.size) % period, taps)
    return out


@dataclass(frozen=True, eq=False)
class QmfPair:
    alpha: np.ndarray
    beta: np.ndarray
    period: int

    def __post_init__(self):
        _check_period(self.period)
        a = np.asarray(self.alpha, dtype=complex)
        b = np.asarray(self.beta, dtype=complex)
        size = max(a.size, b.size)
        size += size % 2
        object.__setattr__(self, "alpha", np.pad(a, (0, size - a.size)))
        object.__setattr__(self, "beta", np.pad(b, (0, size - b.size)))

    def periodized(self, period: int | None = None) -> tuple[np.ndarray, np.ndarray]:
        period = self.period if period is None else period
        return periodize(self.alpha, period), periodize(self.beta, period)

    def with_period(self, period: int) -> QmfPair:
        return QmfPair(self.alpha, self.beta, period)

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.alpha.imag) <= 1e-12)
                    and np.all(np.abs(self.beta.imag) <= 1e-12))


@dataclass(frozen=True)
class QmfReport:
    passed: bool
    residual: float


def _pair_synthesis(pair: QmfPair, period: int) -> np.ndarray:
    alpha, beta = pair.periodized(period)
    s = np.empty((period, period), dtype=complex)
    rows = np.arange(period)
    for k in range(period // 2):
        s[:, 2 * k] = alpha[(rows - 2 * k) % period]
        s[:, 2 * k + 1] = beta[(rows - 2 * k) % period]
    return s


def shift_matrix(period: int, direction: int = 1) -> np.ndarray:
    """Cyclic translation: column m has its 1 in row (m + direction) mod period."""
    t = np.zeros((period, period), dtype=complex)
    m = np.arange(period)
    t[(m + direction) % period, m] = 1
    return t


def word_matrix(word: SplitWord, period: int) -> np.ndarray:
    """Synthesis operator of ``word``, composing one step matrix at a time."""
    _check_period(period)
    acc = np.eye(period, dtype=complex)
    for step in word:
        if isinstance(step, Rot):
            op = np.kron(np.eye(period // 2), step.array())
        else:
            op = shift_matrix(period, step.direction)
        acc = op @ acc
    return acc


def splitting_matrix(source: SplitWord | QmfPair, period: int | None = None,
                     direction: str = "synthesis") -> np.ndarray:
    if isinstance(source, QmfPair):
        period = source.period if period is None else period
        _check_period(period)
        s = _pair_synthesis(source, period)
    else:
        if period is None:
            raise OracleError("a split word needs an explicit period")
        s = word_matrix(source, period)
    if direction == "synthesis":
        return s
    if direction == "analysis":
        return s.conj().T
    raise OracleError(f"direction must be 'synthesis' or 'analysis', got {direction!r}")


def qmf_check(pair: QmfPair) -> QmfReport:
    """Orthonormality of the even translates of alpha and beta."""
    s = _pair_synthesis(pair, pair.period)
    residual = float(np.max(np.abs(s.conj().T @ s - np.eye(pair.period))))
    return QmfReport(residual <= QMF_TOL, residual)


def extract_qmf(word: SplitWord, period: int) -> QmfPair:
    """The pair (O e_0, O e_1) of the word's synthesis operator O."""
    s = word_matrix(word, period)
    return QmfPair(s[:, 0].copy(), s[:, 1].copy(), period)


def classical_transform(plan: TransformPlan, pair: QmfPair, signal) -> np.ndarray:
    """Packet or pyramid analysis by repeated splitting of interleaved subsequences.

    ``signal`` may be 2-D, in which case each column is transformed.
    """
    x = np.array(signal, dtype=complex)
    if x.shape[0] != plan.length:
        raise OracleError(f"signal length {x.shape[0]} does not match plan length {plan.length}")
    for j in range(1, plan.depth + 1):
        stride = 1 << (j - 1)
        a = splitting_matrix(pair, plan.modulus(j), "analysis")
        for r in range(stride if plan.kind == "packet" else 1):
            x[r::stride] = a @ x[r::stride]
    if plan.ordering == "subband":
        x = to_subband(plan, x)
    return x


def transform_matrix(plan: TransformPlan, pair: QmfPair) -> np.ndarray:
    return classical_transform(plan, pair, np.eye(plan.length, dtype=complex))


def subband_permutation(plan: TransformPlan) -> np.ndarray:
    """``perm[i]`` is the subband position of interleaved coefficient ``i``.

    Pyramid: [A_J | D_J | D_{J-1} | ... | D_1]. Packet: 2**J equal blocks,
    ordered by the split path with the first level as the most significant
    choice (low-pass before high-pass).
    """
    size, depth = plan.length, plan.depth
    perm = np.empty(size, dtype=int)
    low = (1 << depth) - 1
    for i in range(size):
        if plan.kind == "packet":
            path = i & low
            block = int(format(path, f"0{depth}b")[::-1], 2)
            perm[i] = block * (size >> depth) + (i >> depth)
        elif i & low == 0:
            perm[i] = i >> depth
        else:
            level = ((i & -i).bit_length() - 1) + 1
            perm[i] = (size >> level) + (i >> level)
    return perm


def to_subband(plan: TransformPlan, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    out = np.empty_like(coeffs)
    out[subband_permutation(plan)] = coeffs
    return out


def from_subband(plan: TransformPlan, coeffs) -> np.ndarray:
    return np.asarray(coeffs)[subband_permutation(plan)]


# -- lattice factorization -------------------------------------------------

@dataclass(frozen=True)
class LatticeFactorization:
    """Rotation angles (first applied first) plus the normalization undone on rebuild.

    The lattice realizes the pair after it is translated left by ``shift``
    (an even count), alpha multiplied by ``alpha_sign`` and beta by
    ``beta_sign``.
    """

    angles: tuple[float, ...]
    shift: int = 0
    alpha_sign: int = 1
    beta_sign: int = 1
    residual: float = field(default=0.0, compare=False)

    def word(self) -> SplitWord:
        fix = None
        if (self.alpha_sign, self.beta_sign) != (1, 1):
            fix = np.diag([self.alpha_sign, self.beta_sign]).astype(complex)
        steps = list(lattice_to_word(self.angles, fix).steps)
        return SplitWord([Shift(+1)] * self.shift + steps)


def _polyphase(alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """Coefficients P[k] (2x2) of z^k: columns are filters, rows even/odd phase."""
    k = alpha.size // 2
    p = np.empty((k, 2, 2))
    p[:, 0, 0], p[:, 1, 0] = alpha[0::2], alpha[1::2]
    p[:, 0, 1], p[:, 1, 1] = beta[0::2], beta[1::2]
    return p


def lattice_factor(pair: QmfPair, tol: float = PEEL_TOL) -> LatticeFactorization:
    """Peel planar rotations off the polyphase matrix, highest degree first."""
    if not pair.is_real:
        raise LatticeError("lattice factorization needs real taps")
    if 2 * math.ceil(pair.alpha.size / 2) > pair.period:
        raise LatticeError("taps longer than the period cannot be factored")
    if not qmf_check(pair).passed:
        raise LatticeError("pair is not a QMF system")
    alpha, beta = pair.alpha.real.copy(), pair.beta.real.copy()
    nz = np.flatnonzero((np.abs(alpha) > 1e-14) | (np.abs(beta) > 1e-14))
    shift = 2 * (nz[0] // 2)
    last = nz[-1] - shift
    size = 2 * (last // 2 + 1)
    alpha = alpha[shift:shift + size]
    beta = beta[shift:shift + size]
    alpha = np.pad(alpha, (0, size - alpha.size))
    beta = np.pad(beta, (0, size - beta.size))

    alpha_sign = 1 if alpha.sum() >= 0 else -1
    alpha = alpha * alpha_sign
    p = _polyphase(alpha, beta)
    det = np.convolve(p[:, 0, 0], p[:, 1, 1]) - np.convolve(p[:, 0, 1], p[:, 1, 0])
    beta_sign = 1 if det[np.argmax(np.abs(det))] >= 0 else -1
    p[:, :, 1] *= beta_sign

    residual = 0.0
    angles = []
    while p.shape[0] > 1:
        top = p[-1]
        j = int(np.argmax(np.hypot(top[0], top[1])))
        theta = math.atan2(top[0, j], top[1, j])
        q = np.einsum("ij,kjl->kil", rot_matrix(theta).real.T, p)
        residual = max(residual, np.max(np.abs(q[-1, 0])), np.max(np.abs(q[0, 1])))
        nxt = np.empty((p.shape[0] - 1, 2, 2))
        nxt[:, 0] = q[:-1, 0]
        nxt[:, 1] = q[1:, 1]
        p = nxt
        angles.append(theta)
    p0 = p[0]
    theta = math.atan2(-p0[1, 0], p0[0, 0])
    residual = max(residual, float(np.max(np.abs(p0 - rot_matrix(theta).real))))
    angles.append(theta)
    if residual > tol:
        raise LatticeError(
            f"pair does not factor into rotations and delays (residual {residual:.3g}); "
            "finite periodic QMF systems outside this parametrization exist, so this "
            "is an expected outcome for such pairs")
    return LatticeFactorization(tuple(reversed(angles)), int(shift), alpha_sign, beta_sign,
                                residual)


def reconstruct(fact: LatticeFactorization, period: int) -> QmfPair:
    return extract_qmf(fact.word(), period)


def word_for_pair(pair: QmfPair) -> SplitWord:
    return lattice_factor(pair).word()


# -- named filters -----------------------------------------------------------

def haar_pair(period: int = 2) -> QmfPair:
    s = 1 / math.sqrt(2)
    return QmfPair(np.array([s, s]), np.array([s, -s]), period)


def _lattice_lowpass(t1: float, t2: float) -> np.ndarray:
    return word_matrix(lattice_to_word([t1, t2]), 4)[:, 0].real


@lru_cache(maxsize=None)
def daubechies4_angles() -> tuple[float, float]:
    """Two lattice angles whose low-pass filter has two vanishing moments.

    Solved numerically: the zeroth alternating moment fixes t1 + t2, the
    first moment is then a scalar root search in t1. Of the roots, the one
    with positive DC gain and the most energy in the leading tap is kept.
    """
    signs = np.array([1, -1, 1, -1])
    n = np.arange(4)

    def moments(t1, t2):
        a = _lattice_lowpass(t1, t2)
        return float(signs @ a), float(signs @ (n * a))

    candidates = []
    for total in (-math.pi / 4, 3 * math.pi / 4):
        grid = np.linspace(-math.pi, math.pi, 721)
        vals = [moments(t, total - t)[1] for t in grid]
        for lo, hi, flo, fhi in zip(grid, grid[1:], vals, vals[1:]):
            if flo == 0 or flo * fhi < 0:
                t1 = brentq(lambda t: moments(t, total - t)[1], lo, hi, xtol=1e-15)
                a = _lattice_lowpass(t1, total - t1)
                if abs(moments(t1, total - t1)[0]) < 1e-12 and a.sum() > 0:
                    candidates.append((abs(a[0]), t1, total - t1))
    if not candidates:
        raise OracleError("no Daubechies-4 lattice solution found")
    _, t1, t2 = max(candidates)
    return t1, t2


def d4_word() -> SplitWord:
    return lattice_to_word(daubechies4_angles())


def d4_pair(period: int = 4) -> QmfPair:
    pair = extract_qmf(d4_word(), 4)
    return QmfPair(pair.alpha.real, pair.beta.real, period)


NAMED_FILTERS = ("haar", "d4")


def named_word(name: str) -> SplitWord:
    if name == "haar":
        return HAAR_WORD
    if name == "d4":
        return d4_word()
    raise OracleError(f"unknown filter {name!r}; known: {', '.join(NAMED_FILTERS)}")


def named_pair(name: str, period: int) -> QmfPair:
    if name == "haar":
        return haar_pair(period)
    if name == "d4":
        return d4_pair(period)
    raise OracleError(f"unknown filter {name!r}; known: {', '.join(NAMED_FILTERS)}")


# -- filter files ------------------------------------------------------------

def _fmt_tap(z: complex) -> str:
    from .qcformat import fmt_float

    if z.imag == 0:
        return fmt_float(z.real)
    im = fmt_float(z.imag)
    return f"{fmt_float(z.real)}{'' if im.startswith('-') else '+'}{im}j"


def format_filter(pair: QmfPair) -> str:
    return (f"taps {pair.alpha.size}\n"
            f"alpha: {' '.join(_fmt_tap(z) for z in pair.alpha)}\n"
            f"beta: {' '.join(_fmt_tap(z) for z in pair.beta)}\n")


def parse_filter(text: str, period: int | None = None) -> QmfPair:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    try:
        head, n_taps = lines[0].split()
        if head != "taps":
            raise ValueError("first line must be 'taps <count>'")
        n_taps = int(n_taps)
        if n_taps < 2 or n_taps % 2:
            raise ValueError("tap count must be even and >= 2")
        taps = {}
        for line in lines[1:3]:
            key, _, rest = line.partition(":")
            taps[key.strip()] = np.array([complex(t) for t in rest.split()])
        alpha, beta = taps["alpha"], taps["beta"]
    except (ValueError, IndexError, KeyError) as exc:
        raise OracleError(f"malformed filter file: {exc}") from None
    if alpha.size != n_taps or beta.size != n_taps:
        raise OracleError(f"expected {n_taps} taps per filter")
    if np.all(alpha.imag == 0) and np.all(beta.imag == 0):
        alpha, beta = alpha.real, beta.real
    return QmfPair(alpha, beta, n_taps if period is None else period)


def load_filter(path: str | Path, period: int | None = None) -> QmfPair:
    return parse_filter(Path(path).read_text(encoding="utf-8"), period)
