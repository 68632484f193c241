import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qwavelet.classical import (
    HAAR_WORD, LatticeError, OracleError, QmfPair, classical_transform, d4_pair, d4_word,
    daubechies4_angles, extract_qmf, format_filter, haar_pair, lattice_factor, load_filter,
    named_pair, parse_filter, periodize, qmf_check, reconstruct, shift_matrix,
    splitting_matrix, subband_permutation, to_subband, from_subband, transform_matrix,
)
from qwavelet.plan import TransformPlan
from qwavelet.words import Rot, Shift, SplitWord, lattice_to_word

from conftest import random_signal, random_word

S = 1 / math.sqrt(2)
R3 = math.sqrt(3)
D4_ALPHA = np.array([1 + R3, 3 + R3, 3 - R3, 1 - R3]) / (4 * math.sqrt(2))


def pair(alpha, beta, period=8):
    return QmfPair(np.array(alpha, dtype=float), np.array(beta, dtype=float), period)


# -- qmf_check ---------------------------------------------------------------

def test_haar_passes():
    report = qmf_check(haar_pair(8))
    assert report.passed and report.residual < 1e-15


def test_trivial_pair_passes():
    assert qmf_check(pair([1, 0], [0, 1])).passed


def test_unnormalized_fails():
    report = qmf_check(pair([1, 1], [0, 1]))
    assert not report.passed and abs(report.residual - 1) < 1e-12


def test_odd_period_rejected():
    with pytest.raises(OracleError):
        pair([1, 0], [0, 1], period=7)


def test_wraparound_periodization():
    np.testing.assert_array_equal(periodize([1, 2, 3, 4, 5, 6], 4), [6, 8, 3, 4])
    # D4 at period 2 folds to a Haar-like 2x2 unitary
    assert qmf_check(d4_pair(2)).passed


# -- splitting matrices ----------------------------------------------------------

def test_generic_synthesis_layout():
    a = [1.0, 2.0, 3.0, 4.0]
    b = [5.0, 6.0, 7.0, 8.0]
    m = splitting_matrix(pair(a, b), 8)
    for k in range(4):
        for i in range(4):
            assert m[(2 * k + i) % 8, 2 * k] == a[i]
            assert m[(2 * k + i) % 8, 2 * k + 1] == b[i]
    assert m[0, 0] == a[0] and m[2, 0] == a[2] and m[0, 6] == a[2] and m[1, 7] == b[3]
    assert np.count_nonzero(m) == 32


def test_generic_analysis_layout():
    a = np.array([1.0, 2.0, 3.0, 4.0]) + 1j
    b = np.array([5.0, 6.0, 7.0, 8.0]) - 2j
    m = splitting_matrix(QmfPair(a, b, 8), 8, "analysis")
    np.testing.assert_array_equal(m[0, :4], a.conj())
    np.testing.assert_array_equal(m[1, :4], b.conj())
    np.testing.assert_array_equal(m[6, [6, 7, 0, 1]], a.conj())


def test_haar_analysis_is_walsh_factor():
    expected = np.kron(np.eye(4), np.array([[1, 1], [1, -1]]) * S)
    np.testing.assert_allclose(splitting_matrix(haar_pair(8), 8, "analysis"), expected,
                               atol=1e-15)


def test_shift_word():
    m = splitting_matrix(SplitWord([Shift(+1)]), 8)
    for col in range(8):
        assert m[(col + 1) % 8, col] == 1
    np.testing.assert_array_equal(m, shift_matrix(8))


def test_direction_error():
    with pytest.raises(OracleError):
        splitting_matrix(haar_pair(8), 8, "sideways")
    with pytest.raises(OracleError):
        splitting_matrix(HAAR_WORD)


@pytest.mark.parametrize("seed", range(25))
def test_path_agreement(seed):
    rng = np.random.default_rng(seed)
    word = random_word(rng)
    for period in (2, 4, 6, 8, 12, 16):
        np.testing.assert_allclose(splitting_matrix(word, period),
                                   splitting_matrix(extract_qmf(word, period)),
                                   rtol=0, atol=1e-12)


# -- extract_qmf ---------------------------------------------------------------

def test_extract_haar():
    p = extract_qmf(HAAR_WORD, 8)
    np.testing.assert_allclose(p.alpha, [S, S, 0, 0, 0, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(p.beta, [S, -S, 0, 0, 0, 0, 0, 0], atol=1e-15)


def test_extract_identity():
    p = extract_qmf(SplitWord([Rot(np.eye(2))]), 8)
    np.testing.assert_array_equal(p.alpha, np.eye(8)[0])
    np.testing.assert_array_equal(p.beta, np.eye(8)[1])


def test_extract_d4():
    p = extract_qmf(d4_word(), 8)
    np.testing.assert_allclose(p.alpha.real[:4], D4_ALPHA, rtol=0, atol=1e-10)
    assert qmf_check(p).passed


@pytest.mark.parametrize("seed", range(20))
def test_extract_always_qmf(seed):
    rng = np.random.default_rng(1000 + seed)
    for period in (4, 8, 12, 16):
        assert qmf_check(extract_qmf(random_word(rng), period)).residual <= 1e-10


# -- transforms ----------------------------------------------------------------

def test_packet_haar_impulse():
    out = classical_transform(TransformPlan("packet", 3, 8), haar_pair(8), np.eye(8)[0])
    np.testing.assert_allclose(out, np.full(8, 1 / math.sqrt(8)), atol=1e-15)


def test_depth_one_is_analysis_matrix():
    rng = np.random.default_rng(5)
    p = extract_qmf(random_word(rng), 12)
    s = random_signal(rng, 12)
    for kind in ("packet", "pyramid"):
        np.testing.assert_allclose(classical_transform(TransformPlan(kind, 1, 12), p, s),
                                   splitting_matrix(p, 12, "analysis") @ s, atol=1e-13)


def test_pyramid_haar_constant():
    out = classical_transform(TransformPlan("pyramid", 3, 8), haar_pair(8), np.ones(8))
    np.testing.assert_allclose(out, [math.sqrt(8)] + [0] * 7, atol=1e-14)


def test_length_mismatch():
    with pytest.raises(OracleError):
        classical_transform(TransformPlan("packet", 1, 8), haar_pair(8), np.ones(6))


@pytest.mark.parametrize("kind", ["packet", "pyramid"])
@pytest.mark.parametrize("length,depth", [(8, 3), (12, 2), (16, 4), (24, 3), (40, 3)])
def test_energy_preserved(kind, length, depth):
    rng = np.random.default_rng(length + depth)
    p = extract_qmf(d4_word(), length)
    s = random_signal(rng, length, 5)
    out = classical_transform(TransformPlan(kind, depth, length), p, s)
    np.testing.assert_allclose(np.linalg.norm(out, axis=0), np.linalg.norm(s, axis=0),
                               rtol=0, atol=1e-12)


def test_transform_matrix_columns():
    plan = TransformPlan("pyramid", 2, 8)
    p = d4_pair(8)
    m = transform_matrix(plan, p)
    np.testing.assert_allclose(m[:, 3], classical_transform(plan, p, np.eye(8)[3]), atol=1e-15)
    np.testing.assert_allclose(m.conj().T @ m, np.eye(8), atol=1e-12)


# -- subband ordering ------------------------------------------------------------

def test_subband_depth_one():
    perm = subband_permutation(TransformPlan("pyramid", 1, 8))
    np.testing.assert_array_equal(perm, [0, 4, 1, 5, 2, 6, 3, 7])


def test_subband_trivial():
    np.testing.assert_array_equal(subband_permutation(TransformPlan("packet", 1, 2)), [0, 1])


def test_subband_pyramid_depth_three():
    perm = subband_permutation(TransformPlan("pyramid", 3, 8))
    # A3 | D3 | D2 D2 | D1 D1 D1 D1
    np.testing.assert_array_equal(perm, [0, 4, 2, 5, 1, 6, 3, 7])


def test_subband_packet_blocks():
    perm = subband_permutation(TransformPlan("packet", 2, 8))
    # first level low/high is the most significant block choice
    np.testing.assert_array_equal(perm, [0, 4, 2, 6, 1, 5, 3, 7])


def test_subband_pyramid_constant_goes_first():
    plan = TransformPlan("pyramid", 3, 8, "subband")
    out = classical_transform(plan, haar_pair(8), np.ones(8))
    assert abs(out[0] - math.sqrt(8)) < 1e-14


ALL_PLANS = [TransformPlan(k, d, n) for n in (2, 4, 6, 8, 12, 16, 24, 32, 48, 64)
             for d in range(1, (n & -n).bit_length()) for k in ("packet", "pyramid")]


@pytest.mark.parametrize("plan", ALL_PLANS, ids=lambda p: f"{p.kind}-{p.length}-{p.depth}")
def test_subband_bijection(plan):
    perm = subband_permutation(plan)
    assert sorted(perm.tolist()) == list(range(plan.length))
    x = np.arange(plan.length, dtype=complex)
    np.testing.assert_array_equal(from_subband(plan, to_subband(plan, x)), x)


def test_subband_haar_pyramid_blocks():
    # pyramid Haar blocks line up with the classical block averages
    plan = TransformPlan("pyramid", 2, 8, "subband")
    out = classical_transform(plan, haar_pair(8), np.arange(8.0)).real
    np.testing.assert_allclose(out[:2], [np.sum(range(4)) / 2, np.sum(range(4, 8)) / 2])
    np.testing.assert_allclose(out[4:], [-S] * 4, atol=1e-14)


# -- lattice factorization ---------------------------------------------------------

def test_factor_haar():
    fact = lattice_factor(haar_pair(8))
    assert len(fact.angles) == 1
    assert abs(fact.angles[0] + math.pi / 4) < 1e-15
    a, b = reconstruct(fact, 8).periodized()
    ha, hb = haar_pair(8).periodized()
    np.testing.assert_allclose(a, ha, atol=1e-12)
    np.testing.assert_allclose(b, hb, atol=1e-12)


def test_factor_d4():
    fact = lattice_factor(d4_pair(8))
    assert len(fact.angles) == 2
    np.testing.assert_allclose(fact.angles, daubechies4_angles(), atol=1e-10)
    np.testing.assert_allclose(fact.angles, [math.pi / 12, -math.pi / 3], atol=1e-10)
    a, b = reconstruct(fact, 8).periodized()
    da, db = d4_pair(8).periodized()
    np.testing.assert_allclose(a, da, atol=1e-10)
    np.testing.assert_allclose(b, db, atol=1e-10)


def test_factor_trivial():
    fact = lattice_factor(pair([1, 0], [0, 1]))
    assert fact.angles == (0.0,) and (fact.alpha_sign, fact.beta_sign, fact.shift) == (1, 1, 0)


def test_d4_against_closed_form():
    p = d4_pair(4)
    np.testing.assert_allclose(p.alpha.real, D4_ALPHA, rtol=0, atol=1e-12)
    n = np.arange(4)
    signs = (-1.0) ** n
    for power in (0, 1):
        assert abs(np.sum(signs * n ** power * p.alpha.real)) < 1e-12
        assert abs(np.sum(n ** power * p.beta.real)) < 1e-12


@pytest.mark.parametrize("seed", range(10))
def test_factor_random_lattice_pairs(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 5))
    angles = rng.uniform(-math.pi, math.pi, k)
    period = 2 * k + 2 * int(rng.integers(0, 3))
    p = extract_qmf(lattice_to_word(angles), period)
    p = QmfPair(p.alpha.real, p.beta.real, period)
    fact = lattice_factor(p)
    a, b = reconstruct(fact, period).periodized()
    np.testing.assert_allclose(a, p.alpha, rtol=0, atol=1e-10)
    np.testing.assert_allclose(b, p.beta, rtol=0, atol=1e-10)


def test_factor_records_shift_and_signs():
    alpha, beta = d4_pair(8).periodized()
    shifted = QmfPair(-np.roll(alpha, 2).real, -np.roll(beta, 2).real, 8)
    fact = lattice_factor(shifted)
    assert fact.shift == 2 and fact.alpha_sign == -1
    a, b = reconstruct(fact, 8).periodized()
    np.testing.assert_allclose(a, shifted.alpha, atol=1e-10)
    np.testing.assert_allclose(b, shifted.beta, atol=1e-10)
    assert qmf_check(reconstruct(fact, 8)).passed


def test_factor_rejects_complex():
    with pytest.raises(LatticeError):
        lattice_factor(QmfPair(np.array([S, 1j * S]), np.array([S, -1j * S]), 4))


def test_factor_rejects_non_qmf():
    with pytest.raises(LatticeError):
        lattice_factor(pair([1, 1], [0, 1]))


def test_factor_rejects_taps_beyond_period():
    with pytest.raises(LatticeError):
        lattice_factor(d4_pair(2))


def test_factor_peeling_tolerance():
    # rounding leaves a tiny peeling residual; a tolerance below it trips the error
    p = extract_qmf(lattice_to_word([0.3, -1.1, 2.2]), 8)
    p = QmfPair(p.alpha.real, p.beta.real, 8)
    residual = lattice_factor(p).residual
    assert 0 < residual < 1e-12
    with pytest.raises(LatticeError, match="expected outcome"):
        lattice_factor(p, tol=residual / 2)


# -- filter files ----------------------------------------------------------------

def test_filter_round_trip(tmp_path):
    text = format_filter(d4_pair(4))
    assert text.startswith("taps 4\nalpha: ")
    path = tmp_path / "d4.flt"
    path.write_text(text)
    back = load_filter(path, 8)
    np.testing.assert_array_equal(back.alpha, d4_pair(4).alpha)
    assert back.period == 8


def test_filter_complex_taps():
    p = parse_filter("taps 2\nalpha: 0.5+0.5j 0.5-0.5j\nbeta: 0.5-0.5j 0.5+0.5j\n")
    assert p.alpha[0] == 0.5 + 0.5j and not np.isrealobj(p.alpha)


@pytest.mark.parametrize("text", [
    "", "tap 2\nalpha: 1 0\nbeta: 0 1\n", "taps 3\nalpha: 1 0 0\nbeta: 0 1 0\n",
    "taps 2\nalpha: 1\nbeta: 0 1\n", "taps 2\nalpha: 1 0\n", "taps 2\nalpha: 1 x\nbeta: 0 1\n",
])
def test_filter_malformed(text):
    with pytest.raises(OracleError):
        parse_filter(text)


def test_named_pair_unknown():
    with pytest.raises(OracleError):
        named_pair("sym8", 8)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-math.pi, math.pi), min_size=1, max_size=4))
def test_lattice_pairs_always_qmf(angles):
    period = 2 * len(angles) + 2
    assert qmf_check(extract_qmf(lattice_to_word(angles), period)).passed
