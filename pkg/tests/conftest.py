import time
from contextlib import contextmanager

import numpy as np
import pytest

from qwavelet.circuit import rot_matrix
from qwavelet.words import Rot, Shift, SplitWord

_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture
def criterion(request):
    """Context manager recording one PASS/FAIL line per acceptance criterion."""
    log = request.config.stash[_ACCEPTANCE]

    @contextmanager
    def run(number, title):
        info = {"detail": ""}
        start = time.perf_counter()
        try:
            yield info
        except BaseException as exc:
            msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
            log.append((number, f"[{number:>2}] FAIL  {title}: {msg[:160]}"))
            raise
        elapsed = time.perf_counter() - start
        extra = f"; {info['detail']}" if info["detail"] else ""
        log.append((number, f"[{number:>2}] PASS  {title} ({elapsed:.2f}s{extra})"))

    return run


def random_unitary(rng):
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_word(rng, max_steps=6, real=False):
    steps = []
    for _ in range(rng.integers(1, max_steps + 1)):
        if rng.random() < 0.4:
            steps.append(Shift(int(rng.choice([1, -1]))))
        elif real:
            steps.append(Rot(rot_matrix(rng.uniform(-np.pi, np.pi))))
        else:
            steps.append(Rot(random_unitary(rng)))
    return SplitWord(steps)


def random_signal(rng, size, count=None):
    shape = (size,) if count is None else (size, count)
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


def dotted_matrix(text):
    """Parse a matrix written with '.' for 0 and '-' for -1."""
    table = {".": 0.0, "-": -1.0, "1": 1.0}
    return np.array([[table[t] for t in row.split()] for row in text.strip().splitlines()])


def builder_circuits(max_n=5):
    """(name, circuit, valid_inputs) for a spread of builder outputs."""
    from qwavelet import builders as B
    from qwavelet.circuit import neg, pos
    from qwavelet.classical import HAAR_WORD, d4_word
    from qwavelet.plan import TransformPlan

    out = []
    for n in range(1, max_n + 1):
        out.append((f"walsh{n}", B.build_walsh_hadamard(n), None))
        out.append((f"inc{n}", B.build_increment_pow2(n), None))
        out.append((f"dec{n}", B.build_decrement_pow2(n), None))
    out.append(("inc-window", B.build_increment_pow2(5, range(1, 4), [neg(0), pos(4)]), None))
    for m in (6, 10, 12):
        out.append((f"incmod{m}", B.build_increment_mod(m), m))
        out.append((f"decmod{m}", B.build_decrement_mod(m), m))
    for n in range(2, max_n + 1):
        for kind in ("packet", "pyramid"):
            plan = TransformPlan.for_qubits(kind, n)
            out.append((f"{kind}-haar{n}", B.build_transform(plan, HAAR_WORD), None))
            out.append((f"{kind}-d4{n}", B.build_transform(plan, d4_word()), None))
    out.append(("pyramid-d4-12", B.build_transform(TransformPlan("pyramid", 2, 12), d4_word()), 12))
    return out
