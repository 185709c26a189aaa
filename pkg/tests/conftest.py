import contextlib
import io
import json
import os
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bornlab.cli import main
from bornlab.csm import Context
from bornlab.numerics import RngStream, haar_unitary

settings.register_profile(
    "default", deadline=None, max_examples=50, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


GOLDEN = Path(__file__).parent / "golden"
GOLDEN_CASES = json.loads((GOLDEN / "cases.json").read_text(encoding="utf-8"))


def run_cli(argv, cwd=None):
    """Run the CLI in-process; return (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    if cwd is not None:
        os.chdir(cwd)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            try:
                code = main([str(a) for a in argv])
            except SystemExit as exc:
                code = exc.code
    finally:
        os.chdir(old)
    return int(code), out.getvalue(), err.getvalue()


def golden_mismatches():
    """Names of golden cases whose exit code or stdout differ from the stored files."""
    bad = []
    for case in GOLDEN_CASES:
        code, text, _ = run_cli(case["argv"], GOLDEN / "inputs")
        expected = (GOLDEN / f"{case['name']}.out").read_text(encoding="utf-8")
        if code != case["exit"] or text != expected:
            bad.append(case["name"])
    return bad


def random_context(n, gen, label="c"):
    return Context.from_unitary(haar_unitary(n, gen), label)


def random_stochastic(n, gen):
    m = gen.uniform(0.0, 1.0, size=(n, n)) ** 3
    return m / m.sum(axis=1, keepdims=True)


def fourier(n):
    j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    return np.exp(2j * np.pi * j * k / n) / np.sqrt(n)


def dephase(w):
    """Divide out row phases (first column) and column phases (first row)."""
    w = w / (w[:, :1] / np.abs(w[:, :1]))
    return w / (w[:1, :] / np.abs(w[:1, :]))


@pytest.fixture
def gen():
    return RngStream(20261018).generator()


@pytest.fixture
def hadamard():
    return np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
