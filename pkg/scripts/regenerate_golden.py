"""Rebuild the CLI golden files under tests/golden.

Writes the input documents, runs every case in-process, checks each exit
code against the expected one in cases.json, and stores the stdout.

    python3 scripts/regenerate_golden.py
"""

from __future__ import annotations

import contextlib
import io as _io
import json
import os
import sys
from pathlib import Path

import numpy as np

from bornlab import csm, gleason, io, stochastic
from bornlab.cli import main
from bornlab.numerics import RngStream, haar_unitary

GOLDEN = Path(__file__).resolve().parents[1] / "tests" / "golden"


def write_inputs(root: Path) -> None:
    root.mkdir(parents=True, exist_ok=True)
    s = 1 / np.sqrt(2)
    docs = {
        "identity3.json": io.matrix_to_json(np.eye(3)),
        "circulant3.json": io.matrix_to_json(np.array([[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]])),
        "vdw3.json": io.matrix_to_json(np.full((3, 3), 1 / 3)),
        "bistochastic5.json": io.matrix_to_json(stochastic.sample_bistochastic(5, RngStream(11))),
        "not_bistochastic.json": io.matrix_to_json(np.array([[1, 0], [0.5, 0.5]])),
        "not_stochastic.json": io.matrix_to_json(np.array([[0.7, 0.7], [0.3, 0.3]])),
        "not_square.json": io.matrix_to_json(np.array([[0.5, 0.5]])),
        "complex.json": io.matrix_to_json(np.array([[1, 0], [0, 1j]])),
        "hadamard2.json": io.matrix_to_json(np.array([[s, s], [s, -s]])),
        "not_unitary.json": io.matrix_to_json(np.array([[1, 1], [0, 1]])),
        "ctxA.json": io.context_to_json(csm.standard_context(3, "z")),
        "ctxB.json": io.context_to_json(csm.Context.from_unitary(haar_unitary(3, RngStream(4)), "b")),
        "ctx2.json": io.context_to_json(csm.standard_context(2, "z2")),
        "samples1.json": gleason.samples_to_json([(csm.standard_context(3)[0], 1.0)]),
        "samples_bad.json": [{"projector": io.matrix_to_json(np.eye(2)), "value": 1.0}],
    }
    for name, doc in docs.items():
        (root / name).write_text(io.dumps(doc), encoding="utf-8")
    (root / "broken.json").write_text('{"rows": 2,', encoding="utf-8")


def run_case(argv: list[str], cwd: Path) -> tuple[int, str]:
    """Run the CLI in-process from ``cwd``; return (exit code, stdout)."""
    out = _io.StringIO()
    old = os.getcwd()
    os.chdir(cwd)
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(_io.StringIO()):
            try:
                code = main(argv)
            except SystemExit as exc:
                code = exc.code
    finally:
        os.chdir(old)
    return int(code), out.getvalue()


def main_regenerate() -> int:
    write_inputs(GOLDEN / "inputs")
    cases = json.loads((GOLDEN / "cases.json").read_text(encoding="utf-8"))
    bad = 0
    for case in cases:
        code, text = run_case(case["argv"], GOLDEN / "inputs")
        if code != case["exit"]:
            print(f"{case['name']}: exit {code}, expected {case['exit']}", file=sys.stderr)
            bad += 1
        (GOLDEN / f"{case['name']}.out").write_text(text, encoding="utf-8")
    print(f"{len(cases)} cases written, {bad} exit-code mismatches")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main_regenerate())
