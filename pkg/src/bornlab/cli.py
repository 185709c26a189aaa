"""Command-line front end.

Exit codes: 0 verified/success, 1 property violated or negative decision,
2 undecided or budget exhausted, 64 usage error, 65 input format error.
Reports go to stdout (or ``--out``), diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import ast
import json
import operator
import sys
from fractions import Fraction

import numpy as np

from bornlab import csm, gleason, io, stochastic
from bornlab.numerics import (
    TOL_STOCHASTIC,
    TOL_UNITARY,
    DimensionError,
    DomainError,
    RngStream,
    haar_unitary,
    is_unitary,
)
from bornlab.phase_recovery import RecoverySettings, RecoveryStatus, recover

EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_UNDECIDED = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- helpers -------------------------------------------------------------------

def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _load_matrix(path: str) -> np.ndarray:
    try:
        return io.matrix_from_json(_load_json(path))
    except io.FormatError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_probability_matrix(path: str) -> np.ndarray:
    m = _load_matrix(path)
    if np.iscomplexobj(m):
        raise InputError(f"{path}: probability matrix must be real")
    if m.shape[0] != m.shape[1]:
        raise InputError(f"{path}: matrix must be square, got {m.shape[0]} x {m.shape[1]}")
    return m


def _load_context(path: str) -> csm.Context:
    try:
        return io.context_from_json(_load_json(path))
    except (io.FormatError, DimensionError, DomainError) as exc:
        raise InputError(f"{path}: {exc}") from exc


_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_angle(text: str) -> float:
    """Angle in radians; accepts arithmetic on numbers and ``pi`` (e.g. ``-pi/3``, ``2*pi/3``)."""

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return np.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
            return _OPS[type(node.op)](ev(node.left), ev(node.right))
        raise ValueError(f"bad angle {text!r}")

    try:
        return float(ev(ast.parse(text.strip(), mode="eval")))
    except (SyntaxError, ZeroDivisionError) as exc:
        raise ValueError(f"bad angle {text!r}") from exc


def parse_axis_angle(token: str) -> tuple[tuple[float, float, float], float]:
    """``AXIS:ANGLE`` where AXIS is x, y, z or ``ax,ay,az``."""
    if ":" not in token:
        raise ValueError(f"expected AXIS:ANGLE, got {token!r}")
    axis_text, angle_text = token.rsplit(":", 1)
    if axis_text in csm.AXES:
        axis = csm.AXES[axis_text]
    else:
        parts = [float(x) for x in axis_text.split(",")]
        if len(parts) != 3 or np.linalg.norm(parts) == 0:
            raise ValueError(f"bad axis {axis_text!r}")
        axis = tuple(parts)
    return axis, parse_angle(angle_text)


def _seed_arg(text: str) -> int:
    try:
        v = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed {text!r}") from exc
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must lie in [0, 2**64)")
    return v


def _spin_arg(text: str) -> Fraction:
    try:
        s = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad spin {text!r}") from exc
    if s not in csm.SUPPORTED_SPINS:
        raise argparse.ArgumentTypeError(f"unsupported spin {text}; use 1/2 or 1")
    return s


def _emit(args, text: str) -> None:
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {args.out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _settings(args) -> RecoverySettings:
    return RecoverySettings(restarts=args.restarts, max_iterations=args.max_iterations)


# --- subcommands ---------------------------------------------------------------

_CHECK_EXIT = {
    stochastic.MatrixKind.UNISTOCHASTIC: EXIT_OK,
    stochastic.MatrixKind.NOT_UNISTOCHASTIC: EXIT_VIOLATED,
    stochastic.MatrixKind.STOCHASTIC_ONLY: EXIT_VIOLATED,
    stochastic.MatrixKind.BISTOCHASTIC_ONLY: EXIT_VIOLATED,
    stochastic.MatrixKind.UNDECIDED: EXIT_UNDECIDED,
}


def cmd_check(args) -> int:
    m = _load_probability_matrix(args.path)
    if not stochastic.validate_stochastic(m, args.tol_stochastic):
        raise InputError(f"{args.path}: not a stochastic matrix")
    verdict = stochastic.classify(m, _settings(args), RngStream(args.seed), tol=args.tol_stochastic)
    report = {
        "n": int(m.shape[0]),
        "kind": verdict.kind.value,
        "witness": None if verdict.witness is None else io.matrix_to_json(verdict.witness),
        "certificate": verdict.certificate,
        "restarts_used": verdict.restarts_used,
    }
    _emit(args, io.dumps(report))
    return _CHECK_EXIT[verdict.kind]


def cmd_born(args) -> int:
    if args.unitary and (args.source or args.target):
        raise UsageError("use either --unitary or --from/--to, not both")
    if args.unitary:
        u = _load_matrix(args.unitary).astype(complex)
        if u.shape[0] != u.shape[1]:
            raise InputError(f"{args.unitary}: unitary must be square")
        if u.shape[0] < 2:
            raise InputError(f"{args.unitary}: dimension must be >= 2")
        if not is_unitary(u, args.tol_unitary):
            raise InputError(f"{args.unitary}: matrix is not unitary within {args.tol_unitary}")
        source = csm.standard_context(u.shape[0])
        target = csm.transform_context(source, csm.ContextMap(u, tol=args.tol_unitary))
    elif args.source and args.target:
        source = _load_context(args.source)
        target = _load_context(args.target)
        if source.dim != target.dim:
            raise InputError(f"context dimensions differ: {source.dim} vs {target.dim}")
    else:
        raise UsageError("born needs --unitary FILE or both --from FILE and --to FILE")
    table = csm.born_matrix(source, target)
    _emit(args, io.matrix_to_csv(table))
    if not stochastic.is_bistochastic(table, args.tol_stochastic):
        print("warning: Born table is not bistochastic within tolerance", file=sys.stderr)
        return EXIT_VIOLATED
    return EXIT_OK


def cmd_recover(args) -> int:
    m = _load_probability_matrix(args.path)
    if not stochastic.validate_stochastic(m, args.tol_stochastic):
        raise InputError(f"{args.path}: not a stochastic matrix")
    result = recover(m, _settings(args), RngStream(args.seed), tol=args.tol_stochastic)
    _emit(args, io.dumps(result.to_dict()))
    return {
        RecoveryStatus.SUCCESS: EXIT_OK,
        RecoveryStatus.EXHAUSTED: EXIT_UNDECIDED,
        RecoveryStatus.REJECTED: EXIT_VIOLATED,
    }[result.status]


def _fit_exit(report: gleason.FitReport) -> int:
    if report.rank_of_design < report.rho.shape[0] ** 2:
        return EXIT_UNDECIDED
    if report.raw_residual < gleason.TOL_EXACT_FIT:
        return EXIT_OK
    if report.raw_residual > gleason.COUNTEREXAMPLE_THRESHOLD:
        return EXIT_VIOLATED
    return EXIT_UNDECIDED


def cmd_gleason_demo(args) -> int:
    dim = args.dim
    if dim < 2:
        raise UsageError("--dim must be >= 2")
    if args.counterexample and dim != 2:
        raise UsageError("--counterexample lives in dimension 2")
    count = args.contexts if args.contexts is not None else 3 * dim * dim
    if count < 1:
        raise UsageError("--contexts must be >= 1")
    rng = RngStream(args.seed)
    if args.counterexample:
        frame = gleason.bloch_frame()
        true_rho = None
    else:
        true_rho = gleason.random_density(dim, rng.substream(0))
        frame = gleason.density_frame(true_rho)
    contexts = gleason.sample_contexts(dim, count, rng.substream(1))
    hypothesis = gleason.verify_frame_hypothesis(frame, contexts)
    report = gleason.fit_density(gleason.frame_samples(frame, contexts), dim)
    doc = {
        "dim": dim,
        "contexts": count,
        "frame": frame.kind,
        "frame_hypothesis_max_deviation": hypothesis.max_deviation,
        **report.to_dict(),
    }
    if true_rho is not None:
        doc["true_rho"] = io.matrix_to_json(true_rho)
        doc["frobenius_error"] = float(np.linalg.norm(report.rho - true_rho))
    _emit(args, io.dumps(doc))
    return _fit_exit(report)


def cmd_gleason_fit(args) -> int:
    try:
        samples = gleason.samples_from_json(_load_json(args.samples))
    except (io.FormatError, DimensionError, DomainError) as exc:
        raise InputError(f"{args.samples}: {exc}") from exc
    if not samples:
        raise InputError(f"{args.samples}: no samples")
    dims = {p.dim for p, _ in samples}
    if len(dims) != 1:
        raise InputError(f"{args.samples}: projectors of mixed dimension {sorted(dims)}")
    dim = dims.pop()
    if args.dim is not None and args.dim != dim:
        raise InputError(f"{args.samples}: projectors have dimension {dim}, not {args.dim}")
    report = gleason.fit_density(samples, dim)
    _emit(args, io.dumps({"dim": dim, **report.to_dict()}))
    return _fit_exit(report)


def cmd_chain(args) -> int:
    if not args.axis_angles:
        raise UsageError("chain needs at least one AXIS:ANGLE rotation")
    try:
        rotations = [parse_axis_angle(t) for t in args.axis_angles]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    spin = args.spin
    dim = int(2 * spin + 1)
    if not 0 <= args.start < dim:
        raise UsageError(f"--start must lie in [0, {dim - 1}]")

    start_ctx = csm.standard_context(dim, "c0")
    contexts = [start_ctx]
    steps = []
    for k, (axis, angle) in enumerate(rotations, start=1):
        g = csm.GroupElement.rotation(axis, angle, spin)
        s = csm.spin_rotation(g, source=f"c{k - 1}", target=f"c{k}")
        nxt = csm.transform_context(contexts[-1], s, label=f"c{k}")
        table = csm.born_matrix(contexts[-1], nxt)
        from_start = csm.born_matrix(start_ctx, nxt)[args.start]
        steps.append(
            {
                "axis": list(g.axis),
                "angle": g.angle,
                "table": table.tolist(),
                "from_start": from_start.tolist(),
            }
        )
        contexts.append(nxt)
    composed = csm.born_matrix(start_ctx, contexts[-1])
    doc = {
        "spin": str(spin),
        "dim": dim,
        "start": args.start,
        "steps": steps,
        "composed_table": composed.tolist(),
    }
    _emit(args, io.dumps(doc))
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.dim < 2:
        raise UsageError("--dim must be >= 2")
    rng = RngStream(args.seed)
    if args.kind == "haar-unitary":
        m = haar_unitary(args.dim, rng)
    elif args.kind == "unistochastic":
        m = stochastic.unistochastic_from_unitary(haar_unitary(args.dim, rng))
    else:
        m = stochastic.sample_bistochastic(args.dim, rng)
    _emit(args, io.dumps(io.matrix_to_json(m)))
    return EXIT_OK


# --- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=_seed_arg, default=0, help="random seed (default 0)")
    shared.add_argument("--tol-unitary", type=float, default=TOL_UNITARY)
    shared.add_argument("--tol-stochastic", type=float, default=TOL_STOCHASTIC)
    shared.add_argument("--out", help="write the report here instead of stdout")

    optimizer = argparse.ArgumentParser(add_help=False)
    optimizer.add_argument("--restarts", type=int, default=RecoverySettings.restarts)
    optimizer.add_argument("--max-iterations", type=int, default=RecoverySettings.max_iterations)

    parser = _Parser(prog="bornlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", parents=[shared, optimizer], help="classify a probability matrix")
    p.add_argument("path")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("born", parents=[shared], help="Born probability table as CSV")
    p.add_argument("--unitary")
    p.add_argument("--from", dest="source")
    p.add_argument("--to", dest="target")
    p.set_defaults(func=cmd_born)

    p = sub.add_parser("recover", parents=[shared, optimizer], help="search for unitary phases")
    p.add_argument("path")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("gleason", help="frame-function fits")
    gsub = p.add_subparsers(dest="gleason_command", required=True, parser_class=_Parser)
    d = gsub.add_parser("demo", parents=[shared], help="sample a frame function and fit rho")
    d.add_argument("--dim", type=int, default=3)
    d.add_argument("--contexts", type=int, default=None, help="default 3 * dim**2")
    d.add_argument("--counterexample", action="store_true", help="dim-2 Bloch-cubic frame function")
    d.set_defaults(func=cmd_gleason_demo)
    f = gsub.add_parser("fit", parents=[shared], help="fit rho to a samples file")
    f.add_argument("samples")
    f.add_argument("--dim", type=int, default=None)
    f.set_defaults(func=cmd_gleason_fit)

    p = sub.add_parser("chain", parents=[shared], help="sequence of spin rotations")
    p.add_argument("--spin", type=_spin_arg, default=Fraction(1, 2))
    p.add_argument("--axis-angles", nargs="+", metavar="AXIS:ANGLE", default=[])
    p.add_argument("--start", type=int, default=0)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("sample", parents=[shared], help="write a random matrix")
    p.add_argument("--kind", choices=["haar-unitary", "bistochastic", "unistochastic"], required=True)
    p.add_argument("--dim", type=int, required=True)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bornlab: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InputError as exc:
        print(f"bornlab: {exc}", file=sys.stderr)
        return EXIT_DATAERR


if __name__ == "__main__":
    sys.exit(main())
