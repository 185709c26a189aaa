"""Probability matrices between two contexts and their phase matrices.

Orientation: row ``i`` is the initial modality ``u_i``, column ``j`` the
outcome modality ``v_j``, so ``m[i, j] = p(v_j | u_i)`` and rows sum to 1.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np

from bornlab.numerics import (
    TOL_STOCHASTIC,
    ConvergenceError,
    DimensionError,
    DomainError,
    RngStream,
    _as_generator,
    as_square,
    dagger,
    svd,
)

TOL_WITNESS = 1e-8
TOL_CLOSURE = 1e-12


class MatrixKind(str, enum.Enum):
    STOCHASTIC_ONLY = "stochastic-only"
    BISTOCHASTIC_ONLY = "bistochastic-only"
    UNISTOCHASTIC = "unistochastic"
    NOT_UNISTOCHASTIC = "not-unistochastic"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class MatrixClass:
    """Verdict of :func:`classify`.

    ``witness`` is a unitary with ``|witness|**2`` equal to the input when the
    verdict is unistochastic; ``certificate`` explains negative verdicts.
    """

    kind: MatrixKind
    witness: np.ndarray | None = None
    certificate: str | None = None
    restarts_used: int | None = None

    def __post_init__(self):
        if self.kind is MatrixKind.UNISTOCHASTIC and self.witness is None:
            raise ValueError("unistochastic verdict requires a witness")
        if self.kind is MatrixKind.NOT_UNISTOCHASTIC and not self.certificate:
            raise ValueError("not-unistochastic verdict requires a certificate")


def as_probability_matrix(m) -> np.ndarray:
    return as_square(m, dtype=float)


def validate_stochastic(m, tol: float = TOL_STOCHASTIC) -> bool:
    """Entries in ``[0, 1]`` and every row summing to 1, both within ``tol``."""
    a = as_probability_matrix(m)
    if np.any(a < -tol) or np.any(a > 1 + tol):
        return False
    return bool(np.all(np.abs(a.sum(axis=1) - 1.0) <= tol))


def is_bistochastic(m, tol: float = TOL_STOCHASTIC) -> bool:
    a = as_probability_matrix(m)
    return validate_stochastic(a, tol) and bool(np.all(np.abs(a.sum(axis=0) - 1.0) <= tol))


def build_sigma(m, phases) -> np.ndarray:
    """Phase matrix with entries ``exp(1j * phases[i, j]) * sqrt(m[i, j])``."""
    a = as_probability_matrix(m)
    ph = np.asarray(phases, dtype=float)
    if ph.shape != a.shape:
        raise DimensionError(f"phases shape {ph.shape} does not match {a.shape}")
    return np.exp(1j * ph) * np.sqrt(np.clip(a, 0.0, None))


def basis_projector(n: int, i: int) -> np.ndarray:
    p = np.zeros((n, n), dtype=complex)
    p[i, i] = 1.0
    return p


def extract_probability(sigma, i: int, j: int) -> float:
    """``Tr(P_j sigma^† P_i sigma)`` evaluated with explicit diagonal projectors.

    Deliberately literal; use ``abs(sigma[i, j])**2`` when speed matters.
    """
    s = as_square(sigma)
    n = s.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"indices ({i}, {j}) out of range for n={n}")
    t = np.trace(basis_projector(n, j) @ dagger(s) @ basis_projector(n, i) @ s)
    return float(t.real)


def singular_value_profile(sigma) -> np.ndarray:
    return svd(sigma).singular_values


def _rotation_witness(m: np.ndarray) -> np.ndarray:
    c = np.sqrt(m[0, 0])
    s = np.sqrt(m[0, 1])
    return np.array([[c, s], [-s, c]], dtype=complex)


def _triangle_phasors(links: np.ndarray) -> np.ndarray | None:
    """Unit phasors ``z`` with ``sum(links * z) == 0``, or None if no triangle closes.

    The longest link points along +1; the other two are placed by the law of
    cosines.
    """
    order = np.argsort(-links, kind="stable")
    big, x, y = links[order]
    z = np.ones(3, dtype=complex)
    if big <= TOL_CLOSURE:
        return z
    if big > x + y + TOL_CLOSURE:
        return None
    if x <= TOL_CLOSURE or y <= TOL_CLOSURE:
        # degenerate triangle: the two nonzero links point opposite ways
        z[order[1] if x > y else order[2]] = -1.0
        return z
    # angle at which x must sit relative to big so that |big + x e^{ia}| = y
    cos_a = np.clip((y * y - big * big - x * x) / (2 * big * x), -1.0, 1.0)
    a = np.arccos(cos_a)
    zx = np.exp(1j * a)
    zy = -(big + x * zx) / y
    z[order[1]] = zx
    z[order[2]] = zy / abs(zy)
    return z


def _chain_link_violation(m: np.ndarray) -> str | None:
    for axis, label in ((m, "rows"), (m.T, "columns")):
        for a, b in itertools.combinations(range(3), 2):
            links = np.sqrt(axis[a] * axis[b])
            k = int(np.argmax(links))
            others = links.sum() - links[k]
            if links[k] > others + TOL_CLOSURE:
                triple = ", ".join(f"{v!r}" for v in links.tolist())
                return (
                    f"{label} ({a}, {b}): links ({triple}); "
                    f"link {k} exceeds the sum of the others by {float(links[k] - others)!r}"
                )
    return None


def chain_link_3x3(m, tol: float = TOL_STOCHASTIC) -> MatrixClass:
    """Exact unistochasticity decision for 3 x 3 bistochastic matrices.

    For each pair of rows (and of columns) the links ``sqrt(m[a,k] m[b,k])``
    must close into a triangle. When they all do, a unitary witness is built:
    row 0 real, row 1 phased so that it is orthogonal to row 0, row 2 the
    conjugated cross product of the first two.
    """
    a = as_probability_matrix(m)
    if a.shape != (3, 3):
        raise DimensionError(f"chain-link test needs a 3 x 3 matrix, got {a.shape}")
    if not is_bistochastic(a, tol):
        raise DomainError("chain-link test needs a bistochastic matrix")

    violation = _chain_link_violation(a)
    if violation is not None:
        return MatrixClass(MatrixKind.NOT_UNISTOCHASTIC, certificate=violation)

    root = np.sqrt(np.clip(a, 0.0, None))
    phasors = _triangle_phasors(root[0] * root[1])
    # orthogonality: sum_k root0_k * conj(row1_k) = sum_k link_k * phasor_k = 0
    u0 = root[0].astype(complex)
    u1 = root[1] * np.conj(phasors)
    u2 = np.conj(np.cross(u0, u1))
    witness = np.vstack([u0, u1, u2])
    if np.max(np.abs(np.abs(witness) ** 2 - a)) > TOL_WITNESS:
        raise ArithmeticError("chain-link witness failed to reproduce the matrix")
    return MatrixClass(MatrixKind.UNISTOCHASTIC, witness=witness)


def classify(m, settings=None, rng: RngStream | None = None, tol: float = TOL_STOCHASTIC) -> MatrixClass:
    """Classify a stochastic matrix as stochastic-only, unistochastic, ...

    n = 2 and n = 3 are decided exactly. For n >= 4 the phase-recovery
    optimizer either finds a witness or gives up with ``undecided``; a
    negative verdict is never issued there because the search is incomplete.
    """
    from bornlab.phase_recovery import RecoverySettings, RecoveryStatus, recover

    a = as_probability_matrix(m)
    if not validate_stochastic(a, tol):
        raise DomainError("matrix is not stochastic")
    n = a.shape[0]
    if not is_bistochastic(a, tol):
        return MatrixClass(
            MatrixKind.STOCHASTIC_ONLY,
            certificate="column sums " + ", ".join(repr(float(c)) for c in a.sum(axis=0)),
        )
    if n == 1:
        return MatrixClass(MatrixKind.UNISTOCHASTIC, witness=np.ones((1, 1), dtype=complex))
    if n == 2:
        return MatrixClass(MatrixKind.UNISTOCHASTIC, witness=_rotation_witness(a))
    if n == 3:
        return chain_link_3x3(a, tol)

    result = recover(a, settings or RecoverySettings(), rng or RngStream(), tol=tol)
    if result.status is RecoveryStatus.SUCCESS:
        return MatrixClass(
            MatrixKind.UNISTOCHASTIC, witness=result.witness, restarts_used=result.restarts_used
        )
    return MatrixClass(
        MatrixKind.UNDECIDED,
        certificate=f"phase recovery exhausted; best objective {result.objective!r}",
        restarts_used=result.restarts_used,
    )


def sample_bistochastic(n: int, rng, iters: int = 10_000, tol: float = TOL_STOCHASTIC) -> np.ndarray:
    """Sinkhorn-balance a random positive matrix until it is bistochastic."""
    if n < 2:
        raise DimensionError("n must be >= 2")
    gen = _as_generator(rng)
    a = gen.uniform(0.0, 1.0, size=(n, n)) + np.finfo(float).tiny
    deviation = np.inf
    for _ in range(iters):
        a = a / a.sum(axis=0, keepdims=True)
        a = a / a.sum(axis=1, keepdims=True)
        deviation = max(
            np.max(np.abs(a.sum(axis=0) - 1.0)), np.max(np.abs(a.sum(axis=1) - 1.0))
        )
        if deviation <= tol:
            return a
    raise ConvergenceError(
        f"Sinkhorn did not reach tolerance {tol} in {iters} iterations", deviation=float(deviation)
    )


def unistochastic_from_unitary(u) -> np.ndarray:
    return np.abs(as_square(u)) ** 2
