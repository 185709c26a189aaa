"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of ``complex128`` (or ``float64`` where a
real matrix is natural). Everything here is a pure function of its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL_UNITARY = 1e-10
TOL_HERMITIAN = 1e-10
TOL_RECONSTRUCTION = 1e-10
TOL_STOCHASTIC = 1e-12

_MAX_SWEEPS = 80


class DimensionError(ValueError):
    """Matrix shapes do not fit the operation."""


class DomainError(ValueError):
    """Matrix values are outside the operation's domain (NaN, non-Hermitian, ...)."""


class ConvergenceError(RuntimeError):
    """An iterative procedure ran out of iterations."""

    def __init__(self, message: str, deviation: float):
        super().__init__(message)
        self.deviation = deviation


def as_matrix(m, dtype=complex) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D array, raising on anything else."""
    a = np.asarray(m, dtype=dtype)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    return a


def as_square(m, dtype=complex) -> np.ndarray:
    a = as_matrix(m, dtype=dtype)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def frobenius_distance(a, b) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def unitarity_defect(m) -> float:
    """Frobenius norm of ``m^† m - I``."""
    a = as_square(m)
    return frobenius_distance(dagger(a) @ a, np.eye(a.shape[0]))


def is_unitary(m, tol: float = TOL_UNITARY) -> bool:
    return unitarity_defect(m) <= tol


def is_hermitian(m, tol: float = TOL_HERMITIAN) -> bool:
    a = as_square(m)
    return frobenius_distance(a, dagger(a)) <= tol


@dataclass(frozen=True)
class SvdResult:
    """``m = u @ diag(singular_values) @ v^†`` with ``u`` and ``v`` unitary."""

    u: np.ndarray
    singular_values: np.ndarray
    v: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.u * self.singular_values) @ dagger(self.v)


def _complete_basis(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns ``cols`` (n x k) to an n x n unitary."""
    basis = [c for c in cols.T]
    for e in np.eye(n, dtype=complex):
        if len(basis) == n:
            break
        w = e.copy()
        for _ in range(2):  # re-orthogonalise once for stability
            for b in basis:
                w -= np.vdot(b, w) * b
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            basis.append(w / norm)
    return np.column_stack(basis)


def svd(m, tol: float = 1e-15) -> SvdResult:
    """Singular value decomposition by one-sided (Hestenes) Jacobi rotations.

    Pairs of columns of ``m`` are rotated until all pairs are mutually
    orthogonal; the accumulated rotations form ``v`` and the normalised
    columns form ``u``. Only square input is supported.

    Parameters
    ----------
    m : array_like
        Square complex or real matrix with finite entries.
    tol : float
        Relative orthogonality threshold ``|a_p^† a_q| <= tol * |a_p| |a_q|``
        that ends the sweeps.

    Returns
    -------
    SvdResult
        Singular values sorted nonincreasing.
    """
    a = as_square(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)

    for _ in range(_MAX_SWEEPS):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                ap = a[:, p]
                aq = a[:, q]
                alpha = np.vdot(ap, ap).real
                beta = np.vdot(aq, aq).real
                gamma = np.vdot(ap, aq)
                g = abs(gamma)
                if g == 0.0 or g <= tol * np.sqrt(alpha * beta):
                    continue
                rotated = True
                phase = gamma / g
                zeta = (beta - alpha) / (2.0 * g)
                t = (1.0 if zeta >= 0 else -1.0) / (abs(zeta) + np.hypot(1.0, zeta))
                c = 1.0 / np.hypot(1.0, t)
                s = c * t
                # columns p, q times [[c, s], [-s*conj(phase), c*conj(phase)]]
                rot = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                a[:, [p, q]] = a[:, [p, q]] @ rot
                v[:, [p, q]] = v[:, [p, q]] @ rot
        if not rotated:
            break
    else:
        raise ConvergenceError("Jacobi SVD did not converge", deviation=float("nan"))

    sigma = np.linalg.norm(a, axis=0)
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    a = a[:, order]
    v = v[:, order]

    scale = sigma[0] if sigma[0] > 0 else 1.0
    nonzero = sigma > n * np.finfo(float).eps * scale
    u = np.zeros((n, n), dtype=complex)
    u[:, nonzero] = a[:, nonzero] / sigma[nonzero]
    if not np.all(nonzero):
        k = int(np.count_nonzero(nonzero))
        u = _complete_basis(u[:, :k], n)
        sigma = np.where(nonzero, sigma, 0.0)
    return SvdResult(u=u, singular_values=sigma, v=v)


def singular_values(m) -> np.ndarray:
    return svd(m).singular_values


def is_unitary_by_singular_values(m, tol: float = 1e-9) -> bool:
    """True iff every singular value lies within ``tol`` of 1."""
    s = singular_values(m)
    return bool(np.all(np.abs(s - 1.0) <= tol))


def hermitian_eig(m, tol: float = TOL_HERMITIAN) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns of a Hermitian matrix."""
    a = as_square(m)
    if not is_hermitian(a, tol):
        raise DomainError("matrix is not Hermitian within tolerance")
    a = 0.5 * (a + dagger(a))
    return np.linalg.eigh(a)


@dataclass(frozen=True)
class RngStream:
    """Counter-based random stream keyed by ``(seed, stream_id)``.

    Each call to :meth:`generator` starts the same Philox sequence, so a
    stream is a value, not a stateful object. Parallel workers take distinct
    ``stream_id`` values (see :meth:`substream`).
    """

    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= v < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {v}")

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngStream":
        mixed = np.random.SeedSequence([self.seed, self.stream_id, index]).generate_state(
            1, np.uint64
        )[0]
        return RngStream(self.seed, int(mixed))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngStream or numpy Generator, got {type(rng).__name__}")


def haar_unitary(n: int, rng) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary.

    QR of a complex Ginibre matrix, with the columns of ``Q`` rephased so the
    diagonal of ``R`` is real positive (otherwise the distribution is not Haar).
    ``rng`` may be an :class:`RngStream` or an already advancing numpy
    ``Generator`` (for drawing many samples from one stream).
    """
    if n < 1:
        raise DimensionError("n must be >= 1")
    gen = _as_generator(rng)
    z = (gen.standard_normal((n, n)) + 1j * gen.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
