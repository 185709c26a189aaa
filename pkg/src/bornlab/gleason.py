"""Frame functions on rank-one projectors and least-squares recovery of a density operator.

In dimension >= 3 every frame function is ``P -> Tr(rho P)`` for a unique
density operator; in dimension 2 this fails, and :func:`bloch_frame`
provides a smooth counterexample whose best linear fit leaves a finite
residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from bornlab.csm import Context, Projector
from bornlab.numerics import (
    DimensionError,
    DomainError,
    _as_generator,
    as_square,
    dagger,
    haar_unitary,
    hermitian_eig,
    is_hermitian,
)

TOL_FRAME = 1e-10
TOL_EXACT_FIT = 1e-8
# raw RMS residual above this marks a fit as failed (the dim-2 cubic sits near 0.076)
COUNTEREXAMPLE_THRESHOLD = 0.05

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_vector(p: Projector) -> np.ndarray:
    if p.dim != 2:
        raise DimensionError("Bloch vectors exist for dimension 2 only")
    return np.array([np.trace(p.matrix @ s).real for s in _PAULI])


@dataclass(frozen=True, eq=False)
class FrameFunction:
    """Either ``P -> Tr(rho P)`` or, in dimension 2, ``P -> (1 + n_z**exponent) / 2``.

    ``n`` is the Bloch vector of ``P``. Odd exponents give a frame function,
    because the two projectors of a qubit context have opposite Bloch vectors.
    """

    dim: int
    kind: str = "density"
    rho: np.ndarray | None = None
    exponent: int = 3

    def __post_init__(self):
        if self.kind == "density":
            if self.rho is None:
                raise ValueError("density-generated frame function needs rho")
            check_density(self.rho)
            if self.rho.shape[0] != self.dim:
                raise DimensionError("rho does not match dim")
        elif self.kind == "analytic-bloch":
            if self.dim != 2:
                raise DimensionError("the analytic Bloch frame function lives in dimension 2")
            if self.exponent < 1 or self.exponent % 2 == 0:
                raise ValueError("exponent must be a positive odd integer")
        else:
            raise ValueError(f"unknown frame function kind {self.kind!r}")

    def __call__(self, p: Projector) -> float:
        return eval_frame(self, p)


def density_frame(rho) -> FrameFunction:
    rho = as_square(rho)
    return FrameFunction(rho.shape[0], "density", rho=rho)


def bloch_frame(exponent: int = 3) -> FrameFunction:
    return FrameFunction(2, "analytic-bloch", exponent=exponent)


def eval_frame(f: FrameFunction, p: Projector) -> float:
    if p.dim != f.dim:
        raise DimensionError(f"projector dimension {p.dim} does not match frame dimension {f.dim}")
    if f.kind == "density":
        return float(np.sum(f.rho.real * p.matrix.real + f.rho.imag * p.matrix.imag))
    nz = bloch_vector(p)[2]
    return 0.5 * (1.0 + nz**f.exponent)


def check_density(m, tol: float = 1e-10, eig_tol: float = 1e-9) -> np.ndarray:
    """Return ``m`` as an array if it is a density operator, else raise DomainError."""
    a = as_square(m)
    if not is_hermitian(a, tol):
        raise DomainError("density operator must be Hermitian")
    if abs(np.trace(a).real - 1.0) > tol:
        raise DomainError("density operator must have unit trace")
    if hermitian_eig(a, tol)[0][0] < -eig_tol:
        raise DomainError("density operator must be positive semidefinite")
    return a


def random_density(n: int, rng, rank: int | None = None) -> np.ndarray:
    """Random density operator ``G G^† / Tr(G G^†)`` with ``G`` complex Gaussian ``n x rank``."""
    gen = _as_generator(rng)
    k = n if rank is None else rank
    g = gen.standard_normal((n, k)) + 1j * gen.standard_normal((n, k))
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def sample_contexts(dim: int, count: int, rng) -> list[Context]:
    """``count`` contexts, each spanned by the columns of an independent Haar unitary."""
    if dim < 2:
        raise DimensionError("dim must be >= 2")
    if count < 1:
        raise ValueError("count must be >= 1")
    gen = _as_generator(rng)
    return [Context.from_unitary(haar_unitary(dim, gen), f"ctx{k}") for k in range(count)]


def frame_samples(f: Callable[[Projector], float], contexts: Sequence[Context]) -> list[tuple[Projector, float]]:
    return [(p, float(f(p))) for c in contexts for p in c.projectors]


@dataclass(frozen=True)
class FrameReport:
    max_deviation: float
    flagged: list[int]
    tol: float = TOL_FRAME

    @property
    def ok(self) -> bool:
        return not self.flagged


def verify_frame_hypothesis(f: Callable[[Projector], float], contexts: Sequence[Context], tol: float = TOL_FRAME) -> FrameReport:
    """Largest ``|sum_i f(P_i) - 1|`` over the given contexts; contexts above ``tol`` are flagged."""
    devs = [abs(sum(f(p) for p in c.projectors) - 1.0) for c in contexts]
    return FrameReport(
        max_deviation=max(devs, default=0.0),
        flagged=[k for k, d in enumerate(devs) if d > tol],
        tol=tol,
    )


def hermitian_basis(n: int) -> list[np.ndarray]:
    """Traceless Hermitian matrices orthonormal under ``Tr(A B)`` (generalised Gell-Mann)."""
    out = []
    for j in range(n):
        for k in range(j + 1, n):
            s = np.zeros((n, n), dtype=complex)
            s[j, k] = s[k, j] = 1.0 / np.sqrt(2.0)
            a = np.zeros((n, n), dtype=complex)
            a[j, k] = -1j / np.sqrt(2.0)
            a[k, j] = 1j / np.sqrt(2.0)
            out += [s, a]
    for l in range(1, n):
        d = np.zeros(n)
        d[:l] = 1.0
        d[l] = -l
        out.append(np.diag(d / np.sqrt(l * (l + 1))).astype(complex))
    return out


@dataclass(frozen=True)
class FitReport:
    rho: np.ndarray
    raw_rho: np.ndarray
    raw_residual: float
    projected_residual: float
    sample_count: int
    rank_of_design: int
    min_raw_eigenvalue: float
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        from bornlab.io import matrix_to_json

        return {
            "rho": matrix_to_json(self.rho),
            "raw_residual": self.raw_residual,
            "projected_residual": self.projected_residual,
            "sample_count": self.sample_count,
            "rank_of_design": self.rank_of_design,
            "min_raw_eigenvalue": self.min_raw_eigenvalue,
            "warnings": list(self.warnings),
        }


def _rms(x: np.ndarray) -> float:
    return float(np.sqrt(np.mean(x**2)))


def _project_psd(raw: np.ndarray) -> tuple[np.ndarray, float]:
    w, v = hermitian_eig(raw)
    clipped = np.clip(w, 0.0, None)
    rho = (v * (clipped / clipped.sum())) @ dagger(v)
    return 0.5 * (rho + dagger(rho)), float(w[0])


def fit_density(samples: Sequence[tuple[Projector, float]], dim: int) -> FitReport:
    """Least-squares density operator reproducing ``value ~ Tr(rho P)`` over the samples.

    ``rho`` is written as ``I/dim + sum_a c_a B_a`` with ``B_a`` the traceless
    orthonormal Hermitian basis, so the unit-trace constraint holds by
    construction and the ``c_a`` come from an unconstrained linear solve.
    The raw fit may have negative eigenvalues; it is then clipped and
    renormalised, and both residuals are reported.
    """
    if not samples:
        raise ValueError("no samples to fit")
    if any(p.dim != dim for p, _ in samples):
        raise DimensionError(f"all projectors must have dimension {dim}")

    basis = hermitian_basis(dim)
    mats = np.array([p.matrix for p, _ in samples])
    values = np.array([v for _, v in samples], dtype=float)
    design = np.stack([np.einsum("kij,ji->k", mats, b).real for b in basis], axis=1)
    offset = 1.0 / dim
    if design.shape[1]:
        coef = np.linalg.lstsq(design, values - offset, rcond=None)[0]
    else:
        coef = np.zeros(0)
    raw = np.eye(dim, dtype=complex) / dim + sum(c * b for c, b in zip(coef, basis))
    raw = 0.5 * (raw + dagger(raw))

    full_design = np.column_stack([np.full(len(samples), 1.0 / np.sqrt(dim)), design])
    rank = int(np.linalg.matrix_rank(full_design))
    rho, min_eig = _project_psd(raw)

    def predict(m):
        return np.einsum("kij,ji->k", mats, m).real

    warnings = []
    if rank < dim * dim:
        warnings.append(f"rank-deficient design: rank {rank} < {dim * dim}; rho is not determined")
    if min_eig < -1e-9:
        warnings.append(f"raw fit has negative eigenvalue {min_eig!r}; projected to PSD")
    return FitReport(
        rho=rho,
        raw_rho=raw,
        raw_residual=_rms(predict(raw) - values),
        projected_residual=_rms(predict(rho) - values),
        sample_count=len(samples),
        rank_of_design=rank,
        min_raw_eigenvalue=min_eig,
        warnings=warnings,
    )


def samples_to_json(samples: Sequence[tuple[Projector, float]]) -> list:
    from bornlab.io import matrix_to_json

    return [{"projector": matrix_to_json(p.matrix), "value": float(v)} for p, v in samples]


def samples_from_json(doc) -> list[tuple[Projector, float]]:
    from bornlab.io import FormatError, matrix_from_json

    if not isinstance(doc, list):
        raise FormatError("samples JSON must be a list")
    out = []
    for k, item in enumerate(doc):
        if not isinstance(item, dict) or "projector" not in item or "value" not in item:
            raise FormatError(f'sample {k} needs "projector" and "value"')
        value = item["value"]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"sample {k} value must be a number")
        out.append((Projector(matrix_from_json(item["projector"]).astype(complex), f"s{k}"), float(value)))
    return out
