"""Search for phases that turn ``sqrt(m)`` into a unitary matrix.

The moduli are fixed by the probability matrix, so the search space is a
torus of phases. The objective ``||S S^† - I||_F^2`` is invariant under
adding a constant to a full row or column of phases; the first row and
column are pinned to zero to remove those flat directions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from bornlab.numerics import (
    TOL_STOCHASTIC,
    DimensionError,
    DomainError,
    RngStream,
    dagger,
    unitarity_defect,
)
from bornlab.stochastic import (
    TOL_WITNESS,
    as_probability_matrix,
    build_sigma,
    is_bistochastic,
    validate_stochastic,
)


class RecoveryStatus(str, enum.Enum):
    SUCCESS = "success"
    EXHAUSTED = "exhausted"
    REJECTED = "rejected"


@dataclass(frozen=True)
class LineSearch:
    """L-BFGS memory and stopping thresholds for each restart."""

    memory: int = 20
    gtol: float = 1e-15
    ftol: float = 0.0


@dataclass(frozen=True)
class RecoverySettings:
    restarts: int = 20
    max_iterations: int = 2000
    success_threshold: float = 1e-10
    step_control: LineSearch = field(default_factory=LineSearch)

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not self.success_threshold > 0:
            raise ValueError("success_threshold must be positive")


@dataclass(frozen=True)
class RecoveryResult:
    status: RecoveryStatus
    objective: float | None
    restarts_used: int
    witness: np.ndarray | None = None
    phases: np.ndarray | None = None
    reason: str | None = None

    def to_dict(self) -> dict:
        from bornlab.io import matrix_to_json

        out = {
            "status": self.status.value,
            "objective": self.objective,
            "restarts_used": self.restarts_used,
            "witness": None if self.witness is None else matrix_to_json(self.witness),
        }
        if self.phases is not None:
            out["phases"] = matrix_to_json(self.phases)
        if self.reason is not None:
            out["reason"] = self.reason
        return out


def _check_shapes(m, phases) -> tuple[np.ndarray, np.ndarray]:
    a = as_probability_matrix(m)
    ph = np.asarray(phases, dtype=float)
    if ph.shape != a.shape:
        raise DimensionError(f"phases shape {ph.shape} does not match {a.shape}")
    return a, ph


def _objective_and_gradient(sigma: np.ndarray) -> tuple[float, np.ndarray]:
    n = sigma.shape[0]
    g = sigma @ dagger(sigma) - np.eye(n)
    f = float(np.sum(g.real**2 + g.imag**2))
    # d/dphi_ij of Tr(G^2) = 4 Re(i S_ij conj((G S)_ij))
    grad = -4.0 * np.imag(sigma * np.conj(g @ sigma))
    return f, grad


def objective(m, phases) -> float:
    """``||S S^† - I||_F^2`` for ``S = build_sigma(m, phases)``."""
    a, ph = _check_shapes(m, phases)
    return _objective_and_gradient(build_sigma(a, ph))[0]


def gradient(m, phases) -> np.ndarray:
    a, ph = _check_shapes(m, phases)
    return _objective_and_gradient(build_sigma(a, ph))[1]


def _gauge_mask(n: int) -> np.ndarray:
    mask = np.ones((n, n), dtype=bool)
    mask[0, :] = False
    mask[:, 0] = False
    return mask


def _descend(amplitude: np.ndarray, mask: np.ndarray, start: np.ndarray, settings: RecoverySettings):
    n = amplitude.shape[0]

    def fun(free):
        ph = np.zeros((n, n))
        ph[mask] = free
        f, g = _objective_and_gradient(amplitude * np.exp(1j * ph))
        return f, g[mask]

    ls = settings.step_control
    res = minimize(
        fun,
        start,
        jac=True,
        method="L-BFGS-B",
        options={
            "maxiter": settings.max_iterations,
            "maxcor": ls.memory,
            "gtol": ls.gtol,
            "ftol": ls.ftol,
        },
    )
    phases = np.zeros((n, n))
    phases[mask] = res.x
    return float(res.fun), np.mod(phases, 2 * np.pi)


def recover(
    m,
    settings: RecoverySettings | None = None,
    rng: RngStream | None = None,
    tol: float = TOL_STOCHASTIC,
) -> RecoveryResult:
    """Multi-restart gradient search for a unitary with ``|S|**2 == m``.

    Restart ``k`` draws its starting phases uniformly from ``[0, 2 pi)`` using
    ``rng.substream(k)``; restarts are tried in index order and the first one
    that reaches the success threshold with a valid witness wins. When none
    does, the best objective seen is reported with status ``exhausted``.
    Non-bistochastic input is rejected immediately.
    """
    settings = settings or RecoverySettings()
    rng = rng or RngStream()
    a = as_probability_matrix(m)
    if not validate_stochastic(a, tol):
        raise DomainError("matrix is not stochastic")
    if not is_bistochastic(a, tol):
        return RecoveryResult(
            RecoveryStatus.REJECTED,
            objective=None,
            restarts_used=0,
            reason="not bistochastic: column sums "
            + ", ".join(repr(float(c)) for c in a.sum(axis=0)),
        )

    n = a.shape[0]
    amplitude = np.sqrt(np.clip(a, 0.0, None)).astype(complex)
    mask = _gauge_mask(n)
    free = int(mask.sum())

    if free == 0:
        zero = np.zeros((n, n))
        return RecoveryResult(
            RecoveryStatus.SUCCESS,
            objective=objective(a, zero),
            restarts_used=1,
            witness=build_sigma(a, zero),
            phases=zero,
        )

    best = np.inf
    for k in range(settings.restarts):
        start = rng.substream(k).generator().uniform(0.0, 2 * np.pi, size=free)
        f, phases = _descend(amplitude, mask, start, settings)
        best = min(best, f)
        if f > settings.success_threshold:
            continue
        witness = build_sigma(a, phases)
        reproduces = np.max(np.abs(np.abs(witness) ** 2 - a)) <= TOL_WITNESS
        if unitarity_defect(witness) < TOL_WITNESS and reproduces:
            return RecoveryResult(
                RecoveryStatus.SUCCESS,
                objective=f,
                restarts_used=k + 1,
                witness=witness,
                phases=phases,
            )
    return RecoveryResult(RecoveryStatus.EXHAUSTED, objective=float(best), restarts_used=settings.restarts)
