"""Contexts of rank-one projectors, Born probabilities and unitary context maps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from bornlab.numerics import (
    TOL_UNITARY,
    DimensionError,
    DomainError,
    as_square,
    dagger,
    frobenius_distance,
    is_unitary,
)

TOL_PROJECTOR = 1e-10
TOL_CONSISTENCY = 1e-9


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + dagger(m))


@dataclass(frozen=True, eq=False)
class Projector:
    """Hermitian rank-one projector, labelled by the modality it stands for."""

    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        m = as_square(self.matrix)
        if frobenius_distance(m, dagger(m)) > TOL_PROJECTOR:
            raise DomainError(f"projector {self.label!r} is not Hermitian")
        if frobenius_distance(m @ m, m) > TOL_PROJECTOR:
            raise DomainError(f"projector {self.label!r} is not idempotent")
        if abs(np.trace(m) - 1.0) > TOL_PROJECTOR:
            raise DomainError(f"projector {self.label!r} does not have unit trace")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, vec, label: str = "") -> "Projector":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(np.outer(v, v.conj()), label)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def vector(self) -> np.ndarray:
        """Unit vector spanning the range; first nonzero component real positive."""
        col = self.matrix[:, int(np.argmax(np.linalg.norm(self.matrix, axis=0)))]
        v = col / np.linalg.norm(col)
        return _fix_phase(v)

    def same_modality(self, other: "Projector", tol: float = TOL_PROJECTOR) -> bool:
        return self.dim == other.dim and frobenius_distance(self.matrix, other.matrix) <= tol


def _fix_phase(v: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    k = int(np.argmax(np.abs(v) > tol))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True, eq=False)
class Context:
    """Ordered complete set of mutually orthogonal rank-one projectors."""

    projectors: tuple[Projector, ...]
    label: str = ""

    def __post_init__(self):
        ps = tuple(self.projectors)
        object.__setattr__(self, "projectors", ps)
        if not ps:
            raise DimensionError("a context needs at least one projector")
        n = ps[0].dim
        if len(ps) != n or any(p.dim != n for p in ps):
            raise DimensionError(f"a context in dimension {n} needs exactly {n} projectors of that size")
        for i, p in enumerate(ps):
            for j in range(i + 1, len(ps)):
                if np.linalg.norm(p.matrix @ ps[j].matrix) > TOL_PROJECTOR:
                    raise DomainError(f"projectors {i} and {j} of {self.label!r} are not orthogonal")
        total = sum(p.matrix for p in ps)
        if frobenius_distance(total, np.eye(n)) > TOL_PROJECTOR:
            raise DomainError(f"projectors of {self.label!r} do not sum to the identity")

    @property
    def dim(self) -> int:
        return len(self.projectors)

    def __len__(self) -> int:
        return len(self.projectors)

    def __getitem__(self, i: int) -> Projector:
        return self.projectors[i]

    @classmethod
    def from_unitary(cls, u, label: str = "") -> "Context":
        """Context of projectors onto the columns of ``u``."""
        u = as_square(u)
        return cls(
            tuple(Projector.from_vector(u[:, k], f"{label}[{k}]") for k in range(u.shape[0])),
            label,
        )

    def basis(self) -> np.ndarray:
        """Unitary whose columns span the projectors, in order (gauge-fixed)."""
        return np.column_stack([p.vector() for p in self.projectors])


def standard_context(n: int, label: str = "standard") -> Context:
    if n < 2:
        raise DimensionError("contexts need n >= 2")
    return Context.from_unitary(np.eye(n, dtype=complex), label)


def born(p: Projector, q: Projector) -> float:
    """``Re Tr(p q)``, clamped to [0, 1] when the excursion is rounding noise.

    Summed as ``sum(Re p * Re q + Im p * Im q)`` over matching entries (equal to
    ``Re Tr(p q)`` for Hermitian ``q``), which makes the result exactly
    symmetric in ``p`` and ``q``.
    """
    if p.dim != q.dim:
        raise DimensionError(f"projector dimensions differ: {p.dim} vs {q.dim}")
    a, b = p.matrix, q.matrix
    t = float(np.sum(a.real * b.real + a.imag * b.imag))
    if t < 0.0:
        if t < -TOL_PROJECTOR:
            raise DomainError(f"negative trace {t!r}")
        return 0.0
    if t > 1.0:
        if t > 1.0 + TOL_PROJECTOR:
            raise DomainError(f"trace {t!r} exceeds 1")
        return 1.0
    return t


def born_matrix(source: Context, target: Context) -> np.ndarray:
    """``m[i, j] = born(source[i], target[j])``; rows index the initial modality."""
    if source.dim != target.dim:
        raise DimensionError(f"context dimensions differ: {source.dim} vs {target.dim}")
    return np.array([[born(p, q) for q in target.projectors] for p in source.projectors])


@dataclass(frozen=True, eq=False)
class ContextMap:
    """Unitary ``S`` taking the ``source`` context to ``target`` by ``P -> S P S^†``."""

    unitary: np.ndarray
    source: str = ""
    target: str = ""
    tol: float = TOL_UNITARY

    def __post_init__(self):
        u = as_square(self.unitary)
        if not is_unitary(u, self.tol):
            raise DomainError("context map is not unitary")
        u.setflags(write=False)
        object.__setattr__(self, "unitary", u)

    @property
    def dim(self) -> int:
        return self.unitary.shape[0]

    def inverse(self) -> "ContextMap":
        return ContextMap(dagger(self.unitary), source=self.target, target=self.source, tol=self.tol)

    def then(self, other: "ContextMap") -> "ContextMap":
        """Apply ``self`` first, then ``other``."""
        if other.dim != self.dim:
            raise DimensionError("cannot compose maps of different dimension")
        return ContextMap(other.unitary @ self.unitary, source=self.source, target=other.target)

    def conjugate(self, p: Projector, label: str | None = None) -> Projector:
        s = self.unitary
        return Projector(_hermitize(s @ p.matrix @ dagger(s)), p.label if label is None else label)


def identity_map(n: int, label: str = "") -> ContextMap:
    return ContextMap(np.eye(n, dtype=complex), source=label, target=label)


def permutation_map(perm, source: str = "", target: str = "") -> ContextMap:
    """Relabelling: the map sends projector ``k`` onto projector ``perm[k]`` of the standard basis."""
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation")
    s = np.zeros((n, n), dtype=complex)
    s[perm, np.arange(n)] = 1.0
    return ContextMap(s, source, target)


def transform_context(c: Context, s: ContextMap, label: str | None = None) -> Context:
    if s.dim != c.dim:
        raise DimensionError(f"map dimension {s.dim} does not match context dimension {c.dim}")
    return Context(
        tuple(s.conjugate(p) for p in c.projectors),
        label=(s.target or f"{c.label}'") if label is None else label,
    )


def map_from_contexts(source: Context, target: Context) -> ContextMap:
    """Unitary sending the k-th ray of ``source`` onto the k-th ray of ``target``.

    Both bases are gauge-fixed (first nonzero component real positive), so the
    result is deterministic; conjugation by it is gauge independent anyway.
    """
    if source.dim != target.dim:
        raise DimensionError(f"context dimensions differ: {source.dim} vs {target.dim}")
    s = target.basis() @ dagger(source.basis())
    return ContextMap(s, source=source.label, target=target.label)


@dataclass(frozen=True)
class ConsistencyReport:
    """Largest deviation of each identification between two contexts and a map."""

    forward_projector: float
    backward_projector: float
    forward_probability: float
    backward_probability: float
    tol: float = TOL_CONSISTENCY

    @property
    def deviations(self) -> dict[str, float]:
        return {
            "forward_projector": self.forward_projector,
            "backward_projector": self.backward_projector,
            "forward_probability": self.forward_probability,
            "backward_probability": self.backward_probability,
        }

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.deviations.items() if not v <= self.tol]

    @property
    def ok(self) -> bool:
        return not self.failures


def consistency_check(source: Context, target: Context, s, tol: float = TOL_CONSISTENCY) -> ConsistencyReport:
    """Check that ``s`` maps ``source`` onto ``target`` from both directions.

    * forward: ``S A_j S^†`` against ``B_j``
    * backward: ``S^† B_j S`` against ``A_j`` (the return map is ``S^†``)
    * probabilities ``Tr(A_i S A_j S^†)`` and ``Tr(S^† B_i S B_j)`` against
      the direct table ``Tr(A_i B_j)``

    ``s`` may be a :class:`ContextMap` or a bare matrix, so that deliberately
    broken (non-unitary) maps can be examined too.
    """
    u = s.unitary if isinstance(s, ContextMap) else as_square(s)
    if u.shape[0] != source.dim or source.dim != target.dim:
        raise DimensionError("dimension mismatch between contexts and map")
    ud = dagger(u)
    a = [p.matrix for p in source.projectors]
    b = [q.matrix for q in target.projectors]
    fwd = [u @ x @ ud for x in a]
    bwd = [ud @ y @ u for y in b]
    direct = born_matrix(source, target)

    def tr(x, y):
        return float(np.trace(x @ y).real)

    n = source.dim
    via_source = np.array([[tr(a[i], fwd[j]) for j in range(n)] for i in range(n)])
    via_target = np.array([[tr(bwd[i], b[j]) for j in range(n)] for i in range(n)])
    return ConsistencyReport(
        forward_projector=max(frobenius_distance(x, y) for x, y in zip(fwd, b)),
        backward_projector=max(frobenius_distance(x, y) for x, y in zip(bwd, a)),
        forward_probability=float(np.max(np.abs(via_source - direct))),
        backward_probability=float(np.max(np.abs(via_target - direct))),
        tol=tol,
    )


# --- rotations of a Stern-Gerlach type apparatus -------------------------------

_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
_R2 = 1.0 / np.sqrt(2.0)
_SPIN1 = (
    _R2 * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]], dtype=complex),
    _R2 * np.array([[0, -1j, 0], [1j, 0, -1j], [0, 1j, 0]], dtype=complex),
    np.diag([1.0, 0.0, -1.0]).astype(complex),
)
SUPPORTED_SPINS = (Fraction(1, 2), Fraction(1))
AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


def _spin(s) -> Fraction:
    f = Fraction(s).limit_denominator(2)
    if f not in SUPPORTED_SPINS:
        raise ValueError(f"unsupported spin {s}; supported: 1/2, 1")
    return f


@dataclass(frozen=True)
class GroupElement:
    """Rotation about a unit axis, or a composition of rotations.

    ``parts`` of a composed element are applied left to right: the first part
    acts first.
    """

    kind: str
    spin: Fraction
    axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    angle: float = 0.0
    parts: tuple["GroupElement", ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "spin", _spin(self.spin))
        if self.kind == "rotation-axis-angle":
            if abs(np.linalg.norm(self.axis) - 1.0) > 1e-12:
                raise ValueError(f"rotation axis {self.axis} is not a unit vector")
        elif self.kind == "composed":
            if any(p.spin != self.spin for p in self.parts):
                raise ValueError("cannot compose rotations of different spin")
        else:
            raise ValueError(f"unknown group element kind {self.kind!r}")

    @classmethod
    def rotation(cls, axis, angle: float, spin=Fraction(1, 2)) -> "GroupElement":
        if isinstance(axis, str):
            axis = AXES[axis]
        ax = np.asarray(axis, dtype=float)
        ax = ax / np.linalg.norm(ax)
        return cls("rotation-axis-angle", spin, tuple(float(x) for x in ax), float(angle))

    def then(self, other: "GroupElement") -> "GroupElement":
        mine = self.parts if self.kind == "composed" else (self,)
        theirs = other.parts if other.kind == "composed" else (other,)
        return GroupElement("composed", self.spin, parts=mine + theirs)

    def inverse(self) -> "GroupElement":
        if self.kind == "composed":
            return GroupElement("composed", self.spin, parts=tuple(p.inverse() for p in reversed(self.parts)))
        return GroupElement(self.kind, self.spin, self.axis, -self.angle)

    @property
    def dim(self) -> int:
        return int(2 * self.spin + 1)


def _rotation_matrix(axis, angle: float, spin: Fraction) -> np.ndarray:
    n = np.asarray(axis)
    if spin == Fraction(1, 2):
        k = sum(c * s for c, s in zip(n, _PAULI))
        return np.cos(angle / 2) * np.eye(2) - 1j * np.sin(angle / 2) * k
    # spin 1: (n.J)^3 = n.J, so the exponential series closes after K^2
    k = sum(c * s for c, s in zip(n, _SPIN1))
    return np.eye(3) - 1j * np.sin(angle) * k + (np.cos(angle) - 1.0) * (k @ k)


def representation(g: GroupElement) -> np.ndarray:
    if g.kind == "composed":
        out = np.eye(g.dim, dtype=complex)
        for part in g.parts:
            out = representation(part) @ out
        return out
    return _rotation_matrix(g.axis, g.angle, g.spin)


def spin_rotation(g: GroupElement, source: str = "", target: str = "") -> ContextMap:
    return ContextMap(representation(g), source=source, target=target)
